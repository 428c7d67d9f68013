"""
JSON input parsing (channel specs, state files, region files) and atomic
output writing with run manifests
"""

import hashlib
import json
import logging
import os
from pathlib import Path
import tempfile
import time
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from .. import __version__
from ..errors import QmacError, SpecFileError
from ..quantum.channels import (
    KRAUS_TOL,
    QuantumChannel,
    channel_from_kraus,
    collective_phase_flip,
    dephasing,
    erasure_mac,
)
from ..quantum.linalg import SubsystemLayout
from ..quantum.states import CqqState, DensityMatrix, density_from_matrix, pure_state
from ..regions.geometry import RateRegion

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEFAULT_LABELS = ("A", "B", "C", "D", "E", "F")

BUILTIN_CHANNELS = ("erasure", "phase_flip", "dephasing")


def load_json(path: PathLike) -> Any:
    """Read a JSON document, reporting syntax errors with line and column."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecFileError(f"Cannot read {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecFileError(f"Malformed JSON in {path}: {e.msg}", line=e.lineno, column=e.colno) from e


def _require(doc: Dict[str, Any], key: str, where: str = "") -> Any:
    if not isinstance(doc, dict):
        raise SpecFileError("Expected a JSON object", field=where or None)
    if key not in doc:
        raise SpecFileError("Missing required field", field=f"{where}{key}")
    return doc[key]


def parse_complex(value: Any, field: str) -> complex:
    """A number, or an [re, im] pair."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        return complex(value[0], value[1])
    raise SpecFileError(f"Expected a number or [re, im] pair, got {value!r}", field=field)


def parse_complex_vector(data: Any, field: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise SpecFileError("Expected a nonempty list", field=field)
    return np.array([parse_complex(v, f"{field}[{i}]") for i, v in enumerate(data)], dtype=complex)


def parse_complex_matrix(data: Any, field: str) -> np.ndarray:
    """Row-major nested list of complex entries."""
    if not isinstance(data, list) or not data:
        raise SpecFileError("Expected a nonempty list of rows", field=field)
    rows = [parse_complex_vector(row, f"{field}[{i}]") for i, row in enumerate(data)]
    if len({len(r) for r in rows}) != 1:
        raise SpecFileError("Matrix rows have different lengths", field=field)
    return np.stack(rows)


def _parse_dims(data: Any, field: str) -> List[int]:
    if isinstance(data, int) and not isinstance(data, bool):
        data = [data]
    if not isinstance(data, list) or not data or not all(isinstance(d, int) and d >= 1 for d in data):
        raise SpecFileError(f"Expected positive integer dimensions, got {data!r}", field=field)
    return list(data)


def _parse_layout(doc: Dict[str, Any], dims_key: str = "dims", labels_key: str = "labels") -> SubsystemLayout:
    dims = _parse_dims(_require(doc, dims_key), dims_key)
    labels = doc.get(labels_key) or list(DEFAULT_LABELS[:len(dims)])
    if not isinstance(labels, list) or len(labels) != len(dims) or not all(isinstance(l, str) for l in labels):
        raise SpecFileError(f"Expected {len(dims)} string labels", field=labels_key)
    try:
        return SubsystemLayout(tuple(dims), tuple(labels))
    except QmacError as e:
        raise SpecFileError(str(e), field=labels_key) from e


def builtin_channel(name: str, params: Dict[str, Any]) -> QuantumChannel:
    """erasure(d), phase_flip(p) or dephasing(p)."""
    if name not in BUILTIN_CHANNELS:
        raise SpecFileError(f"Unknown builtin channel '{name}' (choose from {', '.join(BUILTIN_CHANNELS)})",
                            field="builtin")
    try:
        if name == "erasure":
            return erasure_mac(int(_require(params, "d", "params.")))
        p = float(_require(params, "p", "params."))
        return collective_phase_flip(p) if name == "phase_flip" else dephasing(p)
    except (TypeError, ValueError) as e:
        if isinstance(e, QmacError):
            raise
        raise SpecFileError(f"Invalid parameter for '{name}': {e}", field="params") from e


def channel_from_spec(doc: Dict[str, Any], tol: float = KRAUS_TOL) -> QuantumChannel:
    """
    Build a channel from a parsed spec document

    Either ``{"builtin": name, "params": {...}}`` or
    ``{"name": str, "din": [ints], "dout": [ints], "kraus": [matrix, ...]}``
    with complex entries as [re, im] pairs.
    """
    if not isinstance(doc, dict):
        raise SpecFileError("Channel spec must be a JSON object")
    if "builtin" in doc:
        params = doc.get("params") or {}
        if not isinstance(params, dict):
            raise SpecFileError("Expected an object", field="params")
        return builtin_channel(str(doc["builtin"]), params)

    din = _parse_dims(_require(doc, "din"), "din")
    dout = _parse_dims(_require(doc, "dout"), "dout")
    kraus_data = _require(doc, "kraus")
    if not isinstance(kraus_data, list) or not kraus_data:
        raise SpecFileError("Expected a nonempty list of Kraus operators", field="kraus")
    kraus = [parse_complex_matrix(k, f"kraus[{i}]") for i, k in enumerate(kraus_data)]
    name = str(doc.get("name", "custom"))
    try:
        return channel_from_kraus(kraus, din, dout, tol=tol, name=name)
    except SpecFileError:
        raise
    except QmacError as e:
        raise SpecFileError(str(e), field="kraus") from e


def load_channel(path: PathLike, tol: float = KRAUS_TOL) -> QuantumChannel:
    channel = channel_from_spec(load_json(path), tol)
    logger.info(f"Loaded channel '{channel.name}' from {path} ({channel.din} -> {channel.dout})")
    return channel


def state_from_spec(doc: Dict[str, Any]) -> Union[DensityMatrix, CqqState]:
    """
    Parse a state document

    ``{"dims", "labels"?, "matrix"}`` gives a density matrix,
    ``{"dims", "labels"?, "vector"}`` a pure state (as its density matrix) and
    ``{"dims", "labels"?, "probs", "blocks", "label"?}`` a cqq state whose
    blocks live on the given layout.
    """
    layout = _parse_layout(doc)
    try:
        if "blocks" in doc:
            blocks_data = _require(doc, "blocks")
            if not isinstance(blocks_data, list) or not blocks_data:
                raise SpecFileError("Expected a nonempty list of blocks", field="blocks")
            probs = _require(doc, "probs")
            blocks = [density_from_matrix(parse_complex_matrix(b, f"blocks[{i}]"), layout)
                      for i, b in enumerate(blocks_data)]
            return CqqState(np.asarray(probs, dtype=float), tuple(blocks), str(doc.get("label", "X")))
        if "vector" in doc:
            return pure_state(parse_complex_vector(doc["vector"], "vector"), layout).density()
        return density_from_matrix(parse_complex_matrix(_require(doc, "matrix"), "matrix"), layout)
    except SpecFileError:
        raise
    except (QmacError, TypeError, ValueError) as e:
        raise SpecFileError(f"Invalid state: {e}") from e


def load_state(path: PathLike) -> Union[DensityMatrix, CqqState]:
    return state_from_spec(load_json(path))


def load_region(path: PathLike) -> RateRegion:
    try:
        return RateRegion.from_dict(load_json(path))
    except SpecFileError:
        raise
    except QmacError as e:
        raise SpecFileError(f"Invalid region file {path}: {e}") from e


# -- output ------------------------------------------------------------------------

def write_atomic(path: PathLike, data: Union[str, bytes]) -> Path:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info(f"Wrote {path}")
    return path


def dumps_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path: PathLike, obj: Any) -> Path:
    return write_atomic(path, dumps_json(obj))


def sha256_file(path: PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def manifest_path(out: PathLike) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def write_manifest(out: PathLike, command: str, config: Dict[str, Any], seed: Optional[int],
                   outputs: Sequence[PathLike], started: float) -> Path:
    """
    Write ``<out>.manifest.json`` describing one command run

    Fields: command, config echo, seed, tool version, wall time in seconds
    and the sha256 of every output file.
    """
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "wall_time": round(time.perf_counter() - started, 6),
        "outputs": {Path(p).name: sha256_file(p) for p in outputs},
    }
    return write_json(manifest_path(out), manifest)

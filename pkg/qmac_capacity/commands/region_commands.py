"""
Region computation command
"""

import io
import logging
from pathlib import Path
import time
from typing import Any, Dict, Optional

from ..errors import ValidationError
from ..quantum.channels import QuantumChannel
from ..regions.optimizer import OptimizerConfig, regularized_region
from .base import BaseCommand
from .files import dumps_json, write_atomic, write_json, write_manifest

logger = logging.getLogger(__name__)


def frontier_csv_path(out: Path) -> Path:
    return out.with_suffix(".csv")


class RegionCommand(BaseCommand):
    name: str = "region"
    description: str = (
        "Computes an inner approximation of the cq or qq capacity region of a "
        "two-sender channel, optionally regularized over k channel uses."
    )

    def _run(self, kind: str, channel: QuantumChannel, out: Optional[Path] = None, k: int = 1,
             config: Optional[OptimizerConfig] = None,
             float_format: str = "%.12f") -> Dict[str, Any]:
        """
        Compute a region and write its JSON, frontier CSV and manifest

        Args:
            kind: "cq" or "qq"
            channel: Channel to evaluate
            out: Region JSON path; the CSV goes next to it with suffix .csv.
                Without a path the region JSON is returned as ``document``
                and nothing is written
            k: Regularization level
            config: Optimizer configuration
            float_format: CSV float format

        Returns:
            Result dictionary with output paths and summary numbers
        """
        if kind not in ("cq", "qq"):
            raise ValidationError(f"Unknown region kind '{kind}'")
        started = time.perf_counter()
        config = config or OptimizerConfig()

        logger.info(f"Computing {kind} region of '{channel.name}' at k={k}")
        region = regularized_region(channel, k, config, kind=kind)
        if out is None:
            return {
                "document": dumps_json(region.to_dict()),
                "frontier_points": len(region.frontier),
                "max_sum_rate": region.max_sum_rate(),
            }

        out = Path(out)
        write_json(out, region.to_dict())
        buffer = io.StringIO()
        region.frontier_frame().to_csv(buffer, index=False, float_format=float_format, lineterminator="\n")
        csv_path = write_atomic(frontier_csv_path(out), buffer.getvalue())

        manifest = write_manifest(
            out, self.name,
            {"kind": kind, "channel": channel.name, "k": k, "optimizer": config.to_dict()},
            config.seed, [out, csv_path], started,
        )
        return {
            "region": str(out),
            "frontier_csv": str(csv_path),
            "manifest": str(manifest),
            "frontier_points": len(region.frontier),
            "max_sum_rate": region.max_sum_rate(),
        }

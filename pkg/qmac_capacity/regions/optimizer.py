"""
Inner approximations of the cq and qq capacity regions.

For each weight w on a uniform grid the scalarization w * rate1 + (1 - w) * rate2
is maximized over parameterized inputs with Nelder-Mead local searches from
seeded random restarts. Results are best-found values, not certified optima.
"""

from dataclasses import asdict, dataclass
import itertools
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from ..errors import DimensionCapError, ValidationError
from ..quantum.channels import QuantumChannel, tensor_power
from .evaluation import (
    ChannelFrame,
    CqEvaluation,
    QqEvaluation,
    evaluate_cq_arrays,
    evaluate_qq_arrays,
)
from .geometry import Pentagon, RateRegion, region_contains

logger = logging.getLogger(__name__)

# weight of the balanced scalarization added to every objective;
# breaks ties at the extreme weights toward the better second coordinate
TIE_BREAK = 1e-4
PROBABILITY_FLOOR = 1e-12
MAX_LIFTED_COMBINATIONS = 256


@dataclass
class OptimizerConfig:
    restarts: int = 20
    max_iters: int = 4000
    simplex_tolerance: float = 1e-7
    weights: int = 21
    ensemble_size: Optional[int] = None
    seed: int = 7
    dimension_cap: int = 64
    regularized_restarts: int = 2

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.simplex_tolerance <= 0:
            raise ValidationError(f"simplex_tolerance must be positive, got {self.simplex_tolerance}")
        if self.weights < 2:
            raise ValidationError(f"weights must be >= 2, got {self.weights}")
        if self.ensemble_size is not None and self.ensemble_size < 1:
            raise ValidationError(f"ensemble_size must be >= 1, got {self.ensemble_size}")
        if self.dimension_cap < 1:
            raise ValidationError(f"dimension_cap must be >= 1, got {self.dimension_cap}")
        if self.regularized_restarts < 0:
            raise ValidationError(f"regularized_restarts must be >= 0, got {self.regularized_restarts}")

    @classmethod
    def from_settings(cls, settings, **overrides) -> "OptimizerConfig":
        """Build from the ``optimizer`` and ``numerics`` sections; ``None`` overrides are ignored."""
        section = settings.optimizer
        values = {
            "restarts": int(section.get("restarts", 20)),
            "max_iters": int(section.get("max_iters", 4000)),
            "simplex_tolerance": float(section.get("simplex_tolerance", 1e-7)),
            "weights": int(section.get("weights", 21)),
            "ensemble_size": section.get("ensemble_size"),
            "seed": int(section.get("seed", 7)),
            "dimension_cap": int(settings.numerics.get("max_dimension", 64)),
            "regularized_restarts": int(section.get("regularized_restarts", 2)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def weight_grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.weights)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def default_ensemble_size(ch: QuantumChannel) -> int:
    """min{|A'|, |C|}^2 + 1."""
    d_alice = ch.input_layout.dim_of(ch.sender_labels(0))
    return min(d_alice, ch.dout) ** 2 + 1


def _unit_rows(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    c = re + 1j * im
    norms = np.linalg.norm(c, axis=-1, keepdims=True)
    fallback = np.zeros_like(c)
    fallback[..., 0] = 1.0
    return np.where(norms > 1e-12, c / np.where(norms > 1e-12, norms, 1.0), fallback)


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - np.max(z))
    return e / e.sum()


class CqParameterization:
    """Real vector <-> (probs, Alice's states, reference Psi on B (x) Bob's input)."""

    def __init__(self, frame: ChannelFrame, n_states: int):
        self.n = n_states
        self.da = frame.alice.total_dim
        self.db = frame.bob.total_dim
        self.dr = self.db

    @property
    def size(self) -> int:
        return self.n + 2 * self.n * self.da + 2 * self.dr * self.db

    def decode(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        n, da = self.n, self.da
        probs = _softmax(x[:n])
        block = x[n:n + 2 * n * da].reshape(n, 2, da)
        states = _unit_rows(block[:, 0], block[:, 1])
        ref = x[n + 2 * n * da:].reshape(2, self.dr * self.db)
        reference = _unit_rows(ref[0], ref[1]).reshape(self.dr, self.db)
        return probs, states, reference

    def encode(self, probs: np.ndarray, states: np.ndarray, reference: np.ndarray) -> np.ndarray:
        probs, states = _fit_ensemble(probs, states, self.n)
        logits = np.log(np.maximum(probs, PROBABILITY_FLOOR))
        block = np.stack([states.real, states.imag], axis=1).reshape(-1)
        ref = reference.reshape(-1)
        return np.concatenate([logits, block, ref.real, ref.imag])

    def random(self, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(self.size)


class QqParameterization:
    """Real vector <-> (psi_1 on A (x) Alice's input, psi_2 on B (x) Bob's input), references as large as the inputs."""

    def __init__(self, frame: ChannelFrame):
        self.da = frame.alice.total_dim
        self.db = frame.bob.total_dim

    @property
    def size(self) -> int:
        return 2 * self.da ** 2 + 2 * self.db ** 2

    def decode(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        na = self.da ** 2
        a = x[:2 * na].reshape(2, na)
        b = x[2 * na:].reshape(2, self.db ** 2)
        psi1 = _unit_rows(a[0], a[1]).reshape(self.da, self.da)
        psi2 = _unit_rows(b[0], b[1]).reshape(self.db, self.db)
        return psi1, psi2

    def encode(self, psi1: np.ndarray, psi2: np.ndarray) -> np.ndarray:
        a, b = psi1.reshape(-1), psi2.reshape(-1)
        return np.concatenate([a.real, a.imag, b.real, b.imag])

    def random(self, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(self.size)


def _fit_ensemble(probs: np.ndarray, states: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Keep the ``n`` most likely states (padding with unused basis states) and renormalize."""
    order = np.argsort(-probs, kind="stable")[:n]
    probs, states = probs[order], states[order]
    if len(probs) < n:
        pad = n - len(probs)
        filler = np.zeros((pad, states.shape[1]), dtype=complex)
        filler[:, 0] = 1.0
        probs = np.concatenate([probs, np.zeros(pad)])
        states = np.concatenate([states, filler])
    return probs / probs.sum(), states


@dataclass
class WeightResult:
    weight: float
    value: float
    x: np.ndarray
    evaluation: Any


def _sweep(objective: Callable[[np.ndarray, float], float], evaluate: Callable[[np.ndarray], Any],
           random_start: Callable[[np.random.Generator], np.ndarray], cfg: OptimizerConfig,
           restarts: int, warm_starts: Optional[Sequence[Sequence[np.ndarray]]] = None) -> List[WeightResult]:
    options = {"maxiter": cfg.max_iters, "xatol": cfg.simplex_tolerance,
               "fatol": cfg.simplex_tolerance, "adaptive": True}
    results: List[WeightResult] = []
    for w_idx, w in enumerate(cfg.weight_grid()):
        starts: List[np.ndarray] = []
        if warm_starts is not None:
            starts.extend(warm_starts[w_idx])
        if results:
            starts.append(results[-1].x)
        starts.extend(random_start(np.random.default_rng([cfg.seed, w_idx, r])) for r in range(restarts))
        if not starts:
            raise ValidationError("Optimizer has no starting points")

        best_x, best_value = None, -np.inf
        for x0 in starts:
            res = minimize(lambda x: -objective(x, w), x0, method="Nelder-Mead", options=options)
            if -res.fun > best_value + 1e-12:
                best_x, best_value = np.asarray(res.x), float(-res.fun)
        results.append(WeightResult(float(w), best_value, best_x, evaluate(best_x)))
        logger.debug(f"weight {w:.2f}: objective {best_value:.6f} from {len(starts)} starts")
    return results


def _check_cap(ch: QuantumChannel, cfg: OptimizerConfig) -> None:
    if ch.din > cfg.dimension_cap:
        raise DimensionCapError(f"Channel input dimension {ch.din} exceeds cap {cfg.dimension_cap}")


# -- cq ------------------------------------------------------------------------------

def _cq_sweep(ch: QuantumChannel, cfg: OptimizerConfig, restarts: int,
              warm: Optional[Callable[[CqParameterization], List[List[np.ndarray]]]] = None
              ) -> Tuple[CqParameterization, List[WeightResult]]:
    frame = ChannelFrame(ch)
    n_states = cfg.ensemble_size or default_ensemble_size(ch)
    codec = CqParameterization(frame, n_states)

    def evaluate(x: np.ndarray) -> CqEvaluation:
        return evaluate_cq_arrays(frame, *codec.decode(x))

    def objective(x: np.ndarray, w: float) -> float:
        rect = evaluate(x).rectangle
        return rect.support(w) + TIE_BREAK * rect.support(0.5)

    logger.info(f"cq sweep on '{ch.name}': {cfg.weights} weights, {restarts} restarts, "
                f"{n_states} ensemble states, {codec.size} parameters")
    warm_starts = warm(codec) if warm else None
    return codec, _sweep(objective, evaluate, codec.random, cfg, restarts, warm_starts)


def _cq_metadata(ch: QuantumChannel, cfg: OptimizerConfig, codec: CqParameterization,
                 results: Sequence[WeightResult], rectangles: Sequence[Pentagon]) -> Dict[str, Any]:
    pentagons = [r.evaluation.pentagon.normalized() for r in results]
    improves = any(not region_contains(rectangles, v) for p in pentagons for v in p.vertices())
    if improves:
        logger.warning(f"cq pentagons on '{ch.name}' reach beyond the rectangle union")
    return {
        "channel": ch.name,
        "kind": "cq",
        "seed": cfg.seed,
        "optimizer": cfg.to_dict(),
        "ensemble_size": codec.n,
        "weights": [r.weight for r in results],
        "objective": [r.value for r in results],
        "raw": [r.evaluation.to_dict() for r in results],
        "pentagons": [p.to_dict() for p in pentagons],
        "pentagon_improves": bool(improves),
    }


def optimize_cq_region(ch: QuantumChannel, cfg: Optional[OptimizerConfig] = None) -> RateRegion:
    """
    Union of cq rectangles (I(X;C), I_c(B>CX)) over optimized inputs

    The matching pentagons (I(X;BC), I_c(B>CX), I(X;C) + I_c(B>CX)) are
    kept in the metadata along with a flag telling whether any of them
    leaves the rectangle union.
    """
    cfg = cfg or OptimizerConfig()
    _check_cap(ch, cfg)
    codec, results = _cq_sweep(ch, cfg, cfg.restarts)
    rectangles = [r.evaluation.rectangle.normalized() for r in results]
    region = RateRegion.from_generators(rectangles, 1, _cq_metadata(ch, cfg, codec, results, rectangles))
    logger.info(f"cq region on '{ch.name}': {len(region.frontier)} frontier points")
    return region


# -- qq ------------------------------------------------------------------------------

def _qq_sweep(ch: QuantumChannel, cfg: OptimizerConfig, restarts: int,
              warm: Optional[Callable[[QqParameterization], List[List[np.ndarray]]]] = None
              ) -> Tuple[QqParameterization, List[WeightResult]]:
    frame = ChannelFrame(ch)
    codec = QqParameterization(frame)

    def evaluate(x: np.ndarray) -> QqEvaluation:
        return evaluate_qq_arrays(frame, *codec.decode(x))

    def objective(x: np.ndarray, w: float) -> float:
        pent = evaluate(x).pentagon
        return pent.support(w) + TIE_BREAK * pent.support(0.5)

    logger.info(f"qq sweep on '{ch.name}': {cfg.weights} weights, {restarts} restarts, "
                f"{codec.size} parameters")
    warm_starts = warm(codec) if warm else None
    return codec, _sweep(objective, evaluate, codec.random, cfg, restarts, warm_starts)


def _qq_metadata(ch: QuantumChannel, cfg: OptimizerConfig, results: Sequence[WeightResult]) -> Dict[str, Any]:
    return {
        "channel": ch.name,
        "kind": "qq",
        "seed": cfg.seed,
        "optimizer": cfg.to_dict(),
        "weights": [r.weight for r in results],
        "objective": [r.value for r in results],
        "raw": [r.evaluation.pentagon.to_dict() for r in results],
    }


def optimize_qq_region(ch: QuantumChannel, cfg: Optional[OptimizerConfig] = None) -> RateRegion:
    """Union of pentagons (I_c(A>BC), I_c(B>AC), I_c(AB>C)) over optimized pure inputs."""
    cfg = cfg or OptimizerConfig()
    _check_cap(ch, cfg)
    _, results = _qq_sweep(ch, cfg, cfg.restarts)
    pentagons = [r.evaluation.pentagon.normalized() for r in results]
    region = RateRegion.from_generators(pentagons, 1, _qq_metadata(ch, cfg, results))
    logger.info(f"qq region on '{ch.name}': max sum rate {region.max_sum_rate():.6f}")
    return region


# -- regularization --------------------------------------------------------------------

def _kron_rows(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Row-wise tensor product of (n_j, d_j) arrays -> (prod n_j, prod d_j)."""
    out = mats[0]
    for m in mats[1:]:
        out = np.einsum("ai,bj->abij", out, m).reshape(out.shape[0] * m.shape[0], -1)
    return out


def _combinations(n_weights: int, k: int) -> List[Tuple[int, ...]]:
    combos = list(itertools.combinations_with_replacement(range(n_weights), k))
    if len(combos) > MAX_LIFTED_COMBINATIONS:
        return [(i,) * k for i in range(n_weights)]
    return combos


def _lift_cq(results: Sequence[WeightResult], codec: CqParameterization, combo: Sequence[int]):
    parts = [codec.decode(results[i].x) for i in combo]
    probs = _kron_rows([p[0].reshape(-1, 1) for p in parts]).reshape(-1).real
    states = _kron_rows([p[1] for p in parts])
    reference = _kron_rows([p[2] for p in parts])
    return probs, states, reference


def _lift_qq(results: Sequence[WeightResult], codec: QqParameterization, combo: Sequence[int]):
    parts = [codec.decode(results[i].x) for i in combo]
    return _kron_rows([p[0] for p in parts]), _kron_rows([p[1] for p in parts])


def regularized_region(ch: QuantumChannel, k: int, cfg: Optional[OptimizerConfig] = None,
                       kind: str = "cq") -> RateRegion:
    """
    (1/k) times the single-letter region of the k-fold tensor power

    The k-letter search starts from tensor products of the single-letter
    optima, and those product inputs (including products of optima at
    different weights, i.e. time sharing) stay in the region as
    generators. Product ensembles are evaluated directly and may exceed
    the configured ensemble size.
    """
    cfg = cfg or OptimizerConfig()
    if kind not in ("cq", "qq"):
        raise ValidationError(f"Unknown region kind '{kind}' (expected 'cq' or 'qq')")
    if k < 1:
        raise ValidationError(f"Regularization level must be >= 1, got {k}")
    if k == 1:
        return optimize_cq_region(ch, cfg) if kind == "cq" else optimize_qq_region(ch, cfg)

    _check_cap(ch, cfg)
    powered = tensor_power(ch, k, cfg.dimension_cap)
    frame = ChannelFrame(powered)
    combos = _combinations(cfg.weights, k)

    if kind == "cq":
        base_codec, base = _cq_sweep(ch, cfg, cfg.restarts)
        lifted = [_lift_cq(base, base_codec, c) for c in combos]
        lifted_gens = [evaluate_cq_arrays(frame, *arrays).rectangle for arrays in lifted]

        def warm(codec: CqParameterization) -> List[List[np.ndarray]]:
            return [[codec.encode(*_lift_cq(base, base_codec, (i,) * k))] for i in range(cfg.weights)]

        _, results = _cq_sweep(powered, cfg, cfg.regularized_restarts, warm)
        searched = [r.evaluation.rectangle for r in results]
    else:
        base_codec, base = _qq_sweep(ch, cfg, cfg.restarts)
        lifted = [_lift_qq(base, base_codec, c) for c in combos]
        lifted_gens = [evaluate_qq_arrays(frame, *arrays).pentagon for arrays in lifted]

        def warm(codec: QqParameterization) -> List[List[np.ndarray]]:
            return [[codec.encode(*_lift_qq(base, base_codec, (i,) * k))] for i in range(cfg.weights)]

        _, results = _qq_sweep(powered, cfg, cfg.regularized_restarts, warm)
        searched = [r.evaluation.pentagon for r in results]

    generators = [p.scaled(1.0 / k).normalized() for p in lifted_gens + searched]
    metadata = {
        "channel": ch.name,
        "kind": kind,
        "seed": cfg.seed,
        "optimizer": cfg.to_dict(),
        "k": k,
        "product_generators": len(lifted_gens),
        "searched_generators": len(searched),
        "weights": [r.weight for r in results],
        "objective": [r.value / k for r in results],
    }
    region = RateRegion.from_generators(generators, k, metadata)
    logger.info(f"{kind} region of '{ch.name}' at k={k}: {len(generators)} generators")
    return region

"""
Randomized property suite: distance-measure inequalities, the fidelity and
trace-distance lemmas used in the coding arguments, and entropic identities,
checked numerically on seeded random states, channels and measurements.

Every check draws one random instance and returns ``(lhs, rhs, details)``
asserting ``lhs <= rhs``; the excess ``lhs - rhs`` above the slack counts as
a violation. Violations are data, reported with the worst witness.
"""

from dataclasses import asdict, dataclass, field
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ValidationError
from .channels import apply, collective_phase_flip, random_channel, tensor_product
from .information import (
    binary_entropy,
    channel_coherent_information,
    coherent_information,
    conditional_coherent_information,
    entropy,
    fidelity,
    trace_distance,
)
from .linalg import SubsystemLayout, dagger, psd_sqrt
from .states import (
    DensityMatrix,
    PureState,
    purify,
    random_cqq,
    random_density,
    random_pure,
    random_unitary,
)

logger = logging.getLogger(__name__)

DEFAULT_SLACK = 1e-8

CheckResult = Tuple[float, float, Dict[str, Any]]


@dataclass
class PropertyReport:
    """Pass/fail tally for one named inequality."""

    name: str
    trials: int = 0
    violations: int = 0
    worst_violation: float = 0.0
    min_margin: float = float("inf")
    seed: int = 0
    slack: float = DEFAULT_SLACK
    witness: Optional[Dict[str, Any]] = None

    def record(self, lhs: float, rhs: float, witness: Dict[str, Any]) -> None:
        excess = lhs - rhs
        self.trials += 1
        self.min_margin = min(self.min_margin, -excess)
        if excess > self.slack:
            self.violations += 1
        if excess > self.worst_violation:
            self.worst_violation = float(excess)
            self.witness = witness

    def merge(self, other: "PropertyReport") -> "PropertyReport":
        """Combine two tallies of the same check (associative)."""
        if other.name != self.name:
            raise ValidationError(f"Cannot merge reports '{self.name}' and '{other.name}'")
        worse = self if self.worst_violation >= other.worst_violation else other
        return PropertyReport(
            name=self.name,
            trials=self.trials + other.trials,
            violations=self.violations + other.violations,
            worst_violation=max(self.worst_violation, other.worst_violation),
            min_margin=min(self.min_margin, other.min_margin),
            seed=min(self.seed, other.seed),
            slack=self.slack,
            witness=worse.witness,
        )

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if self.min_margin == float("inf"):
            data["min_margin"] = None
        return data


# -- random ingredients -------------------------------------------------------

def _random_effect(dim: int, rng: np.random.Generator, bias: float = 1.0) -> np.ndarray:
    """Random 0 <= Lambda <= 1; larger ``bias`` pushes the spectrum towards 1."""
    u = random_unitary(dim, rng)
    spectrum = 1.0 - rng.uniform(0.0, 1.0, dim) ** bias
    return (u * spectrum) @ dagger(u)


def _nearby(rho: DensityMatrix, rng: np.random.Generator, max_weight: float = 1.0) -> DensityMatrix:
    other = random_density(rho.dim, seed=rng, layout=rho.layout)
    t = rng.uniform(0.0, max_weight)
    return DensityMatrix((1 - t) * rho.matrix + t * other.matrix, rho.layout)


def _pair(dim: int, rng: np.random.Generator) -> Tuple[DensityMatrix, DensityMatrix]:
    rank_a = int(rng.integers(1, dim + 1))
    rho = random_density(dim, rank_a, seed=rng)
    if rng.uniform() < 0.5:
        return rho, _nearby(rho, rng)
    return rho, random_density(dim, int(rng.integers(1, dim + 1)), seed=rng)


# -- checks (lhs <= rhs) -------------------------------------------------------

def check_fidelity_trace_bounds(rng, dim) -> CheckResult:
    rho, sigma = _pair(dim, rng)
    f, t = fidelity(rho, sigma), trace_distance(rho, sigma)
    excess = max(
        (1 - np.sqrt(f)) - t / 2,
        t / 2 - np.sqrt(max(0.0, 1 - f)),
        (1 - t) - f,
        f - (1 - t ** 2 / 4),
    )
    return float(excess), 0.0, {"F": f, "T": t}


def check_fidelity_trace_implications(rng, dim) -> CheckResult:
    rho, sigma = _pair(dim, rng)
    f, t = fidelity(rho, sigma), trace_distance(rho, sigma)
    u = rng.uniform(0.0, 1.0)
    excess = 0.0
    eps = min(1.0, (1 - f) * (1 + u) + 1e-12)
    if f > 1 - eps:
        excess = max(excess, t - 2 * np.sqrt(eps))
    eps = min(1.0, t * (1 + u))
    if t <= eps:
        excess = max(excess, (1 - eps) - f)
    return float(excess), 0.0, {"F": f, "T": t, "u": u}


def _amplitude_matrix(psi: PureState, ref_dim: int) -> np.ndarray:
    return psi.amplitudes.reshape(ref_dim, -1)


def check_uhlmann(rng, dim) -> CheckResult:
    rho, sigma = _pair(dim, rng)
    f = fidelity(rho, sigma)
    m = _amplitude_matrix(purify(rho), dim)
    n = random_unitary(dim, rng) @ _amplitude_matrix(purify(sigma), dim)
    overlap = abs(np.vdot(m.reshape(-1), n.reshape(-1))) ** 2
    attained = float(np.sum(np.linalg.svd(n @ dagger(m), compute_uv=False)) ** 2)
    excess = max(overlap - f, abs(attained - f))
    return float(excess), 0.0, {"F": f, "overlap": overlap, "max_overlap": attained}


def check_fidelity_monotonicity(rng, dim) -> CheckResult:
    rho, sigma = _pair(dim, rng)
    ch = random_channel(dim, int(rng.integers(1, dim + 2)), int(rng.integers(1, dim + 2)) + dim, seed=rng)
    before = fidelity(rho, sigma)
    after = fidelity(apply(ch, rho), apply(ch, sigma))
    return before, after, {"F_in": before, "F_out": after}


def check_trace_distance_monotonicity(rng, dim) -> CheckResult:
    rho, sigma = _pair(dim, rng)
    ch = random_channel(dim, int(rng.integers(1, dim + 2)), int(rng.integers(1, dim + 2)) + dim, seed=rng)
    before = trace_distance(rho, sigma)
    after = trace_distance(apply(ch, rho), apply(ch, sigma))
    return after, before, {"T_in": before, "T_out": after}


def check_fidelity_multiplicativity(rng, dim) -> CheckResult:
    other = dim + 1
    rho1 = random_density(dim, seed=rng)
    sigma1 = random_density(dim, seed=rng)
    rho2 = random_density(other, seed=rng)
    sigma2 = random_density(other, seed=rng)
    joint = fidelity(rho1.tensor(rho2.relabeled({"A": "B"})), sigma1.tensor(sigma2.relabeled({"A": "B"})))
    product = fidelity(rho1, sigma1) * fidelity(rho2, sigma2)
    return abs(joint - product), 0.0, {"joint": joint, "product": product}


def check_fidelity_triangle(rng, dim) -> CheckResult:
    rho1 = random_density(dim, seed=rng)
    rho2 = _nearby(rho1, rng, 0.3)
    rho3 = _nearby(rho2, rng, 0.3)
    f13 = fidelity(rho1, rho3)
    bound = 1 - 2 * np.sqrt(max(0.0, 1 - fidelity(rho1, rho2))) - 2 * np.sqrt(max(0.0, 1 - fidelity(rho2, rho3)))
    return float(bound), f13, {"F13": f13, "bound": float(bound)}


def check_measurement_stability(rng, dim) -> CheckResult:
    rho, sigma = _pair(dim, rng)
    effect = _random_effect(dim, rng)
    p_rho = float(np.real(np.trace(effect @ rho.matrix)))
    p_sigma = float(np.real(np.trace(effect @ sigma.matrix)))
    t = trace_distance(rho, sigma)
    return p_rho - t, p_sigma, {"tr_L_rho": p_rho, "tr_L_sigma": p_sigma, "T": t}


def check_transitivity(rng, dim) -> CheckResult:
    other = 2 if dim > 2 else 3
    phi = random_pure(dim, seed=rng)
    rho_b = random_density(other, seed=rng, layout=SubsystemLayout.single(other, "B"))
    junk = random_density(dim * other, seed=rng, layout=SubsystemLayout((dim, other), ("A", "B")))
    eps = rng.uniform(0.0, 0.5)
    product = phi.density().tensor(rho_b)
    omega = DensityMatrix((1 - eps) * product.matrix + eps * junk.matrix, product.layout)
    omega_a, omega_b = omega.reduced(["A"]), omega.reduced(["B"])
    eps_actual = max(0.0, 1 - float(np.real(np.vdot(phi.amplitudes, omega_a.matrix @ phi.amplitudes))))
    rho = _nearby(omega_b, rng, 0.5)
    lhs = 1 - trace_distance(rho, omega_b) - 3 * eps_actual
    rhs = fidelity(phi.density().tensor(rho), omega)
    return float(lhs), rhs, {"eps": eps_actual, "F": rhs}


def check_continuity(rng, dim) -> CheckResult:
    other = 2
    layout = SubsystemLayout((dim, other), ("Q", "R"))
    eps = rng.uniform(1e-3, 0.5)
    if rng.uniform() < 0.25:
        # near-saturating direction: pure rho, sigma mixes in an orthogonal pure state
        psi = random_pure(dim * other, seed=rng, layout=layout)
        perp = random_pure(dim * other, seed=rng).amplitudes
        perp = perp - np.vdot(psi.amplitudes, perp) * psi.amplitudes
        perp = perp / np.linalg.norm(perp)
        rho = psi.density()
        mix = 0.5 * eps
        sigma = DensityMatrix((1 - mix) * rho.matrix + mix * np.outer(perp, perp.conj()), layout)
    else:
        rho = random_density(dim * other, int(rng.integers(1, dim * other + 1)), seed=rng, layout=layout)
        tau = random_density(dim * other, seed=rng, layout=layout)
        gap = trace_distance(rho, tau)
        t = min(1.0, eps / gap) if gap > 0 else 0.0
        sigma = DensityMatrix((1 - t) * rho.matrix + t * tau.matrix, layout)
    t_actual = trace_distance(rho, sigma)
    delta = abs(coherent_information(rho, "Q", "R") - coherent_information(sigma, "Q", "R"))
    bound = 2 * binary_entropy(eps) + 4 * np.log2(dim) * eps
    return delta, float(bound), {"eps": eps, "T": t_actual, "delta": delta}


def check_gentle_measurement(rng, dim) -> CheckResult:
    rho = random_density(dim, int(rng.integers(1, dim + 1)), seed=rng)
    effect = _random_effect(dim, rng, bias=float(rng.uniform(0.05, 1.0)))
    eps = max(0.0, 1 - float(np.real(np.trace(rho.matrix @ effect))))
    root = psd_sqrt(effect)
    disturbed = root @ rho.matrix @ root
    lhs = float(np.sum(np.abs(np.linalg.eigvalsh(disturbed - rho.matrix))))
    return lhs, float(np.sqrt(8 * eps)), {"eps": eps, "disturbance": lhs}


def check_entropy_unitary_invariance(rng, dim) -> CheckResult:
    rho = random_density(dim, int(rng.integers(1, dim + 1)), seed=rng)
    u = random_unitary(dim, rng)
    rotated = DensityMatrix(u @ rho.matrix @ dagger(u), rho.layout)
    return abs(entropy(rotated) - entropy(rho)), 0.0, {}


def _random_bipartite(rng, dim) -> DensityMatrix:
    other = 2
    layout = SubsystemLayout((dim, other), ("A", "B"))
    return random_density(dim * other, int(rng.integers(1, dim * other + 1)), seed=rng, layout=layout)


def check_subadditivity(rng, dim) -> CheckResult:
    rho = _random_bipartite(rng, dim)
    h_a, h_b = entropy(rho.reduced(["A"])), entropy(rho.reduced(["B"]))
    return entropy(rho), h_a + h_b, {}


def check_araki_lieb(rng, dim) -> CheckResult:
    rho = _random_bipartite(rng, dim)
    h_a, h_b = entropy(rho.reduced(["A"])), entropy(rho.reduced(["B"]))
    return abs(h_a - h_b), entropy(rho), {}


def check_classical_conditioning(rng, dim) -> CheckResult:
    layout = SubsystemLayout((dim, 2), ("B", "C"))
    cqq = random_cqq(int(rng.integers(2, 5)), layout, seed=rng)
    averaged = DensityMatrix(sum(p * b.matrix for p, b in zip(cqq.probs, cqq.blocks)), layout)
    unconditioned = coherent_information(averaged, "B", "C")
    conditioned = conditional_coherent_information(cqq, "B", "C")
    return unconditioned, conditioned, {}


def check_purification_independence(rng, dim) -> CheckResult:
    rho = random_density(dim, seed=rng, layout=SubsystemLayout.single(dim, "A'"))
    ch = random_channel(dim, dim, 2, seed=rng, input_label="A'", output_label="C")
    canonical = purify(rho, "R")
    u = random_unitary(dim, rng)
    rotated = PureState((np.kron(u, np.eye(dim)) @ canonical.amplitudes), canonical.layout)
    first = channel_coherent_information(rho, ch)
    second = channel_coherent_information(rho, ch, purification=rotated)
    return abs(first - second), 0.0, {"canonical": first, "rotated": second}


def check_coherent_information_additivity(rng, dim) -> CheckResult:
    ch1 = random_channel(dim, dim, 2, seed=rng, input_label="A'", output_label="C")
    ch2 = random_channel(2, 2, 2, seed=rng, input_label="A'", output_label="C")
    rho1 = random_density(dim, seed=rng, layout=ch1.input_layout)
    rho2 = random_density(2, seed=rng, layout=ch2.input_layout)
    joint_ch = tensor_product(ch1, ch2)
    joint = DensityMatrix(np.kron(rho1.matrix, rho2.matrix), joint_ch.input_layout)
    total = channel_coherent_information(joint, joint_ch)
    parts = channel_coherent_information(rho1, ch1) + channel_coherent_information(rho2, ch2)
    return abs(total - parts), 0.0, {"joint": total, "sum": parts}


def check_degradable_concavity(rng, dim) -> CheckResult:
    p = (0.1, 0.3)[int(rng.integers(0, 2))]
    ch = collective_phase_flip(p)
    rho0 = random_density(4, int(rng.integers(1, 5)), seed=rng, layout=ch.input_layout)
    rho1 = random_density(4, int(rng.integers(1, 5)), seed=rng, layout=ch.input_layout)
    lam = rng.uniform()
    mixed = DensityMatrix(lam * rho0.matrix + (1 - lam) * rho1.matrix, ch.input_layout)
    chord = lam * channel_coherent_information(rho0, ch) + (1 - lam) * channel_coherent_information(rho1, ch)
    value = channel_coherent_information(mixed, ch)
    return chord, value, {"p": p, "lambda": lam}


CHECKS: Dict[str, Tuple[Callable[[np.random.Generator, int], CheckResult], Optional[float]]] = {
    "fidelity_trace_bounds": (check_fidelity_trace_bounds, None),
    "fidelity_trace_implications": (check_fidelity_trace_implications, None),
    "uhlmann": (check_uhlmann, None),
    "fidelity_monotonicity": (check_fidelity_monotonicity, None),
    "trace_distance_monotonicity": (check_trace_distance_monotonicity, None),
    "fidelity_multiplicativity": (check_fidelity_multiplicativity, 1e-10),
    "fidelity_triangle": (check_fidelity_triangle, None),
    "measurement_stability": (check_measurement_stability, None),
    "transitivity": (check_transitivity, None),
    "coherent_information_continuity": (check_continuity, None),
    "gentle_measurement": (check_gentle_measurement, None),
    "entropy_unitary_invariance": (check_entropy_unitary_invariance, 1e-9),
    "subadditivity": (check_subadditivity, 1e-9),
    "araki_lieb": (check_araki_lieb, 1e-9),
    "classical_conditioning": (check_classical_conditioning, 1e-9),
    "purification_independence": (check_purification_independence, 1e-9),
    "coherent_information_additivity": (check_coherent_information_additivity, 1e-9),
    "degradable_concavity": (check_degradable_concavity, 1e-9),
}


def run_check(name: str, trials: int, dims: Sequence[int], seed: int,
              slack: float = DEFAULT_SLACK, start: int = 0) -> PropertyReport:
    """Run trials ``start .. start + trials - 1`` of one named check."""
    try:
        check, own_slack = CHECKS[name]
    except KeyError:
        raise ValidationError(f"Unknown property check '{name}'") from None
    position = list(CHECKS).index(name)
    report = PropertyReport(name=name, seed=seed, slack=min(slack, own_slack) if own_slack else slack)
    for trial in range(start, start + trials):
        dim = int(dims[trial % len(dims)])
        rng = np.random.default_rng([seed + trial, position])
        lhs, rhs, details = check(rng, dim)
        report.record(float(lhs), float(rhs), {"trial": trial, "dim": dim, "lhs": float(lhs),
                                               "rhs": float(rhs), **details})
    return report


def run_property_suite(trials: int = 1000, dims: Sequence[int] = (2, 3, 4), seed: int = 42,
                       slack: float = DEFAULT_SLACK,
                       checks: Optional[Sequence[str]] = None) -> List[PropertyReport]:
    """
    Run every named check for ``trials`` seeded trials

    Trial ``t`` uses seed ``seed + t`` and dimension ``dims[t % len(dims)]``.

    Returns:
        One PropertyReport per check, in suite order
    """
    if trials < 1:
        raise ValidationError("The property suite needs at least one trial")
    if not dims or any(int(d) < 2 for d in dims):
        raise ValidationError(f"Suite dimensions must be >= 2, got {list(dims)}")
    names = list(checks) if checks else list(CHECKS)
    reports = []
    for name in names:
        report = run_check(name, trials, dims, seed, slack)
        if report.violations:
            logger.warning(f"Property '{name}': {report.violations}/{report.trials} violations, "
                           f"worst {report.worst_violation:.3e}")
        else:
            logger.info(f"Property '{name}': {report.trials} trials passed")
        reports.append(report)
    return reports

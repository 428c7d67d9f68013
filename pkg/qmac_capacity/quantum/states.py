"""
Quantum state constructors and validators
"""

from dataclasses import dataclass, field
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import LayoutError, ValidationError
from .linalg import (
    ComplexMatrix,
    SubsystemLayout,
    dagger,
    eig_hermitian,
    ensure_finite,
    is_hermitian,
    partial_trace,
    permute_subsystems,
    permute_vector,
    projector,
)

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator, None]

STATE_TOL = 1e-10
DISTRIBUTION_TOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    """Trace-one PSD matrix with a declared subsystem layout."""

    matrix: ComplexMatrix
    layout: SubsystemLayout

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.layout.labels

    def reduced(self, keep: Sequence[str]) -> "DensityMatrix":
        """Marginal on ``keep`` (original relative order)."""
        return DensityMatrix(partial_trace(self.matrix, self.layout, keep), self.layout.select(keep))

    def permuted(self, order: Sequence[str]) -> "DensityMatrix":
        return DensityMatrix(permute_subsystems(self.matrix, self.layout, order), self.layout.reorder(order))

    def relabeled(self, mapping: dict) -> "DensityMatrix":
        return DensityMatrix(self.matrix, self.layout.relabel(mapping))

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(np.kron(self.matrix, other.matrix), self.layout.concat(other.layout))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class PureState:
    """Unit vector with a declared subsystem layout."""

    amplitudes: np.ndarray
    layout: SubsystemLayout

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != self.layout.total_dim:
            raise LayoutError(
                f"{amps.shape[0]} amplitudes do not match layout {self.layout.labels} "
                f"of dimension {self.layout.total_dim}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > STATE_TOL:
            raise ValidationError(f"Pure state has norm {norm}, expected 1")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def density(self) -> DensityMatrix:
        return DensityMatrix(projector(self.amplitudes), self.layout)

    def tensor(self, other: "PureState") -> "PureState":
        return PureState(np.kron(self.amplitudes, other.amplitudes), self.layout.concat(other.layout))

    def permuted(self, order: Sequence[str]) -> "PureState":
        return PureState(permute_vector(self.amplitudes, self.layout, order), self.layout.reorder(order))

    def relabeled(self, mapping: dict) -> "PureState":
        return PureState(self.amplitudes, self.layout.relabel(mapping))


@dataclass(frozen=True)
class CqEnsemble:
    """Pure-state ensemble {p(x), |phi_x>} on Alice's input plus Bob's bipartite reference state."""

    probs: np.ndarray
    states: Tuple[PureState, ...]
    reference: Optional[PureState] = None

    def __post_init__(self):
        probs = validate_distribution(self.probs)
        states = tuple(self.states)
        if len(states) != len(probs):
            raise ValidationError(f"{len(probs)} probabilities but {len(states)} states")
        if len({s.layout for s in states}) > 1:
            raise LayoutError("Ensemble states must share one layout")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class CqqState:
    """Classical label distribution with one density block per label."""

    probs: np.ndarray
    blocks: Tuple[DensityMatrix, ...]
    label: str = "X"

    def __post_init__(self):
        probs = validate_distribution(self.probs)
        blocks = tuple(self.blocks)
        if len(blocks) != len(probs):
            raise ValidationError(f"{len(probs)} probabilities but {len(blocks)} blocks")
        if len({b.layout for b in blocks}) != 1:
            raise LayoutError("cqq blocks must share one layout")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "blocks", blocks)

    @property
    def block_layout(self) -> SubsystemLayout:
        return self.blocks[0].layout

    def reduced(self, keep: Sequence[str]) -> "CqqState":
        """Marginal of every block on ``keep``."""
        return CqqState(self.probs, tuple(b.reduced(keep) for b in self.blocks), self.label)


def validate_distribution(probs, tol: float = DISTRIBUTION_TOL) -> np.ndarray:
    probs = np.asarray(probs, dtype=float).reshape(-1)
    if probs.size == 0:
        raise ValidationError("Empty probability distribution")
    if not np.all(np.isfinite(probs)):
        raise ValidationError("Probability distribution contains NaN or Inf")
    if np.any(probs < -tol):
        raise ValidationError(f"Negative probability {probs.min()}")
    if abs(float(probs.sum()) - 1.0) > tol:
        raise ValidationError(f"Probabilities sum to {probs.sum()}, expected 1")
    return np.clip(probs, 0.0, None)


def _as_layout(layout: Union[SubsystemLayout, int, None], dim: int, label: str = "A") -> SubsystemLayout:
    if layout is None:
        return SubsystemLayout.single(dim, label)
    if isinstance(layout, int):
        return SubsystemLayout.single(layout, label)
    return layout


def density_from_matrix(m: ComplexMatrix, layout: Union[SubsystemLayout, int, None] = None,
                        tol: float = STATE_TOL) -> DensityMatrix:
    """
    Validate a matrix as a density matrix

    Args:
        m: Candidate matrix
        layout: Subsystem layout (defaults to a single factor 'A')
        tol: Tolerance for hermiticity, trace and negative eigenvalues

    Returns:
        DensityMatrix with small negative eigenvalues clamped to zero
    """
    m = ensure_finite(m)
    layout = _as_layout(layout, m.shape[0] if m.ndim == 2 else 0)
    layout.check(m)
    if not is_hermitian(m, tol):
        raise ValidationError(f"Density matrix is not Hermitian within {tol}")
    trace = complex(np.trace(m))
    if abs(trace - 1.0) > tol:
        raise ValidationError(f"Density matrix has trace {trace.real:.12g}, expected 1")
    values, vectors = eig_hermitian(m, tol)
    if values[0] < -tol:
        raise ValidationError(f"Density matrix has negative eigenvalue {values[0]:.3e}")
    if values[0] < 0:
        logger.debug(f"Clamping eigenvalue {values[0]:.3e} to zero")
        values = np.clip(values, 0.0, None)
        m = (vectors * values) @ dagger(vectors)
    else:
        m = (m + dagger(m)) / 2
    return DensityMatrix(m, layout)


def pure_state(amplitudes, layout: Union[SubsystemLayout, int, None] = None,
               normalize: bool = False) -> PureState:
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if normalize:
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValidationError("Cannot normalize the zero vector")
        amps = amps / norm
    return PureState(amps, _as_layout(layout, amps.shape[0]))


def maximally_mixed(d: int, label: str = "A") -> DensityMatrix:
    if d < 1:
        raise ValidationError("Dimension must be at least 1")
    return DensityMatrix(np.eye(d, dtype=complex) / d, SubsystemLayout.single(d, label))


def basis_state(index: int, d: int, label: str = "A") -> PureState:
    amps = np.zeros(d, dtype=complex)
    amps[index] = 1.0
    return PureState(amps, SubsystemLayout.single(d, label))


def classical_state(probs, label: str = "X") -> DensityMatrix:
    """Diagonal state sum_x p(x)|x><x| on a classical label factor."""
    probs = validate_distribution(probs)
    return DensityMatrix(np.diag(probs).astype(complex), SubsystemLayout.single(len(probs), label))


def maximally_entangled(d: int, labels: Tuple[str, str] = ("A", "A'")) -> PureState:
    """(1/sqrt d) sum_j |j>|j>, both marginals maximally mixed."""
    if d < 1:
        raise ValidationError("Maximally entangled state needs d >= 1")
    amps = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return PureState(amps, SubsystemLayout((d, d), labels))


def purify(rho: DensityMatrix, reference_label: str = "R") -> PureState:
    """
    Canonical purification sum_i sqrt(lambda_i) |i>^R |v_i>

    Eigenvalues are taken in descending order, so a pure input yields
    amplitude 1 on the first reference basis vector. The reference factor
    comes first and has the same dimension as ``rho``.
    """
    values, vectors = eig_hermitian(rho.matrix)
    values = np.clip(values[::-1], 0.0, None)
    vectors = vectors[:, ::-1]
    # row i of the amplitude matrix is sqrt(lambda_i) v_i
    amps = (np.sqrt(values)[:, None] * vectors.T).reshape(-1)
    amps = amps / np.linalg.norm(amps)
    layout = SubsystemLayout((rho.dim,), (reference_label,)).concat(rho.layout)
    return PureState(amps, layout)


def weyl_unitaries(d: int) -> List[ComplexMatrix]:
    """The d^2 shift/clock operators X^a Z^b, a outer and b inner."""
    if d < 1:
        raise ValidationError("Weyl unitaries need d >= 1")
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    unitaries = []
    for a in range(d):
        xa = np.linalg.matrix_power(shift, a)
        for b in range(d):
            unitaries.append(xa @ np.linalg.matrix_power(clock, b))
    return unitaries


def random_unitary(dim: int, seed: SeedLike = None) -> ComplexMatrix:
    """Haar-random unitary from the QR decomposition of a complex Gaussian matrix."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_pure(dim: int, seed: SeedLike = None,
                layout: Optional[SubsystemLayout] = None) -> PureState:
    """Unitarily invariant random pure state."""
    if dim < 1:
        raise ValidationError("Dimension must be at least 1")
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(amps / np.linalg.norm(amps), _as_layout(layout, dim))


def random_density(dim: int, rank: Optional[int] = None, seed: SeedLike = None,
                   layout: Optional[SubsystemLayout] = None) -> DensityMatrix:
    """Normalized Gram matrix of ``rank`` complex Gaussian columns."""
    rank = dim if rank is None else rank
    if rank < 1:
        raise ValidationError("Rank must be at least 1")
    if rank > dim:
        raise ValidationError(f"Rank {rank} exceeds dimension {dim}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ dagger(g)
    m = m / np.trace(m).real
    return DensityMatrix((m + dagger(m)) / 2, _as_layout(layout, dim))


def assemble_cqq(probs, blocks: Sequence[DensityMatrix], label: str = "X") -> DensityMatrix:
    """Block-diagonal matrix whose block x is p(x) sigma_x, layout (label, *block layout)."""
    cqq = CqqState(probs, tuple(blocks), label)
    n = len(cqq.probs)
    d = cqq.block_layout.total_dim
    m = np.zeros((n * d, n * d), dtype=complex)
    for x, (p, block) in enumerate(zip(cqq.probs, cqq.blocks)):
        m[x * d:(x + 1) * d, x * d:(x + 1) * d] = p * block.matrix
    return DensityMatrix(m, SubsystemLayout((n,), (label,)).concat(cqq.block_layout))


def split_cqq(rho: DensityMatrix, label: Optional[str] = None, tol: float = 1e-9) -> CqqState:
    """
    Inverse of assemble_cqq

    The classical label must be the first factor. Zero-probability blocks
    are returned as maximally mixed placeholders.
    """
    label = label or rho.layout.labels[0]
    if rho.layout.labels[0] != label:
        raise LayoutError(f"Classical label '{label}' must be the first factor of {rho.layout.labels}")
    n = rho.layout.dims[0]
    block_layout = SubsystemLayout(rho.layout.dims[1:], rho.layout.labels[1:])
    d = block_layout.total_dim
    m = rho.matrix
    off_block = m.copy()
    probs, blocks = [], []
    for x in range(n):
        block = m[x * d:(x + 1) * d, x * d:(x + 1) * d]
        off_block[x * d:(x + 1) * d, x * d:(x + 1) * d] = 0
        p = float(np.real(np.trace(block)))
        probs.append(p)
        if p > tol:
            blocks.append(DensityMatrix(block / p, block_layout))
        else:
            blocks.append(DensityMatrix(np.eye(d, dtype=complex) / d, block_layout))
    leak = float(np.max(np.abs(off_block), initial=0.0))
    if leak > tol:
        raise ValidationError(f"State is not block diagonal in '{label}': off-block mass {leak:.3e}")
    probs = np.clip(np.asarray(probs), 0.0, None)
    return CqqState(probs / probs.sum(), tuple(blocks), label)


def random_cqq(n_blocks: int, layout: SubsystemLayout, seed: SeedLike = None,
               label: str = "X") -> CqqState:
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(n_blocks))
    blocks = tuple(random_density(layout.total_dim, seed=rng, layout=layout) for _ in range(n_blocks))
    return CqqState(probs, blocks, label)

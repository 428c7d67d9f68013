"""
Dense complex-matrix kernel: tensor products, partial traces over labelled
subsystem layouts, Hermitian eigendecomposition and PSD matrix functions.

Index convention: row-major and big-endian over subsystems, so for a layout
with dims (d_0, ..., d_{n-1}) the basis index of |i_0 ... i_{n-1}> is
i_0 * (d_1 ... d_{n-1}) + ... + i_{n-1}. This is numpy's ``kron`` order.
"""

from dataclasses import dataclass
import logging
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from ..errors import LayoutError, NumericalError, ValidationError

logger = logging.getLogger(__name__)

ComplexMatrix = np.ndarray

HERMITIAN_TOL = 1e-10
EIGENVALUE_CLAMP = 1e-10


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered tensor-factor bookkeeping for a matrix or vector."""

    dims: Tuple[int, ...]
    labels: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))
        if len(self.dims) != len(self.labels):
            raise LayoutError(f"{len(self.dims)} dims but {len(self.labels)} labels")
        if any(d < 1 for d in self.dims):
            raise LayoutError(f"Subsystem dimensions must be positive, got {self.dims}")
        if len(set(self.labels)) != len(self.labels):
            raise LayoutError(f"Subsystem labels must be unique, got {self.labels}")

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.dims else 1

    def __len__(self) -> int:
        return len(self.dims)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"Unknown subsystem label '{label}' (layout has {self.labels})") from None

    def dim_of(self, labels: Union[str, Iterable[str]]) -> int:
        if isinstance(labels, str):
            labels = [labels]
        return int(np.prod([self.dims[self.index(l)] for l in labels], dtype=np.int64))

    def select(self, labels: Sequence[str]) -> "SubsystemLayout":
        """Sub-layout on ``labels``, kept in this layout's relative order."""
        wanted = set(labels)
        for label in labels:
            self.index(label)
        pairs = [(d, l) for d, l in zip(self.dims, self.labels) if l in wanted]
        return SubsystemLayout(tuple(d for d, _ in pairs), tuple(l for _, l in pairs))

    def reorder(self, labels: Sequence[str]) -> "SubsystemLayout":
        """Layout with factors in exactly the order given."""
        return SubsystemLayout(tuple(self.dims[self.index(l)] for l in labels), tuple(labels))

    def concat(self, other: "SubsystemLayout") -> "SubsystemLayout":
        return SubsystemLayout(self.dims + other.dims, self.labels + other.labels)

    def relabel(self, mapping: dict) -> "SubsystemLayout":
        return SubsystemLayout(self.dims, tuple(mapping.get(l, l) for l in self.labels))

    def check(self, m: ComplexMatrix) -> None:
        """Raise LayoutError unless ``m`` is square with this layout's total dimension."""
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != self.total_dim:
            raise LayoutError(
                f"Matrix of shape {m.shape} does not match layout {self.labels} "
                f"with total dimension {self.total_dim}"
            )

    @classmethod
    def single(cls, dim: int, label: str = "A") -> "SubsystemLayout":
        return cls((dim,), (label,))


def ensure_finite(m: ComplexMatrix) -> ComplexMatrix:
    m = np.asarray(m, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ValidationError("Matrix contains NaN or Inf entries")
    return m


def dagger(m: ComplexMatrix) -> ComplexMatrix:
    return np.conj(np.swapaxes(m, -1, -2))


def tensor(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Kronecker product with index(i_a, i_b) = i_a * dim_b + i_b."""
    return np.kron(ensure_finite(a), ensure_finite(b))


def tensor_all(factors: Iterable[ComplexMatrix]) -> ComplexMatrix:
    result = np.ones((1, 1), dtype=complex)
    for factor in factors:
        result = tensor(result, factor)
    return result


def permute_subsystems(m: ComplexMatrix, layout: SubsystemLayout,
                       order: Sequence[str]) -> ComplexMatrix:
    """Reorder the tensor factors of a square matrix to ``order``."""
    layout.check(m)
    if sorted(order) != sorted(layout.labels):
        raise LayoutError(f"Permutation {tuple(order)} is not a reordering of {layout.labels}")
    n = len(layout)
    perm = [layout.index(l) for l in order]
    tensor_form = m.reshape(layout.dims + layout.dims)
    tensor_form = tensor_form.transpose(perm + [n + p for p in perm])
    dim = layout.total_dim
    return tensor_form.reshape(dim, dim)


def permute_vector(v: np.ndarray, layout: SubsystemLayout, order: Sequence[str]) -> np.ndarray:
    if v.shape != (layout.total_dim,):
        raise LayoutError(f"Vector of shape {v.shape} does not match layout {layout.labels}")
    if sorted(order) != sorted(layout.labels):
        raise LayoutError(f"Permutation {tuple(order)} is not a reordering of {layout.labels}")
    perm = [layout.index(l) for l in order]
    return v.reshape(layout.dims).transpose(perm).reshape(-1)


def partial_trace(m: ComplexMatrix, layout: SubsystemLayout,
                  keep: Iterable[str]) -> ComplexMatrix:
    """
    Trace out every factor not in ``keep``

    Args:
        m: Square matrix annotated by ``layout``
        layout: Subsystem layout of ``m``
        keep: Nonempty subset of labels to keep

    Returns:
        Reduced matrix on the kept factors, in their original relative order
    """
    m = np.asarray(m, dtype=complex)
    layout.check(m)
    keep = list(keep)
    if not keep:
        raise LayoutError("partial_trace needs at least one label to keep")
    kept = layout.select(keep)
    n = len(layout)
    keep_idx = [layout.index(l) for l in kept.labels]

    # einsum subscripts: row index i_k, column index j_k; traced factors share a letter
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    rows, cols = [], []
    for k in range(n):
        r = next(letters)
        rows.append(r)
        cols.append(next(letters) if k in keep_idx else r)
    out = "".join(rows[k] for k in keep_idx) + "".join(cols[k] for k in keep_idx)
    reduced = np.einsum(f"{''.join(rows)}{''.join(cols)}->{out}", m.reshape(layout.dims + layout.dims))
    d = kept.total_dim
    return reduced.reshape(d, d)


def is_hermitian(h: ComplexMatrix, tol: float = HERMITIAN_TOL) -> bool:
    return h.ndim == 2 and h.shape[0] == h.shape[1] and float(np.max(np.abs(h - dagger(h)), initial=0.0)) <= tol


def eig_hermitian(h: ComplexMatrix, tol: float = HERMITIAN_TOL) -> Tuple[np.ndarray, ComplexMatrix]:
    """
    Eigendecomposition of a Hermitian matrix

    Args:
        h: Square matrix with max-entry |h - h^dagger| <= tol
        tol: Hermiticity tolerance

    Returns:
        (ascending real eigenvalues, unitary matrix of eigenvectors as columns)
    """
    h = ensure_finite(h)
    if not is_hermitian(h, tol):
        raise ValidationError(f"Matrix is not Hermitian within {tol}")
    try:
        values, vectors = np.linalg.eigh((h + dagger(h)) / 2)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"Eigendecomposition did not converge: {e}") from e
    return values, vectors


def clamp_eigenvalues(values: np.ndarray, clamp: float = EIGENVALUE_CLAMP) -> np.ndarray:
    """Zero eigenvalues in [-clamp, 0]; raise on anything more negative."""
    worst = float(np.min(values, initial=0.0))
    if worst < -clamp:
        raise ValidationError(f"Negative eigenvalue {worst:.3e} beyond tolerance {clamp}")
    return np.where(values < 0, 0.0, values)


def psd_sqrt(p: ComplexMatrix, clamp: float = EIGENVALUE_CLAMP) -> ComplexMatrix:
    """Hermitian PSD square root S with S @ S = p."""
    values, vectors = eig_hermitian(p)
    values = clamp_eigenvalues(values, clamp)
    return (vectors * np.sqrt(values)) @ dagger(vectors)


def psd_function(p: ComplexMatrix, fn, clamp: float = EIGENVALUE_CLAMP) -> ComplexMatrix:
    values, vectors = eig_hermitian(p)
    values = clamp_eigenvalues(values, clamp)
    return (vectors * fn(values)) @ dagger(vectors)


def trace_norm(m: ComplexMatrix) -> float:
    """Sum of singular values."""
    return float(np.sum(np.linalg.svd(ensure_finite(m), compute_uv=False)))


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(v: np.ndarray) -> ComplexMatrix:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, np.conj(v))


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

"""
Entropic quantities and distance measures, all in bits.

Conventions: I_c(A>B) = H(B) - H(AB); the trace distance is the full trace
norm |rho - sigma|_1 in [0, 2]; the fidelity is the squared version
F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 in [0, 1].
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import LayoutError, ValidationError
from .channels import CPMap, QuantumChannel, QuantumInstrument, align_input, apply, apply_kraus
from .linalg import ComplexMatrix, SubsystemLayout, dagger, ensure_finite, psd_sqrt
from .states import CqqState, DensityMatrix, PureState, purify

logger = logging.getLogger(__name__)

Bits = float

ENTROPY_CUTOFF = 1e-12

StateLike = Union[DensityMatrix, ComplexMatrix]


def _matrix(rho: StateLike) -> ComplexMatrix:
    return rho.matrix if isinstance(rho, DensityMatrix) else ensure_finite(rho)


def _spectrum(m: ComplexMatrix) -> np.ndarray:
    return np.linalg.eigvalsh((m + dagger(m)) / 2)


def shannon_entropy(probs) -> Bits:
    """-sum p log2 p with 0 log 0 = 0."""
    probs = np.asarray(probs, dtype=float)
    nz = probs[probs > ENTROPY_CUTOFF]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))


def entropy(rho: StateLike, cutoff: float = ENTROPY_CUTOFF) -> Bits:
    """von Neumann entropy -tr rho log2 rho."""
    values = _spectrum(_matrix(rho))
    values = values[values > cutoff]
    return float(max(0.0, -np.sum(values * np.log2(values))))


def binary_entropy(p: float) -> Bits:
    if not -1e-12 <= p <= 1 + 1e-12:
        raise ValidationError(f"Binary entropy argument {p} outside [0, 1]")
    p = min(max(p, 0.0), 1.0)
    return shannon_entropy([p, 1.0 - p])


def _two_groups(rho: DensityMatrix, first, second) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    if first is None and second is None:
        if len(rho.layout) != 2:
            raise LayoutError(f"Expected a bipartite layout, got {rho.layout.labels}")
        return (rho.layout.labels[0],), (rho.layout.labels[1],)
    if first is None or second is None:
        raise LayoutError("Give both subsystem groups or neither")
    first = (first,) if isinstance(first, str) else tuple(first)
    second = (second,) if isinstance(second, str) else tuple(second)
    if set(first) & set(second):
        raise LayoutError(f"Subsystem groups {first} and {second} overlap")
    for label in first + second:
        rho.layout.index(label)
    return first, second


def marginal_entropy(rho: DensityMatrix, labels: Iterable[str]) -> Bits:
    labels = list(labels)
    if sorted(labels) == sorted(rho.layout.labels):
        return entropy(rho)
    return entropy(rho.reduced(labels))


def mutual_information(rho: DensityMatrix, first=None, second=None) -> Bits:
    """I(X;B) = H(X) + H(B) - H(XB)."""
    first, second = _two_groups(rho, first, second)
    return (marginal_entropy(rho, first) + marginal_entropy(rho, second)
            - marginal_entropy(rho, first + second))


def conditional_entropy(rho: DensityMatrix, target=None, given=None) -> Bits:
    """H(A|B) = H(AB) - H(B)."""
    target, given = _two_groups(rho, target, given)
    return marginal_entropy(rho, target + given) - marginal_entropy(rho, given)


def coherent_information(rho: DensityMatrix, source=None, target=None) -> Bits:
    """I_c(A>B) = H(B) - H(AB)."""
    source, target = _two_groups(rho, source, target)
    return marginal_entropy(rho, target) - marginal_entropy(rho, source + target)


def _free_label(layout: SubsystemLayout, base: str = "R") -> str:
    label = base
    while label in layout.labels:
        label += "'"
    return label


def _on_channel_input(rho: DensityMatrix, ch: CPMap) -> DensityMatrix:
    return align_input(rho, ch.input_layout)


def channel_coherent_information(rho: DensityMatrix, ch: QuantumChannel,
                                 purification: Optional[PureState] = None) -> Bits:
    """
    I_c(rho, N) = H(N(rho)) - H((1 (x) N)(Phi_rho))

    Args:
        rho: Channel input state
        ch: Channel
        purification: Optional purification of ``rho``; its non-input factors
            act as the reference. Defaults to the canonical purification.
    """
    rho = _on_channel_input(rho, ch)
    if purification is None:
        purification = purify(rho, _free_label(rho.layout.concat(ch.output_layout)))
    joint = apply(ch, purification.density())
    outputs = list(ch.output_layout.labels)
    reference = [l for l in joint.layout.labels if l not in outputs]
    return coherent_information(joint, reference, outputs)


def conditional_coherent_information(cqq: CqqState, source=None, target=None) -> Bits:
    """I_c(A>BX) = sum_x p(x) I_c(A>B)_{sigma_x}, from the blocks."""
    total = 0.0
    for p, block in zip(cqq.probs, cqq.blocks):
        if p > 0:
            total += p * coherent_information(block, source, target)
    return float(total)


def conditional_coherent_information_assembled(rho: DensityMatrix, label: str = "X",
                                               source=None, target=None) -> Bits:
    """I_c(A>BX) = H(BX) - H(ABX) evaluated on the assembled block-diagonal state."""
    block_labels = [l for l in rho.layout.labels if l != label]
    if source is None and target is None:
        if len(block_labels) != 2:
            raise LayoutError(f"Expected two quantum factors besides '{label}', got {block_labels}")
        source, target = (block_labels[0],), (block_labels[1],)
    source = (source,) if isinstance(source, str) else tuple(source)
    target = (target,) if isinstance(target, str) else tuple(target)
    return (marginal_entropy(rho, (label,) + target)
            - marginal_entropy(rho, (label,) + source + target))


def induced_cqq(rho: DensityMatrix, instr: QuantumInstrument,
                reference_label: Optional[str] = None) -> CqqState:
    """sum_x p(x)|x><x| (x) (1 (x) N_x)(Phi_rho) / p(x), with the reference factor first."""
    first = instr.components[0]
    rho = _on_channel_input(rho, first)
    reference_label = reference_label or _free_label(rho.layout.concat(instr.output_layout))
    phi = purify(rho, reference_label).density()
    probs, blocks = [], []
    for component in instr.components:
        out = apply_kraus(component.kraus, component.input_layout, component.output_layout, phi)
        p = float(np.real(np.trace(out.matrix)))
        probs.append(max(p, 0.0))
        if p > ENTROPY_CUTOFF:
            blocks.append(DensityMatrix(out.matrix / p, out.layout))
        else:
            d = out.layout.total_dim
            blocks.append(DensityMatrix(np.eye(d, dtype=complex) / d, out.layout))
    probs = np.asarray(probs)
    return CqqState(probs / probs.sum(), tuple(blocks))


def instrument_coherent_information(rho: DensityMatrix, instr: QuantumInstrument) -> Bits:
    """I_c(rho, N) = I_c(R > B X) for the cqq state induced by the instrument."""
    cqq = induced_cqq(rho, instr)
    labels = cqq.block_layout.labels
    return conditional_coherent_information(cqq, labels[:1], labels[1:])


def fidelity(rho: StateLike, sigma: StateLike) -> float:
    """F = (sum of singular values of sqrt(rho) sqrt(sigma))^2."""
    a, b = _matrix(rho), _matrix(sigma)
    if a.shape != b.shape:
        raise LayoutError(f"Cannot compare states of shapes {a.shape} and {b.shape}")
    s = np.linalg.svd(psd_sqrt(a) @ psd_sqrt(b), compute_uv=False)
    return float(min(1.0, max(0.0, np.sum(s) ** 2)))


def fidelity_literal(rho: StateLike, sigma: StateLike) -> float:
    """F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, evaluated as written."""
    a, b = _matrix(rho), _matrix(sigma)
    root = psd_sqrt(a)
    inner = root @ b @ root
    values = np.clip(_spectrum(inner), 0.0, None)
    return float(min(1.0, np.sum(np.sqrt(values)) ** 2))


def trace_distance(rho: StateLike, sigma: StateLike) -> float:
    """|rho - sigma|_1, equal to 2 for orthogonal states."""
    a, b = _matrix(rho), _matrix(sigma)
    if a.shape != b.shape:
        raise LayoutError(f"Cannot compare states of shapes {a.shape} and {b.shape}")
    return float(min(2.0, np.sum(np.abs(_spectrum(a - b)))))


def dephasing_family_state(alpha: float) -> DensityMatrix:
    """rho_alpha = 1/2 (alpha(|00><00| + |11><11|) + (1-alpha)(|01><01| + |10><10|))."""
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha {alpha} outside [0, 1]")
    diag = 0.5 * np.array([alpha, 1 - alpha, 1 - alpha, alpha])
    return DensityMatrix(np.diag(diag).astype(complex), SubsystemLayout((2, 2), ("A'", "B'")))


def dephasing_family_scan(ch: QuantumChannel, alphas: Sequence[float]) -> List[Tuple[float, Bits]]:
    """Channel coherent information of rho_alpha for each alpha."""
    return [(float(a), channel_coherent_information(dephasing_family_state(a), ch)) for a in alphas]

"""
Completely positive maps in Kraus form: validation, application, isometric
extension, complementary channel, tensor powers, degradability checks and
the channel zoo (erasure MAC, collective phase flip, dephasing).
"""

from dataclasses import dataclass, field
import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from ..errors import DimensionCapError, LayoutError, ValidationError
from .linalg import (
    PAULI_Z,
    ComplexMatrix,
    SubsystemLayout,
    dagger,
    ensure_finite,
    ket,
)
from .states import DensityMatrix, PureState, SeedLike, random_unitary, validate_distribution

logger = logging.getLogger(__name__)

KRAUS_TOL = 1e-9
DEFAULT_DIMENSION_CAP = 64

LayoutLike = Union[SubsystemLayout, int, Sequence[int]]


@dataclass(frozen=True)
class CPMap:
    """Completely positive map sum_k K_k rho K_k^dagger (not necessarily trace preserving)."""

    kraus: Tuple[ComplexMatrix, ...]
    input_layout: SubsystemLayout
    output_layout: SubsystemLayout
    name: str = ""
    # input labels owned by each sender, for multiple-access channels
    senders: Tuple[Tuple[str, ...], ...] = field(default=())

    @property
    def din(self) -> int:
        return self.input_layout.total_dim

    @property
    def dout(self) -> int:
        return self.output_layout.total_dim

    def completeness(self) -> ComplexMatrix:
        return sum(dagger(k) @ k for k in self.kraus)

    def sender_labels(self, which: int) -> Tuple[str, ...]:
        if not self.senders:
            raise LayoutError(f"Channel '{self.name}' declares no senders")
        return self.senders[which]


@dataclass(frozen=True)
class QuantumChannel(CPMap):
    """Trace-preserving CPMap."""


@dataclass(frozen=True)
class Isometry:
    """Isometric extension V: A' -> B E, output factors ordered (B, E)."""

    matrix: ComplexMatrix
    din: int
    dout: int
    denv: int

    def apply(self, rho: ComplexMatrix) -> ComplexMatrix:
        return self.matrix @ rho @ dagger(self.matrix)


@dataclass(frozen=True)
class QuantumInstrument:
    """CP components N_x whose sum is trace preserving."""

    components: Tuple[CPMap, ...]
    name: str = ""

    def __post_init__(self):
        components = tuple(self.components)
        if not components:
            raise ValidationError("An instrument needs at least one component")
        if len({(c.input_layout, c.output_layout) for c in components}) != 1:
            raise LayoutError("Instrument components must share input and output layouts")
        total = sum(c.completeness() for c in components)
        deviation = float(np.max(np.abs(total - np.eye(components[0].din))))
        if deviation > KRAUS_TOL:
            raise ValidationError(f"Instrument components are not trace preserving in sum (deviation {deviation:.3e})")
        object.__setattr__(self, "components", components)

    @property
    def input_layout(self) -> SubsystemLayout:
        return self.components[0].input_layout

    @property
    def output_layout(self) -> SubsystemLayout:
        return self.components[0].output_layout

    def __len__(self) -> int:
        return len(self.components)


def _default_labels(n: int, prefix: str) -> Tuple[str, ...]:
    if prefix == "in":
        named = ("A'", "B'")
        return named[:n] if n <= 2 else tuple(f"In{i}" for i in range(n))
    if n == 1:
        return ("C",)
    return tuple(f"C{i}" for i in range(n))


def as_layout(layout: LayoutLike, role: str) -> SubsystemLayout:
    if isinstance(layout, SubsystemLayout):
        return layout
    dims = (layout,) if isinstance(layout, (int, np.integer)) else tuple(layout)
    return SubsystemLayout(dims, _default_labels(len(dims), role))


def _default_senders(layout: SubsystemLayout) -> Tuple[Tuple[str, ...], ...]:
    if len(layout) == 2:
        return ((layout.labels[0],), (layout.labels[1],))
    return ()


def cp_map_from_kraus(kraus: Sequence[ComplexMatrix], input_layout: LayoutLike,
                      output_layout: LayoutLike, name: str = "",
                      senders: Optional[Tuple[Tuple[str, ...], ...]] = None) -> CPMap:
    input_layout = as_layout(input_layout, "in")
    output_layout = as_layout(output_layout, "out")
    kraus = tuple(ensure_finite(k) for k in kraus)
    if not kraus:
        raise ValidationError("At least one Kraus operator is required")
    for i, k in enumerate(kraus):
        if k.shape != (output_layout.total_dim, input_layout.total_dim):
            raise LayoutError(
                f"Kraus operator {i} has shape {k.shape}, expected "
                f"({output_layout.total_dim}, {input_layout.total_dim})"
            )
    senders = _default_senders(input_layout) if senders is None else senders
    return CPMap(kraus, input_layout, output_layout, name, senders)


def channel_from_kraus(kraus: Sequence[ComplexMatrix], input_layout: LayoutLike,
                       output_layout: LayoutLike, tol: float = KRAUS_TOL, name: str = "",
                       senders: Optional[Tuple[Tuple[str, ...], ...]] = None) -> QuantumChannel:
    """
    Validate a Kraus set as a quantum channel

    Args:
        kraus: Kraus operators of shape (dout, din)
        input_layout: Input layout, or dims (labels default to A', B')
        output_layout: Output layout, or dims (label defaults to C)
        tol: Allowed max-entry deviation of sum K^dagger K from the identity
        name: Channel identifier used in region metadata
        senders: Input labels owned by Alice and Bob

    Returns:
        QuantumChannel
    """
    cp = cp_map_from_kraus(kraus, input_layout, output_layout, name, senders)
    deviation = float(np.max(np.abs(cp.completeness() - np.eye(cp.din))))
    if deviation > tol:
        raise ValidationError(f"Kraus operators of '{name}' are not trace preserving (deviation {deviation:.3e})")
    return QuantumChannel(cp.kraus, cp.input_layout, cp.output_layout, cp.name, cp.senders)


def align_input(rho: DensityMatrix, input_layout: SubsystemLayout) -> DensityMatrix:
    """
    Return ``rho`` with its channel-input factors identifiable by label

    A state that carries every input label is returned unchanged. A state
    that names none of them but has the input's total dimension is taken
    to be the whole channel input and relabelled with ``input_layout``.
    """
    labels = set(rho.layout.labels)
    if set(input_layout.labels) <= labels:
        return rho
    if rho.dim == input_layout.total_dim and not labels & set(input_layout.labels):
        return DensityMatrix(rho.matrix, input_layout)
    raise LayoutError(f"State on {rho.layout.labels} does not match channel input {input_layout.labels}")


def apply_kraus(kraus: Sequence[ComplexMatrix], input_layout: SubsystemLayout,
                output_layout: SubsystemLayout, rho: DensityMatrix) -> DensityMatrix:
    """
    Apply Kraus operators to the factors of ``rho`` named by ``input_layout``

    Factors of ``rho`` outside the input layout are acted on by the identity;
    they keep their relative order and come first, followed by the output
    factors. A state naming none of the input labels is aligned by
    ``align_input``.
    """
    rho = align_input(rho, input_layout)
    layout = rho.layout
    for label, dim in zip(input_layout.labels, input_layout.dims):
        if layout.dims[layout.index(label)] != dim:
            raise LayoutError(f"Factor '{label}' has dimension {layout.dims[layout.index(label)]}, channel expects {dim}")
    others = [l for l in layout.labels if l not in input_layout.labels]
    clash = set(others) & set(output_layout.labels)
    if clash:
        raise LayoutError(f"Output labels {sorted(clash)} already present in the input state")
    m = rho.matrix
    if list(layout.labels) != others + list(input_layout.labels):
        m = rho.permuted(others + list(input_layout.labels)).matrix
    d_other = layout.dim_of(others) if others else 1
    din = input_layout.total_dim
    t = m.reshape(d_other, din, d_other, din)
    out = np.zeros((d_other, output_layout.total_dim, d_other, output_layout.total_dim), dtype=complex)
    for k in kraus:
        out += np.einsum("ai,xiyj,bj->xayb", k, t, np.conj(k), optimize=True)
    dout = d_other * output_layout.total_dim
    out_layout = layout.select(others).concat(output_layout) if others else output_layout
    return DensityMatrix(out.reshape(dout, dout), out_layout)


def apply(ch: CPMap, rho: DensityMatrix) -> DensityMatrix:
    """Channel action sum_k K rho K^dagger, extended by the identity on extra factors."""
    return apply_kraus(ch.kraus, ch.input_layout, ch.output_layout, rho)


def isometric_extension(ch: CPMap) -> Isometry:
    """V = sum_k K_k (x) |k>^E, environment indexed by Kraus order."""
    denv = len(ch.kraus)
    v = np.zeros((ch.dout * denv, ch.din), dtype=complex)
    for k, op in enumerate(ch.kraus):
        v[k::denv, :] = op
    return Isometry(v, ch.din, ch.dout, denv)


def complementary(ch: QuantumChannel, env_unitary: Optional[ComplexMatrix] = None,
                  env_label: str = "E") -> QuantumChannel:
    """
    Complementary channel rho -> tr_B(V rho V^dagger)

    Args:
        ch: Channel to complement
        env_unitary: Optional relabelling unitary applied on the environment
        env_label: Label of the environment output factor
    """
    denv = len(ch.kraus)
    stacked = np.stack(ch.kraus)  # (k, b, a)
    comp = [stacked[:, b, :] for b in range(ch.dout)]  # F_b[k, a] = K_k[b, a]
    if env_unitary is not None:
        comp = [env_unitary @ f for f in comp]
    return channel_from_kraus(comp, ch.input_layout, SubsystemLayout((denv,), (env_label,)),
                              name=f"{ch.name}^c" if ch.name else "complement")


def choi_matrix(ch: CPMap) -> ComplexMatrix:
    """(1 (x) ch)(sum_ij |ii><jj|), input factor first."""
    vecs = [k.T.reshape(-1) for k in ch.kraus]
    return sum(np.outer(v, np.conj(v)) for v in vecs)


def channel_distance(ch1: CPMap, ch2: CPMap) -> float:
    """Max-entry difference of the Choi matrices."""
    if (ch1.din, ch1.dout) != (ch2.din, ch2.dout):
        raise LayoutError(f"Cannot compare channels {ch1.din}->{ch1.dout} and {ch2.din}->{ch2.dout}")
    return float(np.max(np.abs(choi_matrix(ch1) - choi_matrix(ch2))))


def compose(outer: CPMap, inner: CPMap, name: str = "") -> QuantumChannel:
    """outer o inner, Kraus set {D_j N_k}."""
    if outer.din != inner.dout:
        raise LayoutError(f"Cannot compose: outer input {outer.din} != inner output {inner.dout}")
    kraus = [d @ n for d in outer.kraus for n in inner.kraus]
    return channel_from_kraus(kraus, inner.input_layout, outer.output_layout,
                              name=name or f"{outer.name}o{inner.name}")


def _suffixed(layout: SubsystemLayout, suffix: str) -> SubsystemLayout:
    return SubsystemLayout(layout.dims, tuple(f"{l}{suffix}" for l in layout.labels))


def tensor_product(ch1: CPMap, ch2: CPMap, suffixes: Tuple[str, str] = ("_1", "_2"),
                   cap: Optional[int] = None) -> QuantumChannel:
    """ch1 (x) ch2 with labels suffixed to stay unique."""
    din = ch1.din * ch2.din
    if cap is not None and din > cap:
        raise DimensionCapError(f"Input dimension {din} exceeds cap {cap}")
    in1, in2 = _suffixed(ch1.input_layout, suffixes[0]), _suffixed(ch2.input_layout, suffixes[1])
    out1, out2 = _suffixed(ch1.output_layout, suffixes[0]), _suffixed(ch2.output_layout, suffixes[1])
    kraus = [np.kron(a, b) for a in ch1.kraus for b in ch2.kraus]
    senders: Tuple[Tuple[str, ...], ...] = ()
    if ch1.senders and ch2.senders and len(ch1.senders) == len(ch2.senders):
        senders = tuple(
            tuple(f"{l}{suffixes[0]}" for l in s1) + tuple(f"{l}{suffixes[1]}" for l in s2)
            for s1, s2 in zip(ch1.senders, ch2.senders)
        )
    return channel_from_kraus(kraus, in1.concat(in2), out1.concat(out2),
                              name=f"{ch1.name}x{ch2.name}", senders=senders)


def tensor_power(ch: QuantumChannel, k: int, cap: int = DEFAULT_DIMENSION_CAP) -> QuantumChannel:
    """
    k-fold tensor power N^{(x)k}

    Copy j's labels carry the suffix ``_j``; each sender owns all copies of
    their input factors.
    """
    if k < 1:
        raise ValidationError("Tensor power needs k >= 1")
    if ch.din ** k > cap:
        raise DimensionCapError(f"Input dimension {ch.din}^{k} = {ch.din ** k} exceeds cap {cap}")
    if k == 1:
        return ch
    copies = [
        (_suffixed(ch.input_layout, f"_{j}"), _suffixed(ch.output_layout, f"_{j}"))
        for j in range(1, k + 1)
    ]
    input_layout, output_layout = copies[0]
    for inp, out in copies[1:]:
        input_layout, output_layout = input_layout.concat(inp), output_layout.concat(out)

    kraus = list(ch.kraus)
    for _ in range(k - 1):
        kraus = [np.kron(a, b) for a in kraus for b in ch.kraus]
    senders = tuple(
        tuple(f"{l}_{j}" for j in range(1, k + 1) for l in s) for s in ch.senders
    )
    logger.debug(f"Built tensor power {ch.name}^{k} with {len(kraus)} Kraus operators")
    return channel_from_kraus(kraus, input_layout, output_layout, name=f"{ch.name}^{k}", senders=senders)


@dataclass(frozen=True)
class DegradingCheck:
    is_degrading: bool
    residual: float


def check_degrading(n: QuantumChannel, d: QuantumChannel, tol: float = 1e-9,
                    env_unitary: Optional[ComplexMatrix] = None) -> DegradingCheck:
    """Verify N_c = D o N up to the supplied environment relabelling."""
    if d.din != n.dout:
        raise LayoutError(f"Degrading map input {d.din} does not match channel output {n.dout}")
    comp = complementary(n, env_unitary)
    if d.dout != comp.dout:
        raise LayoutError(f"Degrading map output {d.dout} does not match environment {comp.dout}")
    residual = channel_distance(compose(d, n), comp)
    return DegradingCheck(residual <= tol, residual)


def _unitary_from_params(x: np.ndarray, dim: int) -> ComplexMatrix:
    h = np.zeros((dim, dim), dtype=complex)
    iu = np.triu_indices(dim, 1)
    n_off = len(iu[0])
    h[np.diag_indices(dim)] = x[:dim]
    h[iu] = x[dim:dim + n_off] + 1j * x[dim + n_off:dim + 2 * n_off]
    h = h + np.triu(h, 1).conj().T
    return expm(1j * h)


def search_degrading_alignment(n: QuantumChannel, d: QuantumChannel, seed: SeedLike = 0,
                               restarts: int = 5, max_iters: int = 2000) -> Tuple[float, ComplexMatrix]:
    """
    Search environment relabelling unitaries minimizing the degrading residual

    Returns:
        (best residual, best unitary)
    """
    rng = np.random.default_rng(seed)
    denv = len(n.kraus)
    n_params = denv * denv

    def residual(x):
        return check_degrading(n, d, tol=0.0, env_unitary=_unitary_from_params(x, denv)).residual

    best_x = np.zeros(n_params)
    best = residual(best_x)
    for restart in range(restarts):
        start = best_x if restart == 0 else rng.uniform(-np.pi, np.pi, n_params)
        result = minimize(residual, start, method="Nelder-Mead",
                          options={"maxiter": max_iters, "xatol": 1e-10, "fatol": 1e-13})
        if result.fun < best:
            best, best_x = float(result.fun), result.x
    logger.info(f"Degrading alignment search for '{n.name}': residual {best:.3e}")
    return best, _unitary_from_params(best_x, denv)


# -- Channel zoo --------------------------------------------------------------

def identity_channel(d: int, label_in: str = "A'", label_out: str = "C") -> QuantumChannel:
    return channel_from_kraus([np.eye(d, dtype=complex)], SubsystemLayout.single(d, label_in),
                              SubsystemLayout.single(d, label_out), name=f"id{d}")


def dephasing(p: float, label_in: str = "A'", label_out: str = "C") -> QuantumChannel:
    """Qubit dephasing {sqrt(1-p) I, sqrt(p) Z}; p = 1/2 dephases completely."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"Dephasing probability {p} outside [0, 1]")
    kraus = [np.sqrt(1 - p) * np.eye(2, dtype=complex), np.sqrt(p) * PAULI_Z]
    return channel_from_kraus(kraus, SubsystemLayout.single(2, label_in),
                              SubsystemLayout.single(2, label_out), name=f"dephasing({p:g})")


def erasure_mac(d: int) -> QuantumChannel:
    """
    Multiple-access erasure channel A'B' -> C with |A'| = 2, |B'| = d, |C| = d + 1

    Alice's |0> erases Bob's input to the flag |0>^C; Alice's |1> transfers
    Bob's input coherently onto |1..d>^C. Kraus operators:
    |0>^C <0|^A' <j|^B' for each j, and sum_i |i+1>^C <1|^A' <i|^B'.
    """
    if d < 2:
        raise ValidationError(f"Erasure MAC needs d >= 2, got {d}")
    din, dout = 2 * d, d + 1
    kraus = []
    for j in range(d):
        k = np.zeros((dout, din), dtype=complex)
        k[0, 0 * d + j] = 1.0
        kraus.append(k)
    transfer = np.zeros((dout, din), dtype=complex)
    for i in range(d):
        transfer[1 + i, 1 * d + i] = 1.0
    kraus.append(transfer)
    return channel_from_kraus(kraus, SubsystemLayout((2, d), ("A'", "B'")),
                              SubsystemLayout((dout,), ("C",)), name=f"erasure_mac({d})")


def collective_phase_flip(p: float) -> QuantumChannel:
    """N_p(rho) = (1-p) rho + p (Z (x) Z) rho (Z (x) Z) on two qubits."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"Phase-flip probability {p} outside [0, 1]")
    kraus = [np.sqrt(1 - p) * np.eye(4, dtype=complex), np.sqrt(p) * np.kron(PAULI_Z, PAULI_Z)]
    return channel_from_kraus(kraus, SubsystemLayout((2, 2), ("A'", "B'")),
                              SubsystemLayout((4,), ("C",)), name=f"phase_flip({p:g})")


def discard_sender(d_a: int, d_b: int) -> QuantumChannel:
    """Traces out Alice's input and passes Bob's through unchanged."""
    kraus = [np.kron(ket(a, d_a).reshape(1, -1), np.eye(d_b)) for a in range(d_a)]
    return channel_from_kraus(kraus, SubsystemLayout((d_a, d_b), ("A'", "B'")),
                              SubsystemLayout((d_b,), ("C",)), name=f"discard_alice({d_a},{d_b})")


def random_channel(din: int, dout: int, env_dim: int, seed: SeedLike = None,
                   input_label: str = "A", output_label: Optional[str] = None) -> QuantumChannel:
    """Random CPTP map from a random isometry into dout * env_dim, environment traced out."""
    rng = np.random.default_rng(seed)
    total = dout * env_dim
    if total < din:
        raise ValidationError(f"Dilation dimension {total} smaller than input dimension {din}")
    v = random_unitary(total, rng)[:, :din]
    kraus = [v[e::env_dim, :] for e in range(env_dim)]
    return channel_from_kraus(kraus, SubsystemLayout.single(din, input_label),
                              SubsystemLayout.single(dout, output_label or input_label),
                              name="random")


# -- Instruments ----------------------------------------------------------------

def measure_instrument(d: int, label: str = "A'") -> QuantumInstrument:
    """Measure-and-keep instrument with components |x><x| . |x><x|."""
    layout = SubsystemLayout.single(d, label)
    components = tuple(
        cp_map_from_kraus([np.outer(ket(x, d), ket(x, d))], layout, SubsystemLayout.single(d, "C"),
                          name=f"measure[{x}]")
        for x in range(d)
    )
    return QuantumInstrument(components, name=f"measure({d})")


def sender_instrument(ch: QuantumChannel, probs, states: Sequence[PureState]) -> QuantumInstrument:
    """
    Instrument induced on Bob's input once Alice's classical ensemble is fixed

    Component x maps rho on B' to p(x) N(phi_x (x) rho); it reveals which
    x Alice sent alongside the channel output.
    """
    probs = validate_distribution(probs)
    alice, bob = ch.sender_labels(0), ch.sender_labels(1)
    bob_layout = ch.input_layout.select(bob)
    alice_layout = ch.input_layout.select(alice)
    if alice_layout.total_dim != states[0].dim:
        raise LayoutError(f"Alice's states have dimension {states[0].dim}, channel expects {alice_layout.total_dim}")
    order = list(alice) + list(bob)
    components = []
    for x, (p, phi) in enumerate(zip(probs, states)):
        kraus = []
        for k in ch.kraus:
            # K (|phi_x> (x) I_B'), with K's input reordered to (Alice, Bob)
            k_perm = _permute_input(k, ch.input_layout, order)
            embed = np.kron(phi.amplitudes.reshape(-1, 1), np.eye(bob_layout.total_dim))
            kraus.append(np.sqrt(p) * k_perm @ embed)
        components.append(cp_map_from_kraus(kraus, bob_layout, ch.output_layout, name=f"{ch.name}[x={x}]"))
    return QuantumInstrument(tuple(components), name=f"{ch.name}|alice")


def _permute_input(k: ComplexMatrix, layout: SubsystemLayout, order: Sequence[str]) -> ComplexMatrix:
    if list(order) == list(layout.labels):
        return k
    perm = [layout.index(l) for l in order]
    t = k.reshape((k.shape[0],) + layout.dims).transpose([0] + [1 + p for p in perm])
    return t.reshape(k.shape[0], -1)

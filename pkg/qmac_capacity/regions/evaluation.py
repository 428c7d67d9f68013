"""
Single-letter rate evaluation for a two-sender channel.

The cq pentagon comes from sigma^{XBC} = sum_x p(x)|x><x| (x) N(phi_x (x) Psi),
the qq pentagon from sigma^{ABC} = (1 (x) N)(psi_1 (x) psi_2). Every state
involved is the output of a pure input, so all marginal entropies are taken
from singular values of the output purification instead of full density
matrices.
"""

from dataclasses import dataclass
import itertools
import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..errors import LayoutError, ValidationError
from ..quantum.channels import QuantumChannel
from ..quantum.information import binary_entropy, shannon_entropy
from ..quantum.linalg import SubsystemLayout, permute_vector
from ..quantum.states import CqEnsemble, PureState, maximally_entangled
from .geometry import Pentagon, RatePoint

logger = logging.getLogger(__name__)


class ChannelFrame:
    """Kraus stack and sender bookkeeping for fast repeated evaluation."""

    def __init__(self, ch: QuantumChannel):
        self.channel = ch
        self.kraus = np.stack(ch.kraus)
        self.alice = ch.input_layout.select(ch.sender_labels(0))
        self.bob = ch.input_layout.select(ch.sender_labels(1))
        senders = self.alice.labels + self.bob.labels
        if sorted(senders) != sorted(ch.input_layout.labels):
            raise LayoutError(f"Senders {senders} do not partition channel input {ch.input_layout.labels}")
        # axis permutation taking (alice..., bob...) to the channel's input order
        self._sender_order = [senders.index(l) for l in ch.input_layout.labels]

    @property
    def dout(self) -> int:
        return self.channel.dout

    def to_channel_order(self, t: np.ndarray, n_lead: int) -> np.ndarray:
        """Reshape (lead..., alice dims..., bob dims...) into (lead..., din)."""
        dims = self.alice.dims + self.bob.dims
        lead = t.shape[:n_lead]
        t = t.reshape(lead + dims)
        t = t.transpose(list(range(n_lead)) + [n_lead + p for p in self._sender_order])
        return t.reshape(lead + (self.channel.din,))

    def outputs(self, m: np.ndarray) -> np.ndarray:
        """(lead..., din) input amplitudes -> (lead..., kraus, dout) output purification."""
        return np.einsum("...i,koi->...ko", m, self.kraus)


def _entropy_of_rows(m: np.ndarray) -> float:
    return shannon_entropy(np.linalg.svd(m, compute_uv=False) ** 2)


def marginal_entropy_from_vectors(v: np.ndarray, keep: Sequence[int]) -> float:
    """
    Entropy of the marginal on axes ``keep`` of sum_e |v_e><v_e|

    Args:
        v: array of shape (env, d_1, ..., d_n); axis 0 indexes the purification
        keep: system axes (0-based, excluding the env axis) of the marginal
    """
    keep = [1 + a for a in keep]
    rest = [a for a in range(v.ndim) if a not in keep]
    d = int(np.prod([v.shape[a] for a in keep]))
    return _entropy_of_rows(np.transpose(v, keep + rest).reshape(d, -1))


# -- input coercion -------------------------------------------------------------

def factor_matrix(psi: PureState, own: SubsystemLayout) -> np.ndarray:
    """
    Amplitude matrix (reference, own) of a pure state whose trailing factors
    are a sender's channel input
    """
    if set(own.labels) <= set(psi.layout.labels):
        others = [l for l in psi.layout.labels if l not in own.labels]
        amps = permute_vector(psi.amplitudes, psi.layout, others + list(own.labels))
    elif psi.dim % own.total_dim == 0:
        amps = psi.amplitudes
    else:
        raise LayoutError(f"State on {psi.layout.labels} does not carry sender input {own.labels}")
    return amps.reshape(-1, own.total_dim)


def default_reference(own: SubsystemLayout, label: str = "B") -> PureState:
    """Maximally entangled state between a reference ``label`` and the sender's input."""
    d = own.total_dim
    phi = maximally_entangled(d, (label, "_in"))
    return PureState(phi.amplitudes, SubsystemLayout((d,) + own.dims, (label,) + own.labels))


def input_vector(psi: PureState, own: SubsystemLayout) -> np.ndarray:
    """Amplitudes of a state living exactly on a sender's input, in channel order."""
    if psi.dim != own.total_dim:
        raise LayoutError(f"Ensemble state of dimension {psi.dim} does not match sender input "
                          f"{own.labels} of dimension {own.total_dim}")
    return factor_matrix(psi, own)[0]


def _ensemble_arrays(frame: ChannelFrame, ens: CqEnsemble) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    states = np.stack([input_vector(s, frame.alice) for s in ens.states])
    reference = ens.reference or default_reference(frame.bob)
    return np.asarray(ens.probs, dtype=float), states, factor_matrix(reference, frame.bob)


# -- cq ------------------------------------------------------------------------------

@dataclass(frozen=True)
class CqEvaluation:
    """Raw information quantities of one cq input."""

    holevo_c: float        # I(X;C)
    holevo_bc: float       # I(X;BC)
    coherent_cx: float     # I_c(B>CX)
    coherent_c: float      # I_c(B>C)

    @property
    def rectangle(self) -> Pentagon:
        return Pentagon.rectangle(self.holevo_c, self.coherent_cx)

    @property
    def pentagon(self) -> Pentagon:
        return Pentagon(self.holevo_bc, self.coherent_cx, self.holevo_c + self.coherent_cx)

    def to_dict(self) -> Dict[str, float]:
        return {
            "I(X;C)": self.holevo_c,
            "I(X;BC)": self.holevo_bc,
            "I_c(B>CX)": self.coherent_cx,
            "I_c(B>C)": self.coherent_c,
        }


def evaluate_cq_arrays(frame: ChannelFrame, probs: np.ndarray, states: np.ndarray,
                       reference: np.ndarray) -> CqEvaluation:
    """
    Args:
        probs: (n,) distribution
        states: (n, d_alice) unit vectors
        reference: (d_ref, d_bob) amplitude matrix of Psi
    """
    joint = np.einsum("xa,rb->xrab", states, reference)
    joint = frame.to_channel_order(joint, 2)
    v = frame.outputs(joint)                      # (x, r, k, o)
    v = v.transpose(0, 2, 1, 3)                   # (x, k, r, o)

    h_c, h_bc = np.zeros(len(probs)), np.zeros(len(probs))
    for x in range(len(probs)):
        if probs[x] <= 0:
            continue
        h_c[x] = marginal_entropy_from_vectors(v[x], [1])
        h_bc[x] = marginal_entropy_from_vectors(v[x], [0, 1])
    weighted = (np.sqrt(np.clip(probs, 0.0, None))[:, None, None, None] * v)
    weighted = weighted.reshape((-1,) + v.shape[2:])
    avg_c = marginal_entropy_from_vectors(weighted, [1])
    avg_bc = marginal_entropy_from_vectors(weighted, [0, 1])
    mean_c, mean_bc = float(probs @ h_c), float(probs @ h_bc)
    return CqEvaluation(
        holevo_c=avg_c - mean_c,
        holevo_bc=avg_bc - mean_bc,
        coherent_cx=mean_c - mean_bc,
        coherent_c=avg_c - avg_bc,
    )


def evaluate_cq(ch: QuantumChannel, ens: CqEnsemble) -> CqEvaluation:
    frame = ChannelFrame(ch)
    return evaluate_cq_arrays(frame, *_ensemble_arrays(frame, ens))


def cq_point(ch: QuantumChannel, ens: CqEnsemble) -> Tuple[Pentagon, Pentagon]:
    """
    Rectangle (I(X;C), I_c(B>CX)) and pentagon
    (I(X;BC), I_c(B>CX), I(X;C) + I_c(B>CX)) of one cq input, unclamped

    ``ens.states`` live on Alice's input; ``ens.reference`` is Psi on
    B (x) Bob's input and defaults to the maximally entangled state.
    """
    result = evaluate_cq(ch, ens)
    logger.debug(f"cq point on '{ch.name}': {result.to_dict()}")
    return result.rectangle, result.pentagon


# -- qq ------------------------------------------------------------------------------

@dataclass(frozen=True)
class QqEvaluation:
    h_c: float
    h_ac: float
    h_bc: float
    h_abc: float

    @property
    def pentagon(self) -> Pentagon:
        """(I_c(A>BC), I_c(B>AC), I_c(AB>C))."""
        return Pentagon(self.h_bc - self.h_abc, self.h_ac - self.h_abc, self.h_c - self.h_abc)

    @property
    def rectangle(self) -> Pentagon:
        """(I_c(A>C), I_c(B>C))."""
        return Pentagon.rectangle(self.h_c - self.h_ac, self.h_c - self.h_bc)

    def corner_points(self) -> Tuple[RatePoint, RatePoint]:
        """(I_c(A>C), I_c(B>AC)) and (I_c(A>BC), I_c(B>C))."""
        return (RatePoint(self.h_c - self.h_ac, self.h_ac - self.h_abc),
                RatePoint(self.h_bc - self.h_abc, self.h_c - self.h_bc))


def evaluate_qq_arrays(frame: ChannelFrame, psi1: np.ndarray, psi2: np.ndarray) -> QqEvaluation:
    """
    Args:
        psi1: (d_A, d_alice) amplitude matrix
        psi2: (d_B, d_bob) amplitude matrix
    """
    joint = np.einsum("ai,bj->abij", psi1, psi2)
    joint = frame.to_channel_order(joint, 2)
    v = frame.outputs(joint)                      # (a, b, k, o)
    v = v.transpose(2, 0, 1, 3)                   # (k, a, b, o)
    return QqEvaluation(
        h_c=marginal_entropy_from_vectors(v, [2]),
        h_ac=marginal_entropy_from_vectors(v, [0, 2]),
        h_bc=marginal_entropy_from_vectors(v, [1, 2]),
        h_abc=marginal_entropy_from_vectors(v, [0, 1, 2]),
    )


def evaluate_qq(ch: QuantumChannel, psi1: PureState, psi2: PureState) -> QqEvaluation:
    frame = ChannelFrame(ch)
    return evaluate_qq_arrays(frame, factor_matrix(psi1, frame.alice), factor_matrix(psi2, frame.bob))


def qq_corners(ch: QuantumChannel, psi1: PureState, psi2: PureState) -> Pentagon:
    """Pentagon (I_c(A>BC), I_c(B>AC), I_c(AB>C)) on (1 (x) N)(psi1 (x) psi2), unclamped."""
    return evaluate_qq(ch, psi1, psi2).pentagon


def qq_rectangle(ch: QuantumChannel, psi1: PureState, psi2: PureState) -> Pentagon:
    """Rectangle R <= I_c(A>C), S <= I_c(B>C); contained in the qq pentagon."""
    return evaluate_qq(ch, psi1, psi2).rectangle


# -- simultaneous cq/qq bounds --------------------------------------------------

@dataclass(frozen=True)
class SimultaneousBounds:
    classical1: float        # I(X;C|Y)
    classical2: float        # I(Y;C|X)
    classical_sum: float     # I(XY;C)
    quantum1: float          # I_c(A>BCXY)
    quantum2: float          # I_c(B>ACXY)
    quantum_sum: float       # I_c(AB>CXY)

    def to_dict(self) -> Dict[str, float]:
        return {
            "I(X;C|Y)": self.classical1,
            "I(Y;C|X)": self.classical2,
            "I(XY;C)": self.classical_sum,
            "I_c(A>BCXY)": self.quantum1,
            "I_c(B>ACXY)": self.quantum2,
            "I_c(AB>CXY)": self.quantum_sum,
        }


def simultaneous_bounds(ch: QuantumChannel, ens_a: CqEnsemble, ens_b: CqEnsemble) -> SimultaneousBounds:
    """
    The six bounds of the simultaneous classical-quantum region on
    sigma^{XYABC} = sum p(x) q(y) |xy><xy| (x) (1 (x) N)(psi_x (x) phi_y)

    ``ens_a`` holds psi_x on A (x) Alice's input, ``ens_b`` phi_y on
    B (x) Bob's input; a state on the bare input gets a trivial reference.
    """
    frame = ChannelFrame(ch)
    psis = [factor_matrix(s, frame.alice) for s in ens_a.states]
    phis = [factor_matrix(s, frame.bob) for s in ens_b.states]
    p, q = np.asarray(ens_a.probs), np.asarray(ens_b.probs)

    nx, ny = len(psis), len(phis)
    h = {key: np.zeros((nx, ny)) for key in ("c", "ac", "bc", "abc")}
    outputs = {}
    for x in range(nx):
        for y in range(ny):
            joint = frame.to_channel_order(np.einsum("ai,bj->abij", psis[x], phis[y]), 2)
            v = frame.outputs(joint).transpose(2, 0, 1, 3)
            outputs[x, y] = v
            h["c"][x, y] = marginal_entropy_from_vectors(v, [2])
            h["ac"][x, y] = marginal_entropy_from_vectors(v, [0, 2])
            h["bc"][x, y] = marginal_entropy_from_vectors(v, [1, 2])
            h["abc"][x, y] = marginal_entropy_from_vectors(v, [0, 1, 2])

    def mixture_entropy(pairs) -> float:
        stacked = np.concatenate([np.sqrt(w) * outputs[x, y] for (x, y), w in pairs if w > 0])
        return marginal_entropy_from_vectors(stacked, [2])

    weights = np.outer(p, q)
    mean = {key: float(np.sum(weights * value)) for key, value in h.items()}
    h_c_all = mixture_entropy([((x, y), weights[x, y]) for x in range(nx) for y in range(ny)])
    h_c_given_y = sum(q[y] * mixture_entropy([((x, y), p[x]) for x in range(nx)]) for y in range(ny) if q[y] > 0)
    h_c_given_x = sum(p[x] * mixture_entropy([((x, y), q[y]) for y in range(ny)]) for x in range(nx) if p[x] > 0)
    return SimultaneousBounds(
        classical1=float(h_c_given_y - mean["c"]),
        classical2=float(h_c_given_x - mean["c"]),
        classical_sum=float(h_c_all - mean["c"]),
        quantum1=mean["bc"] - mean["abc"],
        quantum2=mean["ac"] - mean["abc"],
        quantum_sum=mean["c"] - mean["abc"],
    )


# -- constructions ---------------------------------------------------------------

def _suffixed(layout: SubsystemLayout, suffix: str) -> SubsystemLayout:
    return SubsystemLayout(layout.dims, tuple(f"{l}{suffix}" for l in layout.labels))


def merge_references(refs: Sequence[PureState], own: SubsystemLayout, label: str = "B") -> PureState:
    """
    Tensor pure states on (R_j, own) into one state on (label, own_1, ..., own_k)

    The reference factors R_1 ... R_k merge into the single factor ``label``;
    copy j of ``own`` takes the suffix ``_j``.
    """
    amps = factor_matrix(refs[0], own)
    for ref in refs[1:]:
        m = factor_matrix(ref, own)
        amps = np.einsum("ai,bj->abij", amps, m).reshape(amps.shape[0] * m.shape[0], -1)
    layout = SubsystemLayout((amps.shape[0],), (label,))
    for j in range(1, len(refs) + 1):
        layout = layout.concat(_suffixed(own, f"_{j}"))
    return PureState(amps.reshape(-1), layout)


def product_ensemble(*ensembles: CqEnsemble, bob_layout: Optional[SubsystemLayout] = None) -> CqEnsemble:
    """
    Product input {p(x) p'(y) ..., phi_x (x) phi'_y ...} with reference Psi (x) Psi' ...

    Copy j's labels take the suffix ``_j`` so the result feeds the matching
    tensor power, and the references merge into one factor B. Evaluated on
    N (x) N the rates are the sums of the single-letter rates, which is the
    time-sharing construction.
    """
    if len(ensembles) < 2:
        raise ValidationError("A product ensemble needs at least two factors")
    layout = _suffixed(ensembles[0].states[0].layout, "_1")
    for j, e in enumerate(ensembles[1:], start=2):
        layout = layout.concat(_suffixed(e.states[0].layout, f"_{j}"))
    probs, states = [], []
    for combo in itertools.product(*[list(zip(e.probs, e.states)) for e in ensembles]):
        probs.append(float(np.prod([p for p, _ in combo])))
        amps = combo[0][1].amplitudes
        for _, s in combo[1:]:
            amps = np.kron(amps, s.amplitudes)
        states.append(PureState(amps, layout))
    reference = None
    if any(e.reference is not None for e in ensembles):
        if bob_layout is None:
            raise ValidationError("A Bob input layout is needed to combine explicit references")
        refs = [e.reference or default_reference(bob_layout) for e in ensembles]
        reference = merge_references(refs, bob_layout, "B")
    return CqEnsemble(np.asarray(probs), tuple(states), reference)


def erasure_single_letter_bound(ens: CqEnsemble, d: int, k: int) -> Tuple[float, RatePoint]:
    """
    Rate pair dominating any k-letter cq input to the erasure MAC

    Each of Alice's k qubits selects erasure (|0>) or transfer (|1>);
    with q the average probability of erasure over the k positions,
    (r, S) <= k (H(q), max(0, 1 - 2q) log2 d).

    Returns:
        (q, bound point)
    """
    if k < 1 or d < 2:
        raise ValidationError(f"Need k >= 1 and d >= 2, got k={k}, d={d}")
    dim = 2 ** k
    erasure_probs = np.zeros(k)
    for p, state in zip(ens.probs, ens.states):
        if state.dim != dim:
            raise LayoutError(f"Ensemble state of dimension {state.dim}, expected {dim} for k={k}")
        weights = (np.abs(state.amplitudes) ** 2).reshape((2,) * k)
        for i in range(k):
            erasure_probs[i] += p * float(np.sum(np.take(weights, 0, axis=i)))
    q = float(np.mean(erasure_probs))
    bound = RatePoint(k * binary_entropy(min(max(q, 0.0), 1.0)), k * max(0.0, 1 - 2 * q) * np.log2(d))
    return q, bound

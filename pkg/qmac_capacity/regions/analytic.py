"""
Closed-form regions for the erasure MAC and the collective phase-flip channel
"""

import logging

import numpy as np

from ..errors import ValidationError
from ..quantum.information import binary_entropy
from .geometry import Pentagon, RateRegion

logger = logging.getLogger(__name__)


def erasure_boundary_point(d: int, q: float):
    """(H(q), (1 - 2q) log2 d)."""
    return binary_entropy(q), (1 - 2 * q) * np.log2(d)


def analytic_erasure_region(d: int, q_samples: int = 51) -> RateRegion:
    """
    cq region of erasure_mac(d): the union over q in [0, 1/2] of the
    rectangles r <= H(q), S <= (1 - 2q) log2 d
    """
    if d < 2:
        raise ValidationError(f"Erasure MAC needs d >= 2, got {d}")
    if q_samples < 2:
        raise ValidationError(f"Need at least 2 samples of q, got {q_samples}")
    qs = np.linspace(0.0, 0.5, q_samples)
    generators = [Pentagon.rectangle(*erasure_boundary_point(d, float(q))) for q in qs]
    return RateRegion.from_generators(
        generators, 1, {"channel": f"erasure_mac({d})", "kind": "cq", "source": "analytic",
                        "q": [float(q) for q in qs]})


def analytic_phase_flip_region(p: float) -> RateRegion:
    """qq region of collective_phase_flip(p): R <= 1, S <= 1, R + S <= 2 - H(p)."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"Phase-flip probability {p} outside [0, 1]")
    pentagon = Pentagon(1.0, 1.0, 2.0 - binary_entropy(p))
    return RateRegion.from_generators(
        [pentagon], 1, {"channel": f"phase_flip({p:g})", "kind": "qq", "source": "analytic"})

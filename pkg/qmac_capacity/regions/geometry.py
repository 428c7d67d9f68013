"""
Rate-region geometry: pentagons, unions of pentagons and their upper-right
frontier.

A Pentagon(a, b, c) is the set {(r, s): 0 <= r <= a, 0 <= s <= b, r + s <= c}.
A rectangle is the special case c = a + b.
"""

from dataclasses import dataclass, field
import logging
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import ValidationError

logger = logging.getLogger(__name__)

GEOMETRY_TOL = 1e-9

FRONTIER_COLUMNS = ["rate1", "rate2", "generator_id"]


@dataclass(frozen=True)
class RatePoint:
    """Rate pair in bits per channel use (classical or quantum, sender 1 then sender 2)."""

    rate1: float
    rate2: float

    def as_tuple(self) -> Tuple[float, float]:
        return (self.rate1, self.rate2)


PointLike = Union[RatePoint, Sequence[float]]


def _coords(point: PointLike) -> Tuple[float, float]:
    if isinstance(point, RatePoint):
        return point.as_tuple()
    r, s = point
    return float(r), float(s)


@dataclass(frozen=True)
class Pentagon:
    a_max: float
    b_max: float
    sum_max: float

    @classmethod
    def rectangle(cls, a_max: float, b_max: float) -> "Pentagon":
        return cls(float(a_max), float(b_max), float(a_max) + float(b_max))

    @property
    def is_rectangle(self) -> bool:
        return self.sum_max >= self.a_max + self.b_max - GEOMETRY_TOL

    def normalized(self) -> "Pentagon":
        """
        Canonical form of the achievable set: negative bounds clamp to 0 and
        no individual bound exceeds the sum bound.
        """
        a, b = max(self.a_max, 0.0), max(self.b_max, 0.0)
        c = min(max(self.sum_max, 0.0), a + b)
        return Pentagon(min(a, c), min(b, c), c)

    def corners(self) -> Tuple[RatePoint, RatePoint]:
        """(top corner, right corner) of the normalized pentagon."""
        p = self.normalized()
        s_top = min(p.b_max, p.sum_max)
        r_top = min(p.a_max, p.sum_max - s_top)
        r_right = min(p.a_max, p.sum_max)
        s_right = max(0.0, min(p.b_max, p.sum_max - r_right))
        return RatePoint(r_top, s_top), RatePoint(r_right, s_right)

    def vertices(self) -> List[RatePoint]:
        p = self.normalized()
        top, right = self.corners()
        return [RatePoint(0.0, 0.0), RatePoint(0.0, p.b_max), top, right, RatePoint(p.a_max, 0.0)]

    def upper(self, r: float) -> float:
        """Largest s with (r, s) in the pentagon, -inf outside [0, a_max]."""
        p = self.normalized()
        if r < -GEOMETRY_TOL or r > p.a_max + GEOMETRY_TOL:
            return float("-inf")
        return max(0.0, min(p.b_max, p.sum_max - r))

    def support(self, weight: float) -> float:
        """max of weight * r + (1 - weight) * s over the pentagon."""
        return max(weight * v.rate1 + (1 - weight) * v.rate2 for v in self.vertices())

    def contains(self, point: PointLike, tol: float = GEOMETRY_TOL) -> bool:
        r, s = _coords(point)
        p = self.normalized()
        return (r >= -tol and s >= -tol and r <= p.a_max + tol and s <= p.b_max + tol
                and r + s <= p.sum_max + tol)

    def scaled(self, factor: float) -> "Pentagon":
        return Pentagon(self.a_max * factor, self.b_max * factor, self.sum_max * factor)

    def to_dict(self) -> Dict[str, float]:
        return {"a_max": float(self.a_max), "b_max": float(self.b_max), "sum_max": float(self.sum_max)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Pentagon":
        try:
            return cls(float(data["a_max"]), float(data["b_max"]), float(data["sum_max"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"Malformed pentagon {data!r}: {e}") from e


def time_share(p0: Pentagon, p1: Pentagon, lam: float) -> Pentagon:
    """(1 - lam) p0 + lam p1, componentwise on the three bounds."""
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"Time-sharing weight {lam} outside [0, 1]")
    return Pentagon(
        (1 - lam) * p0.a_max + lam * p1.a_max,
        (1 - lam) * p0.b_max + lam * p1.b_max,
        (1 - lam) * p0.sum_max + lam * p1.sum_max,
    )


def _envelope(pentagons: Sequence[Pentagon], r: float, strict_after: bool) -> Tuple[float, int]:
    best, best_id = float("-inf"), -1
    for i, p in enumerate(pentagons):
        if strict_after and p.a_max <= r + GEOMETRY_TOL:
            continue
        value = p.upper(r)
        if value > best + GEOMETRY_TOL:
            best, best_id = value, i
    return best, best_id


def pareto_frontier(pentagons: Sequence[Pentagon]) -> Tuple[List[RatePoint], List[int]]:
    """
    Upper-right boundary of the union of pentagons

    Returns:
        (polyline sorted by first coordinate ascending, then second
        descending at vertical drops; index of the generator realizing
        each point)
    """
    gens = [p.normalized() for p in pentagons]
    if not gens:
        return [], []
    right_end = max(p.a_max for p in gens)

    candidates = {0.0, right_end}
    for p in gens:
        candidates.update((p.a_max, p.sum_max - p.b_max))
        for q in gens:
            candidates.add(p.sum_max - q.b_max)
    xs: List[float] = []
    for x in sorted(c for c in candidates if -GEOMETRY_TOL <= c <= right_end + GEOMETRY_TOL):
        x = min(max(x, 0.0), right_end)
        if not xs or x - xs[-1] > GEOMETRY_TOL:
            xs.append(x)

    points: List[RatePoint] = []
    ids: List[int] = []

    def push(r: float, s: float, gid: int) -> None:
        if points and abs(points[-1].rate1 - r) <= GEOMETRY_TOL and abs(points[-1].rate2 - s) <= GEOMETRY_TOL:
            return
        points.append(RatePoint(float(r), float(s)))
        ids.append(gid)

    for x in xs:
        left, left_id = _envelope(gens, x, strict_after=False)
        push(x, left, left_id)
        if x >= right_end - GEOMETRY_TOL:
            if left > GEOMETRY_TOL:
                push(x, 0.0, left_id)
            continue
        right, right_id = _envelope(gens, x, strict_after=True)
        if right < left - GEOMETRY_TOL:
            push(x, right, right_id)
    return points, ids


def region_contains(region: Union["RateRegion", Iterable[Pentagon]], point: PointLike,
                    tol: float = GEOMETRY_TOL) -> bool:
    """True when some generator contains ``point`` within ``tol``."""
    generators = region.generators if isinstance(region, RateRegion) else region
    return any(p.contains(point, tol) for p in generators)


@dataclass
class RateRegion:
    """Union of pentagons with its frontier, at regularization level ``k``."""

    generators: List[Pentagon]
    frontier: List[RatePoint] = field(default_factory=list)
    frontier_generators: List[int] = field(default_factory=list)
    k: int = 1
    metadata: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_generators(cls, generators: Iterable[Pentagon], k: int = 1,
                        metadata: Dict[str, Any] = None) -> "RateRegion":
        gens = [p.normalized() for p in generators]
        frontier, ids = pareto_frontier(gens)
        return cls(gens, frontier, ids, k, dict(metadata or {}))

    def contains(self, point: PointLike, tol: float = GEOMETRY_TOL) -> bool:
        return region_contains(self, point, tol)

    def support(self, weight: float) -> float:
        return max((p.support(weight) for p in self.generators), default=0.0)

    def union(self, other: "RateRegion") -> "RateRegion":
        return RateRegion.from_generators(self.generators + other.generators, self.k,
                                          {**other.metadata, **self.metadata})

    def max_sum_rate(self) -> float:
        return max((p.sum_max for p in self.generators), default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "generators": [p.to_dict() for p in self.generators],
            "frontier": [[pt.rate1, pt.rate2] for pt in self.frontier],
            "frontier_generators": list(self.frontier_generators),
            "k": self.k,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RateRegion":
        if not isinstance(data, dict) or "generators" not in data:
            raise ValidationError("Region document needs a 'generators' list")
        if not isinstance(data["generators"], list):
            raise ValidationError("'generators' must be a list")
        gens = [Pentagon.from_dict(g) for g in data["generators"]]
        try:
            k = int(data.get("k", 1))
        except (TypeError, ValueError) as e:
            raise ValidationError(f"Malformed regularization level: {e}") from e
        return cls.from_generators(gens, k, data.get("metadata") or {})

    def frontier_frame(self) -> pd.DataFrame:
        """Frontier as a table with columns rate1, rate2, generator_id."""
        return pd.DataFrame(
            {
                "rate1": [p.rate1 for p in self.frontier],
                "rate2": [p.rate2 for p in self.frontier],
                "generator_id": np.asarray(self.frontier_generators, dtype=int),
            },
            columns=FRONTIER_COLUMNS,
        )

"""
Tests for pentagon geometry, frontiers and region containment.
"""
import pytest

from qmac_capacity.errors import ValidationError
from qmac_capacity.regions.geometry import (
    FRONTIER_COLUMNS,
    Pentagon,
    RatePoint,
    RateRegion,
    pareto_frontier,
    region_contains,
    time_share,
)


def _tuples(points):
    return [pytest.approx(p.as_tuple()) for p in points]


class TestPentagon:
    """Test single-pentagon geometry."""

    def test_rectangle(self):
        """Test that a rectangle has sum bound a + b."""
        p = Pentagon.rectangle(1.0, 0.5)
        assert p.sum_max == 1.5
        assert p.is_rectangle

    def test_normalized_clamps_negative_bounds(self):
        """Test that negative bounds clamp to the empty region at the origin."""
        assert Pentagon(-0.2, -0.1, -0.3).normalized() == Pentagon(0.0, 0.0, 0.0)

    def test_normalized_caps_individual_bounds(self):
        """Test that individual bounds never exceed the sum bound."""
        assert Pentagon(1.0, 1.0, 0.5).normalized() == Pentagon(0.5, 0.5, 0.5)

    def test_normalized_caps_sum_bound(self):
        """Test that a loose sum bound is tightened to a + b."""
        assert Pentagon(0.3, 0.4, 5.0).normalized() == Pentagon(0.3, 0.4, 0.7)

    def test_corners(self):
        """Test the two corner points of a proper pentagon."""
        top, right = Pentagon(1.0, 1.0, 1.5).corners()
        assert top.as_tuple() == pytest.approx((0.5, 1.0))
        assert right.as_tuple() == pytest.approx((1.0, 0.5))

    def test_contains(self):
        """Test membership including the slanted face."""
        p = Pentagon(1.0, 1.0, 1.5)
        assert p.contains((0.75, 0.75))
        assert not p.contains((0.8, 0.8))
        assert not p.contains(RatePoint(-0.1, 0.0))
        assert p.contains((1.0 + 1e-10, 0.0))

    def test_support(self):
        """Test the support function at equal weights."""
        assert Pentagon(1.0, 1.0, 1.5).support(0.5) == pytest.approx(0.75)

    def test_round_trip_dict(self):
        """Test that to_dict and from_dict agree."""
        p = Pentagon(1.0, 0.25, 1.1)
        assert Pentagon.from_dict(p.to_dict()) == p

    def test_malformed_dict(self):
        """Test that a missing key raises ValidationError."""
        with pytest.raises(ValidationError):
            Pentagon.from_dict({"a_max": 1.0})


class TestTimeSharing:
    """Test convex combinations of pentagons."""

    def test_midpoint(self):
        """Test that lam = 1/2 averages the three bounds."""
        mid = time_share(Pentagon.rectangle(1.0, 0.0), Pentagon.rectangle(0.0, 1.0), 0.5)
        assert mid == Pentagon(0.5, 0.5, 1.0)

    def test_endpoints(self):
        """Test that lam = 0 and lam = 1 give the two inputs."""
        p0, p1 = Pentagon(1.0, 0.5, 1.2), Pentagon(0.2, 0.9, 1.0)
        assert time_share(p0, p1, 0.0) == p0
        assert time_share(p0, p1, 1.0) == p1

    def test_weight_range(self):
        """Test that lam outside [0, 1] is rejected."""
        with pytest.raises(ValidationError):
            time_share(Pentagon(1, 1, 1), Pentagon(1, 1, 1), 1.5)


class TestParetoFrontier:
    """Test the upper-right boundary of pentagon unions."""

    def test_empty(self):
        """Test that no generators give an empty frontier."""
        assert pareto_frontier([]) == ([], [])

    def test_single_rectangle(self):
        """Test that one rectangle gives its two outer edges."""
        points, ids = pareto_frontier([Pentagon.rectangle(1.0, 0.5)])
        assert [p.as_tuple() for p in points] == _tuples([RatePoint(0, 0.5), RatePoint(1, 0.5), RatePoint(1, 0)])
        assert ids == [0, 0, 0]

    def test_two_rectangles_staircase(self):
        """Test that two crossing rectangles give a staircase through both corners."""
        points, ids = pareto_frontier([Pentagon.rectangle(1.0, 0.5), Pentagon.rectangle(0.5, 1.0)])
        expected = [(0, 1), (0.5, 1), (0.5, 0.5), (1, 0.5), (1, 0)]
        assert [p.as_tuple() for p in points] == [pytest.approx(e) for e in expected]
        assert ids == [1, 1, 0, 0, 0]

    def test_pentagon_slanted_face(self):
        """Test that a pentagon contributes both corners of its slanted face."""
        points, _ = pareto_frontier([Pentagon(1.0, 1.0, 1.5)])
        expected = [(0, 1), (0.5, 1), (1, 0.5), (1, 0)]
        assert [p.as_tuple() for p in points] == [pytest.approx(e) for e in expected]

    def test_dominated_generator_ignored(self):
        """Test that a dominated rectangle never realizes a frontier point."""
        points, ids = pareto_frontier([Pentagon.rectangle(0.3, 0.3), Pentagon.rectangle(1.0, 1.0)])
        assert set(ids) == {1}
        assert points[0].as_tuple() == pytest.approx((0.0, 1.0))
        assert points[-1].as_tuple() == pytest.approx((1.0, 0.0))
        assert all(p.rate2 == pytest.approx(1.0) for p in points[:-1])

    def test_frontier_is_monotone(self):
        """Test that rate1 never decreases and rate2 never increases along the frontier."""
        gens = [Pentagon.rectangle(0.1 * i, 1.0 - 0.1 * i) for i in range(11)]
        points, _ = pareto_frontier(gens)
        for prev, nxt in zip(points, points[1:]):
            assert nxt.rate1 >= prev.rate1 - 1e-12
            assert nxt.rate2 <= prev.rate2 + 1e-12


class TestRateRegion:
    """Test region containers."""

    @pytest.fixture
    def staircase(self):
        return RateRegion.from_generators(
            [Pentagon.rectangle(1.0, 0.5), Pentagon.rectangle(0.5, 1.0)], metadata={"channel": "demo"}
        )

    def test_contains(self, staircase):
        """Test union membership on both steps and outside the staircase."""
        assert staircase.contains((0.9, 0.4))
        assert staircase.contains((0.4, 0.9))
        assert not staircase.contains((0.75, 0.75))
        assert region_contains(staircase.generators, (0.5, 1.0))

    def test_max_sum_rate(self, staircase):
        """Test that the max sum rate is the largest sum bound."""
        assert staircase.max_sum_rate() == pytest.approx(1.5)

    def test_support(self, staircase):
        """Test that the support picks the better generator per weight."""
        assert staircase.support(1.0) == pytest.approx(1.0)
        assert staircase.support(0.0) == pytest.approx(1.0)

    def test_union(self, staircase):
        """Test that a union adds generators and keeps metadata."""
        other = RateRegion.from_generators([Pentagon.rectangle(0.8, 0.8)])
        merged = staircase.union(other)
        assert len(merged.generators) == 3
        assert merged.metadata["channel"] == "demo"
        assert merged.contains((0.75, 0.75))

    def test_dict_round_trip(self, staircase):
        """Test that from_dict rebuilds the same frontier."""
        back = RateRegion.from_dict(staircase.to_dict())
        assert back.frontier == staircase.frontier
        assert back.frontier_generators == staircase.frontier_generators
        assert back.metadata == {"channel": "demo"}

    def test_from_dict_requires_generators(self):
        """Test that a document without generators is rejected."""
        with pytest.raises(ValidationError):
            RateRegion.from_dict({"frontier": []})

    def test_frontier_frame(self, staircase):
        """Test the tabular frontier view."""
        frame = staircase.frontier_frame()
        assert list(frame.columns) == FRONTIER_COLUMNS
        assert len(frame) == len(staircase.frontier)
        assert frame["generator_id"].tolist() == staircase.frontier_generators

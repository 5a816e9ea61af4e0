"""Tests for coordinate projections."""

import pytest

from tropembed.exceptions import NotInLambda
from tropembed.lattice import ElementRef
from tropembed.projections import PAFunction, projections
from tests.factories import EmbeddingFactory

TRIANGLE = {"a": (0, 0), "b": (1, 0), "c": (0, 1)}


@pytest.mark.unit
class TestProjections:
    """Tests for projections function."""

    def test_slopes_and_values(self, unit_triangle):
        """Test that slopes are the direction components."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        f, g = projections(complex_, map_)
        segments = [ElementRef("segment", i) for i in range(3)]
        assert [f.slopes[ref] for ref in segments] == [1, -1, 0]
        assert [g.slopes[ref] for ref in segments] == [0, 1, -1]
        assert f.values == {0: 0, 1: 1, 2: 0}
        assert all(f.lengths[ref] == 1 for ref in segments)

    def test_consistent(self, unit_triangle, pi_group):
        """Test that the coordinate functions are continuous with zero cycle sums."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        for function in projections(complex_, map_, pi_group):
            assert function.discontinuities(complex_) == []
            assert function.cycle_sums(complex_) == [0]

    def test_rays_not_projected(self, unit_triangle):
        """Test that balancing rays outside the graph image are ignored."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        f, _ = projections(complex_, map_)
        assert all(ref.kind == "segment" for ref in f.slopes)

    def test_outside_group(self, unit_triangle, pi_only_group):
        """Test that coordinates must be group elements."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        with pytest.raises(NotInLambda):
            projections(complex_, map_, pi_only_group)


@pytest.mark.unit
class TestPAFunction:
    """Tests for PAFunction class."""

    def test_discontinuity_detected(self, unit_triangle):
        """Test a vertex value that disagrees with the slopes."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        f, _ = projections(complex_, map_)
        broken = PAFunction("x", {0: 0, 1: 5, 2: 0}, f.slopes, f.lengths)
        assert broken.discontinuities(complex_) == [
            ElementRef("segment", 0),
            ElementRef("segment", 1),
        ]

    def test_cycle_sum_detected(self, unit_triangle):
        """Test slopes that do not close up around the triangle."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        f, _ = projections(complex_, map_)
        slopes = dict(f.slopes)
        slopes[ElementRef("segment", 0)] = 2
        sums = PAFunction("x", f.values, slopes, f.lengths).cycle_sums(complex_)
        assert len(sums) == 1
        assert abs(sums[0]) == 1

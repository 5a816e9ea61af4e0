"""Tests for SVG rendering."""

from fractions import Fraction

import pytest

from tropembed.lattice import (
    SEGMENT,
    BalancedComplex,
    ElementRef,
    EmbeddingMap,
    GadgetRecord,
    RationalPoint,
)
from tropembed.render import RenderOptions, render_svg
from tests.factories import EmbeddingFactory, SegmentFactory

TRIANGLE = {"a": (0, 0), "b": (1, 0), "c": (0, 1)}


def _cross() -> tuple[BalancedComplex, EmbeddingMap]:
    complex_ = BalancedComplex.from_elements(
        [SegmentFactory.create(end=(2, 2)), SegmentFactory.create(start=(0, 2), end=(2, 0))]
    )
    chains = {"p": (ElementRef(SEGMENT, 0),), "q": (ElementRef(SEGMENT, 1),)}
    return complex_, EmbeddingMap(chains, {})


@pytest.mark.unit
class TestRenderSvg:
    """Tests for render_svg function."""

    def test_document(self, unit_triangle):
        """Test that the output is an SVG document with every vertex drawn."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        svg = render_svg(complex_, map_)
        assert svg.lstrip().startswith("<?xml") or svg.lstrip().startswith("<svg")
        assert "<svg" in svg
        assert svg.count("<circle") == len(complex_.vertices)

    def test_deterministic(self, unit_triangle):
        """Test that equal inputs give identical pictures."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        assert render_svg(complex_, map_) == render_svg(complex_, map_)

    def test_weight_labels(self, unit_triangle):
        """Test that weights above one are written on the picture."""
        plain, _ = EmbeddingFactory.create(unit_triangle, TRIANGLE, balanced=False)
        heavy, _ = EmbeddingFactory.create(
            unit_triangle, TRIANGLE, balanced=False, weights={"ab": 2}
        )
        assert "<text" not in render_svg(plain)
        assert "<text" in render_svg(heavy)

    def test_overlay_and_rays(self, unit_triangle):
        """Test the colors of edge images and of balancing rays."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        options = RenderOptions()
        svg = render_svg(complex_, map_, options)
        assert options.overlay_stroke in svg
        assert options.ray_stroke in svg
        without = render_svg(complex_, map_, RenderOptions(overlay=False))
        assert options.overlay_stroke not in without

    def test_crossing_marks(self):
        """Test that crossings between edge images are circled."""
        complex_, map_ = _cross()
        options = RenderOptions()
        assert options.crossing_stroke in render_svg(complex_, map_, options)
        unmarked = render_svg(complex_, map_, RenderOptions(mark_crossings=False))
        assert options.crossing_stroke not in unmarked

    def test_corridors(self):
        """Test that creneau corridors are outlined on request."""
        segment = SegmentFactory.create(end=(3, 0))
        complex_ = BalancedComplex.from_elements([segment])
        gadget = GadgetRecord("e", segment.start, segment.end, Fraction(1, 2), Fraction(4), 2)
        map_ = EmbeddingMap({"e": (ElementRef(SEGMENT, 0),)}, {}, (gadget,))
        options = RenderOptions(show_corridors=True)
        assert options.corridor_fill in render_svg(complex_, map_, options)
        assert options.corridor_fill not in render_svg(complex_, map_)

    def test_single_point(self):
        """Test a complex with one vertex and no extent."""
        complex_ = BalancedComplex((RationalPoint(0, 0),))
        assert "<circle" in render_svg(complex_)

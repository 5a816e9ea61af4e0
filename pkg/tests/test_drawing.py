"""Tests for straight-line drawings and crossing orthogonalization."""

from fractions import Fraction

import networkx as nx
import pytest

from tropembed.drawing import (
    Drawing,
    box_angle,
    box_point,
    check_plane,
    crossing_alternates,
    cyclic_order,
    orthogonalize_crossings,
    rationalize_vertices,
    straight_line_draw,
)
from tropembed.exceptions import NotPlanar, PerturbationFailed
from tropembed.lattice import PrimitiveVector, RationalPoint, find_crossings
from tropembed.models import DrawingMethod
from tropembed.planarization import crossing_number_exact


def _cross_drawing() -> Drawing:
    """Two edges ab and cd crossing at a dummy node x = (1, 1)."""
    positions = {
        "a": RationalPoint(0, 0),
        "b": RationalPoint(2, 2),
        "c": RationalPoint(0, 2),
        "d": RationalPoint(2, 0),
        "x": RationalPoint(1, 1),
    }
    paths = {"ab": ("a", "x", "b"), "cd": ("c", "x", "d")}
    return Drawing(positions, paths, {"x": ("ab", "cd")})


def _outer_corner_drawing() -> Drawing:
    """A crossing at x = (8, 0) whose four neighbors all lie to its west."""
    positions = {
        "a": RationalPoint(6, 2),
        "c": RationalPoint(5, 1),
        "b": RationalPoint(5, -1),
        "d": RationalPoint(6, -2),
        "x": RationalPoint(8, 0),
    }
    paths = {"ab": ("a", "x", "b"), "cd": ("c", "x", "d")}
    return Drawing(positions, paths, {"x": ("ab", "cd")})


@pytest.mark.unit
class TestCyclicOrder:
    """Tests for cyclic_order function."""

    def test_counter_clockwise_from_east(self):
        """Test the exact angular order."""
        around = {
            "s": RationalPoint(0, -1),
            "w": RationalPoint(-1, 0),
            "ne": RationalPoint(1, 1),
            "n": RationalPoint(0, 1),
            "e": RationalPoint(1, 0),
        }
        assert cyclic_order(RationalPoint(0, 0), around) == ["e", "ne", "n", "w", "s"]


@pytest.mark.unit
class TestDrawing:
    """Tests for Drawing class."""

    def test_segments_and_crossings(self):
        """Test keyed segments of a drawing with a crossing node."""
        drawing = _cross_drawing()
        keys = [key for key, _ in drawing.segments()]
        assert keys == [("ab", 0), ("ab", 1), ("cd", 0), ("cd", 1)]
        assert drawing.crossing_count() == 0
        assert drawing.vertices == ["a", "b", "c", "d", "x"]
        assert len(drawing.edge_segments("cd")) == 2

    def test_crossing_without_node(self):
        """Test that straight crossing edges are counted."""
        positions = {n: p for n, p in _cross_drawing().positions.items() if n != "x"}
        drawing = Drawing(positions, {"ab": ("a", "b"), "cd": ("c", "d")})
        assert drawing.crossing_count() == 1
        with pytest.raises(NotPlanar):
            check_plane(drawing)

    def test_scaled_and_bounding_box(self):
        """Test scaling positions exactly."""
        drawing = _cross_drawing().scaled(Fraction(1, 2))
        assert drawing.positions["b"] == RationalPoint(1, 1)
        assert drawing.bounding_box() == (0, 0, 1, 1)

    def test_alternation(self):
        """Test alternating and touching strands at a dummy."""
        drawing = _cross_drawing()
        assert crossing_alternates(drawing, "x")
        check_plane(drawing)
        touching = Drawing(
            drawing.positions, {"ac": ("a", "x", "c"), "db": ("d", "x", "b")}, {"x": ("ac", "db")}
        )
        assert not crossing_alternates(touching, "x")
        with pytest.raises(NotPlanar, match="touch"):
            check_plane(touching)

    def test_repeated_position(self):
        """Test that two nodes at one point are rejected."""
        drawing = Drawing(
            {"a": RationalPoint(0, 0), "b": RationalPoint(0, 0)}, {"ab": ("a", "b")}
        )
        with pytest.raises(NotPlanar):
            check_plane(drawing)


@pytest.mark.unit
class TestStraightLineDraw:
    """Tests for straight_line_draw function."""

    @pytest.mark.parametrize("method", [DrawingMethod.GRID, DrawingMethod.BARYCENTRIC])
    def test_planar_graph(self, method):
        """Test drawing a planar graph without crossings."""
        _, planarization = crossing_number_exact(nx.complete_graph(4))
        drawing = straight_line_draw(planarization, method)
        assert drawing.crossing_count() == 0
        assert len(set(drawing.positions.values())) == 4

    def test_grid_coordinates_are_integers(self):
        """Test that grid drawings land on integer points."""
        _, planarization = crossing_number_exact(nx.complete_graph(5))
        drawing = straight_line_draw(planarization, "grid")
        for point in drawing.positions.values():
            assert point.x.denominator == 1
            assert point.y.denominator == 1
        assert list(drawing.crossing_nodes) == ["#x0"]

    def test_barycentric_outer_triangle(self):
        """Test that the Tutte drawing pins three nodes to the unit triangle."""
        _, planarization = crossing_number_exact(nx.complete_graph(5))
        drawing = straight_line_draw(planarization, DrawingMethod.BARYCENTRIC)
        corners = {RationalPoint(0, 0), RationalPoint(1, 0), RationalPoint(0, 1)}
        assert corners <= set(drawing.positions.values())

    def test_small_graph(self):
        """Test a graph with a single edge."""
        _, planarization = crossing_number_exact(nx.path_graph(2))
        drawing = straight_line_draw(planarization)
        assert len(drawing.segments()) == 1


@pytest.mark.unit
class TestOrthogonalizeCrossings:
    """Tests for orthogonalize_crossings function."""

    def test_axis_parallel_crossing(self):
        """Test that the strands cross along (1, 0) and (0, 1)."""
        result = orthogonalize_crossings(_cross_drawing())
        assert not result.crossing_nodes
        assert result.crossing_points == {"x": RationalPoint(1, 1)}
        assert "x" not in result.positions
        records = result.segments()
        assert result.crossing_count() == 1
        directions = {
            key[0]: segment.direction
            for key, segment in records
            if segment.start.x < 1 < segment.end.x or segment.start.y > 1 > segment.end.y
        }
        assert directions["ab"] == PrimitiveVector(1, 0)
        assert directions["cd"] == PrimitiveVector(0, -1)

    def test_vertices_stay_put(self):
        """Test that only the crossing neighborhood changes."""
        drawing = _cross_drawing()
        result = orthogonalize_crossings(drawing, radius=Fraction(1, 2))
        for node in "abcd":
            assert result.positions[node] == drawing.positions[node]
        assert result.paths["ab"][0] == "a"
        assert result.paths["ab"][-1] == "b"

    def test_no_crossings(self):
        """Test that plane drawings are returned unchanged."""
        drawing = Drawing({"a": RationalPoint(0, 0), "b": RationalPoint(1, 0)}, {"ab": ("a", "b")})
        assert orthogonalize_crossings(drawing) is drawing

    def test_planarized_complete_graph(self):
        """Test rerouting the crossing of a drawn K5."""
        _, planarization = crossing_number_exact(nx.complete_graph(5))
        drawing = straight_line_draw(planarization)
        result = orthogonalize_crossings(drawing)
        assert result.crossing_count() == 1
        assert list(result.crossing_points) == ["#x0"]

    @pytest.mark.parametrize("method", list(DrawingMethod))
    def test_planarized_complete_graph_is_orthogonal(self, method):
        """Test that the K5 crossing ends up between the two axis directions."""
        _, planarization = crossing_number_exact(nx.complete_graph(5))
        result = orthogonalize_crossings(straight_line_draw(planarization, method))
        (record,) = find_crossings(result.segments())
        segments = dict(result.segments())
        directions = {segments[record.first].direction, segments[record.second].direction}
        assert {abs(d.m) for d in directions} == {0, 1}

    def test_crossing_on_outer_face(self):
        """Test a crossing whose four fragments all leave to the same side."""
        drawing = _outer_corner_drawing()
        result = orthogonalize_crossings(drawing)
        (record,) = find_crossings(result.segments())
        assert record.point == RationalPoint(8, 0)
        assert result.crossing_points == {"x": RationalPoint(8, 0)}
        segments = dict(result.segments())
        directions = {segments[record.first].direction, segments[record.second].direction}
        assert directions == {PrimitiveVector(-1, 0), PrimitiveVector(0, -1)}
        for node, point in result.positions.items():
            if node in "abcd":
                assert point == drawing.positions[node]
            else:
                assert max(abs(point.x - 8), abs(point.y)) <= Fraction(1, 4)

    def test_radius_follows_nearest_node(self):
        """Test that the box is at most half the distance to the closest node."""
        drawing = _cross_drawing()
        drawing.positions["a"] = RationalPoint(Fraction(7, 10), Fraction(7, 10))
        result = orthogonalize_crossings(drawing, radius=Fraction(1))
        assert result.crossing_count() == 1
        for node, point in result.positions.items():
            if node not in "abcd":
                assert max(abs(point.x - 1), abs(point.y - 1)) <= Fraction(3, 20)


@pytest.mark.unit
class TestBoxAngle:
    """Tests for box_angle and box_point functions."""

    @pytest.mark.parametrize(
        "vector,expected",
        [
            ((1, 0), 0),
            ((2, 2), 1),
            ((0, 5), 2),
            ((-1, 1), 3),
            ((-3, 0), 4),
            ((-3, 1), Fraction(11, 3)),
            ((-1, -1), 5),
            ((0, -1), 6),
            ((1, -1), 7),
            ((4, -1), Fraction(31, 4)),
        ],
    )
    def test_angles(self, vector, expected):
        """Test positions on the unit square, counter-clockwise from east."""
        assert box_angle(Fraction(vector[0]), Fraction(vector[1])) == expected

    @pytest.mark.parametrize("angle", [0, Fraction(1, 2), 1, 3, Fraction(11, 3), 5, 7])
    def test_point_inverts_angle(self, angle):
        """Test that the point at an angle has that angle."""
        center = RationalPoint(1, 1)
        point = box_point(center, Fraction(1, 2), Fraction(angle))
        assert max(abs(point.x - 1), abs(point.y - 1)) == Fraction(1, 2)
        assert box_angle(point.x - 1, point.y - 1) == angle

    def test_angles_wrap(self):
        """Test that angles are taken modulo 8."""
        center = RationalPoint(0, 0)
        assert box_point(center, Fraction(1), Fraction(-2)) == RationalPoint(0, -1)
        assert box_point(center, Fraction(1), Fraction(10)) == RationalPoint(0, 1)


@pytest.mark.unit
class TestRationalizeVertices:
    """Tests for rationalize_vertices function."""

    def test_rational_input_unchanged(self):
        """Test that exact input is kept as is."""
        drawing = rationalize_vertices(
            {"a": (0, 0), "b": (Fraction(1, 3), 1)}, {"ab": ("a", "b")}
        )
        assert drawing.positions["b"] == RationalPoint(Fraction(1, 3), 1)

    def test_floats_snapped(self):
        """Test snapping floats to a dyadic grid with the same crossings."""
        positions = {"a": (0.0, 0.0), "b": (1.1, 1.3), "c": (0.1, 1.2), "d": (1.05, 0.2)}
        drawing = rationalize_vertices(positions, {"ab": ("a", "b"), "cd": ("c", "d")})
        assert drawing.crossing_count() == 1
        for point in drawing.positions.values():
            assert point.x.denominator & (point.x.denominator - 1) == 0

    def test_decimal_strings(self):
        """Test that decimal strings are snapped like floats."""
        drawing = rationalize_vertices({"a": ("0", "0"), "b": ("0.5", "0.25")}, {"ab": ("a", "b")})
        assert drawing.positions["b"].x == Fraction(1, 2)
        assert drawing.crossing_count() == 0

    def test_degenerate_input(self):
        """Test that overlapping input cannot be rationalized."""
        positions = {"a": (0.0, 0.0), "b": (2.0, 0.0), "c": (1.0, 0.0), "d": (3.0, 0.0)}
        with pytest.raises(PerturbationFailed):
            rationalize_vertices(positions, {"ab": ("a", "b"), "cd": ("c", "d")})

"""Tests for graph and complex documents."""

import json
from fractions import Fraction

import pytest

from tropembed.balancer import embed_isometric
from tropembed.exceptions import ParseError, SchemaError
from tropembed.lattice import BalancedComplex, EmbeddingMap, GadgetRecord, RationalPoint
from tropembed.metric_graph import INFINITY, MetricGraph, ModificationTrace, Subdivide
from tropembed.models import EmbeddingConfig, FailureCategory, Mode, Report
from tropembed.serialization import (
    COMPLEX_FORMAT,
    decode_scalar,
    emit_complex,
    emit_graph,
    encode_scalar,
    load_graph,
    parse_complex,
    parse_graph,
)
from tests.factories import PI_ENCLOSURE, EmbeddingFactory, GraphFactory

TRIANGLE = {"a": (0, 0), "b": (1, 0), "c": (0, 1)}


def _lambda_graph_data() -> dict:
    return {
        "vertices": ["a", "b"],
        "edges": [{"id": "e", "u": "a", "v": "b"}],
        "lambda": {
            "generators": [
                {"label": "1", "exact": "1"},
                {"label": "pi", "enclosure": PI_ENCLOSURE},
            ],
            "lengths_in_lambda": {"e": {"pi": "1"}},
        },
    }


@pytest.mark.unit
class TestScalars:
    """Tests for scalar encoding."""

    def test_encode(self, pi_group):
        """Test rationals, infinity and group elements."""
        assert encode_scalar(Fraction(6, 4)) == "3/2"
        assert encode_scalar(INFINITY) == "inf"
        assert encode_scalar(pi_group.generator("pi") / 3 + 1) == {"1": "1", "pi": "1/3"}

    def test_decode(self, pi_group):
        """Test decoding both scalar forms."""
        assert decode_scalar("-2/6", None, "x") == Fraction(-1, 3)
        assert decode_scalar({"pi": "2"}, pi_group, "x") == 2 * pi_group.generator("pi")

    def test_decode_needs_group(self):
        """Test that coefficient maps need a declared group."""
        with pytest.raises(SchemaError, match="without a value group"):
            decode_scalar({"pi": "1"}, None, "x")

    def test_decode_unknown_label(self, pi_group):
        """Test that unknown generator labels are schema errors."""
        with pytest.raises(SchemaError) as info:
            decode_scalar({"e": "1"}, pi_group, "edges[0].length")
        assert info.value.field == "edges[0].length"


@pytest.mark.unit
class TestGraphDocuments:
    """Tests for graph files."""

    def test_parse(self, triangle_data, unit_triangle):
        """Test parsing a graph document."""
        graph = parse_graph(json.dumps(triangle_data))
        assert graph.same_as(unit_triangle)

    def test_parse_infinite_edge(self):
        """Test that "inf" lengths make infinite edges."""
        text = json.dumps(
            {"vertices": ["a", "z"], "edges": [{"id": "leg", "u": "a", "v": "z", "length": "inf"}]}
        )
        graph = parse_graph(text)
        assert graph.infinite_vertices == {"z"}
        assert graph.edge("leg").length is INFINITY

    def test_emit_then_parse(self, legged_triangle):
        """Test that emitted graphs parse back to the same graph."""
        text = emit_graph(legged_triangle)
        assert parse_graph(text).same_as(legged_triangle)
        assert '"infinite_vertices"' in text

    def test_lambda_lengths(self):
        """Test lengths given as value group elements."""
        graph, group = load_graph(json.dumps(_lambda_graph_data()))
        assert group is not None
        assert group.labels == ("1", "pi")
        assert graph.edge("e").length == group.generator("pi")
        again, _ = load_graph(emit_graph(graph, group))
        assert again.same_as(graph)

    def test_lambda_lengths_need_group(self):
        """Test that group lengths cannot be written without the group."""
        graph, _ = load_graph(json.dumps(_lambda_graph_data()))
        with pytest.raises(ValueError):
            emit_graph(graph)

    def test_float_length_rejected(self, triangle_data):
        """Test that numeric lengths are parse errors naming the field."""
        triangle_data["edges"][1]["length"] = 1.5
        with pytest.raises(ParseError) as info:
            parse_graph(json.dumps(triangle_data))
        assert info.value.field == "edges[1].length"

    def test_missing_field(self, triangle_data):
        """Test that a missing field is a schema error."""
        del triangle_data["edges"][0]["u"]
        with pytest.raises(SchemaError) as info:
            parse_graph(json.dumps(triangle_data))
        assert info.value.field == "edges[0].u"

    def test_invalid_graph(self, triangle_data):
        """Test that graph invariants surface as schema errors."""
        triangle_data["edges"][0]["v"] = "zz"
        with pytest.raises(SchemaError, match="unknown endpoint"):
            parse_graph(json.dumps(triangle_data))

    def test_invalid_group(self):
        """Test that an inconsistent value group is a schema error."""
        data = _lambda_graph_data()
        data["lambda"]["generators"] = []
        with pytest.raises(SchemaError) as info:
            load_graph(json.dumps(data))
        assert info.value.field == "lambda"

    def test_malformed_json(self):
        """Test that syntax errors report their position."""
        with pytest.raises(ParseError) as info:
            parse_graph('{"vertices": [}')
        assert info.value.line == 1

    def test_not_an_object(self):
        """Test that the document must be an object."""
        with pytest.raises(ParseError):
            parse_graph("[]")


@pytest.mark.unit
class TestComplexDocuments:
    """Tests for complex files."""

    def test_round_trip(self, unit_triangle):
        """Test that a complex file restores complex, map, report and graphs."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        report = Report(crossings_expected=0)
        report.add(FailureCategory.GEOMETRY, "segment:0", "example")
        trace = ModificationTrace((Subdivide("ab", (Fraction(1, 2), Fraction(1, 2)), "m"),))
        text = emit_complex(
            complex_, map_, report, source=unit_triangle, graph=unit_triangle, trace=trace
        )
        document = parse_complex(text)
        assert document.complex == complex_
        assert document.map == map_
        assert document.report == report
        assert document.group is None
        assert document.graph.same_as(unit_triangle)
        assert document.trace == trace

    def test_deterministic(self, unit_triangle):
        """Test that equal inputs give identical text."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        first = emit_complex(complex_, map_, Report())
        second = emit_complex(complex_, map_, Report())
        assert first == second
        assert json.loads(first)["format"] == COMPLEX_FORMAT

    def test_no_floats(self, unit_triangle):
        """Test that coordinates are written as rational strings."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        data = json.loads(emit_complex(complex_, map_, Report()))
        assert data["vertices"][1] == ["1", "0"]

    def test_group_coordinates(self, pi_group):
        """Test a complex whose coordinates are value group elements."""
        pi = pi_group.generator("pi")
        graph = GraphFactory.create(edges=[("e", "u", "v", pi)])
        complex_, map_ = EmbeddingFactory.create(graph, {"u": (0, 0), "v": (pi, 0)})
        gadget = GadgetRecord("e", RationalPoint(0, 0), RationalPoint(pi, 0), pi / 6, pi, 2)
        map_ = EmbeddingMap(map_.edge_chains, map_.vertex_images, (gadget,))
        text = emit_complex(complex_, map_, Report(), group=pi_group, graph=graph)
        document = parse_complex(text)
        assert document.group == pi_group
        assert document.complex.vertices[1] == RationalPoint(pi, 0)
        assert document.map.gadgets == (gadget,)
        assert document.graph.edge("e").length == pi

    def test_emit_is_fixed_point(self, pi_group):
        """Test that re-emitting a parsed pipeline result gives the same bytes."""
        pi = pi_group.generator("pi")
        graph = GraphFactory.with_legs(
            MetricGraph.build(["a", "b"], [("ab", "a", "b", pi), ("loop", "b", "b", 3)]), ["a"]
        )
        result = embed_isometric(graph, EmbeddingConfig(mode=Mode.LAMBDA), pi_group)
        assert len(result.trace) == 2

        def emit(document):
            return emit_complex(
                document.complex,
                document.map,
                document.report,
                group=document.group,
                source=document.source,
                graph=document.graph,
                trace=document.trace,
            )

        first = emit(result)
        second = emit(parse_complex(first))
        assert second == first
        assert emit(parse_complex(second)) == first

    def test_wrong_format(self):
        """Test that other JSON documents are rejected."""
        with pytest.raises(SchemaError) as info:
            parse_complex('{"format": "something-else"}')
        assert info.value.field == "format"

    def test_missing_vertex(self, unit_triangle):
        """Test a segment that refers to a vertex that does not exist."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        data = json.loads(emit_complex(complex_, map_, Report()))
        data["segments"][0]["end"] = 99
        with pytest.raises(SchemaError, match="does not exist"):
            parse_complex(json.dumps(data))

    def test_non_primitive_ray(self, unit_triangle):
        """Test that ray directions must be primitive."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        data = json.loads(emit_complex(complex_, map_, Report()))
        data["rays"][0]["direction"] = [2, 2]
        with pytest.raises(SchemaError, match="not primitive"):
            parse_complex(json.dumps(data))

    def test_malformed_reference(self, unit_triangle):
        """Test that chain entries must be element references."""
        complex_, map_ = EmbeddingFactory.create(unit_triangle, TRIANGLE)
        data = json.loads(emit_complex(complex_, map_, Report()))
        data["map"]["edges"]["ab"] = ["edge:0"]
        with pytest.raises(ParseError):
            parse_complex(json.dumps(data))

    def test_empty_complex(self):
        """Test a minimal document."""
        document = parse_complex(emit_complex(BalancedComplex(()), EmbeddingMap({}, {}), Report()))
        assert document.complex.vertices == ()
        assert document.source is None

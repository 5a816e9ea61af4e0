"""Integration tests for the full embedding pipeline."""

import random
from fractions import Fraction

import pytest

from tropembed.audit import verify
from tropembed.balancer import embed_isometric
from tropembed.lattice import LatticeRay, is_balanced, tropical_length
from tropembed.metric_graph import MetricGraph
from tropembed.models import EmbeddingConfig, Mode
from tropembed.projections import projections
from tropembed.serialization import emit_complex, parse_complex
from tests.factories import GraphFactory


def _chain_length(complex_, chain, start=Fraction(0)):
    total = start
    for ref in chain:
        total = total + tropical_length(complex_.element(ref))
    return total


def _assert_isometric(result, graph):
    for edge in graph.finite_edges:
        chain = result.map.edge_chains[edge.id]
        assert _chain_length(result.complex, chain) == edge.length


@pytest.mark.integration
class TestRationalPipeline:
    """End-to-end embeddings with rational coordinates."""

    def test_legged_triangle(self, legged_triangle):
        """Test the triangle with three legs: planar, balanced, unit lengths."""
        result = embed_isometric(legged_triangle)
        complex_, map_, report = result
        assert report.passed
        assert report.crossings_on_gamma == 0
        assert is_balanced(complex_)
        _assert_isometric(result, legged_triangle)
        for leg in ("a_leg", "b_leg", "c_leg"):
            assert isinstance(complex_.element(map_.edge_chains[leg][-1]), LatticeRay)

    def test_complete_five(self, complete_five):
        """Test that K5 is embedded with exactly one crossing."""
        result = embed_isometric(complete_five)
        assert result.report.passed
        assert result.report.crossings_on_gamma == 1
        assert result.report.crossings_expected == 1
        assert result.report.crossings_exact_flag
        assert result.report.orthogonal_crossings
        _assert_isometric(result, complete_five)

    def test_utility_graph(self, utility_graph):
        """Test K3,3 with one crossing."""
        result = embed_isometric(utility_graph)
        assert result.report.passed
        assert result.report.crossings_on_gamma == 1

    def test_single_edge(self):
        """Test a single edge of length 5."""
        graph = GraphFactory.create(edges=[("e", "u", "v", 5)])
        result = embed_isometric(graph)
        assert result.report.passed
        assert _chain_length(result.complex, result.map.edge_chains["e"]) == 5
        assert result.map.vertex_images["u"] != result.map.vertex_images["v"]

    @pytest.mark.parametrize(
        "edges",
        [
            [("e1", "u", "v", "10/3"), ("e2", "v", "w", "1/7"), ("e3", "w", "u", 40)],
            [("e1", "u", "v", "1/100"), ("e2", "v", "w", 1), ("e3", "w", "x", 2)],
        ],
    )
    def test_planar_inputs(self, edges):
        """Test that planar graphs with uneven lengths have no crossings."""
        vertices = sorted({v for _, a, b, _ in edges for v in (a, b)})
        graph = MetricGraph.build(vertices, edges)
        result = embed_isometric(graph)
        assert result.report.passed
        assert result.report.crossings_on_gamma == 0
        _assert_isometric(result, graph)

    def test_loop_and_parallel_edges(self):
        """Test that non-simple graphs are normalized and the trace replays."""
        graph = MetricGraph.build(
            ["u", "v"], [("loop", "u", "u", 3), ("e1", "u", "v", 1), ("e2", "u", "v", 2)]
        )
        result = embed_isometric(graph)
        assert result.report.passed
        assert result.report.modification_replayed is True
        assert len(result.trace) == 3
        assert result.graph.is_simple()

    def test_heuristic(self, complete_five):
        """Test that the heuristic count is flagged as an upper bound."""
        result = embed_isometric(complete_five, EmbeddingConfig(exact_crossings=False, seed=7))
        assert result.report.passed
        assert not result.report.crossings_exact_flag
        assert result.report.crossings_on_gamma >= 1

    def test_epsilon_cap(self, unit_triangle):
        """Test that gadget corridors respect the requested cap."""
        result = embed_isometric(unit_triangle, EmbeddingConfig(epsilon=Fraction(1, 1000)))
        assert result.report.passed
        for gadget in result.map.gadgets:
            assert gadget.epsilon <= Fraction(1, 1000) * result.scale

    def test_reverified_from_file(self, complete_four):
        """Test that a stored complex passes verification again."""
        result = embed_isometric(complete_four)
        text = emit_complex(
            result.complex,
            result.map,
            result.report,
            source=result.source,
            graph=result.graph,
            trace=result.trace,
        )
        document = parse_complex(text)
        report = verify(
            document.complex,
            document.map,
            document.graph,
            expected_crossings=0,
            source=document.source,
            trace=document.trace,
        )
        assert report.passed


@pytest.mark.integration
class TestLambdaPipeline:
    """End-to-end embeddings with value group coordinates."""

    def test_rationals(self, legged_triangle):
        """Test lambda mode over the rationals."""
        result = embed_isometric(legged_triangle, EmbeddingConfig(mode=Mode.LAMBDA))
        assert result.report.passed
        assert result.report.lambda_certified is True

    def test_irrational_lengths(self, pi_group):
        """Test a triangle with a side of length pi."""
        pi = pi_group.generator("pi")
        graph = MetricGraph.build(
            ["a", "b", "c"], [("ab", "a", "b", pi), ("bc", "b", "c", 1), ("ca", "c", "a", 1)]
        )
        result = embed_isometric(graph, EmbeddingConfig(mode=Mode.LAMBDA), pi_group)
        assert result.report.passed
        assert result.report.lambda_certified is True
        chain = result.map.edge_chains["ab"]
        assert _chain_length(result.complex, chain, pi_group.zero()) == pi
        for point in result.complex.vertices:
            assert pi_group.contains(point.x) and pi_group.contains(point.y)

    def test_group_without_rationals(self, pi_only_group):
        """Test lengths that are all multiples of a single generator."""
        pi = pi_only_group.generator("pi")
        graph = GraphFactory.cycle(3, length=pi)
        result = embed_isometric(graph, EmbeddingConfig(mode=Mode.LAMBDA), pi_only_group)
        assert result.report.passed
        assert result.report.lambda_certified is True

    def test_projections_consistent(self, pi_group):
        """Test that the coordinate functions of an output have zero cycle sums."""
        pi = pi_group.generator("pi")
        graph = GraphFactory.cycle(4, length=pi / 2)
        result = embed_isometric(graph, EmbeddingConfig(mode=Mode.LAMBDA), pi_group)
        for function in projections(result.complex, result.map, pi_group):
            assert function.discontinuities(result.complex) == []
            assert all(total == 0 for total in function.cycle_sums(result.complex))

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(50))
    def test_random_graphs(self, pi_group, seed):
        """Test that random graphs with mixed lengths certify in the group."""
        rng = random.Random(seed)
        pi = pi_group.generator("pi")
        count = rng.randint(2, 5)
        pairs = {(rng.randrange(v), v) for v in range(1, count)}
        for _ in range(rng.randint(0, 2)):
            u, v = rng.sample(range(count), 2)
            pairs.add((min(u, v), max(u, v)))
        edges = []
        for i, (u, v) in enumerate(sorted(pairs)):
            length = Fraction(rng.randint(1, 4), rng.randint(1, 3)) + rng.randint(0, 2) * pi / 2
            edges.append((f"e{i}", str(u), str(v), length))
        graph = MetricGraph.build([str(v) for v in range(count)], edges)
        result = embed_isometric(graph, EmbeddingConfig(mode=Mode.LAMBDA), pi_group)
        assert result.report.passed
        assert result.report.lambda_certified is True
        for point in result.complex.vertices:
            assert pi_group.contains(point.x) and pi_group.contains(point.y)
        for edge in result.graph.finite_edges:
            chain = result.map.edge_chains[edge.id]
            assert _chain_length(result.complex, chain, pi_group.zero()) == edge.length

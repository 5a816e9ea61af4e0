"""Tests for the TropicalEmbedder entry point."""

import json

import pytest

from tropembed.embedder import TropicalEmbedder
from tropembed.metric_graph import MetricGraph
from tropembed.models import EmbeddingConfig, Mode
from tropembed.serialization import parse_complex


@pytest.mark.unit
class TestTropicalEmbedderInit:
    """Tests for TropicalEmbedder configuration."""

    def test_defaults(self):
        """Test the default configuration."""
        embedder = TropicalEmbedder()
        assert embedder.config == EmbeddingConfig()

    def test_overrides(self):
        """Test keyword overrides on top of a config."""
        embedder = TropicalEmbedder(EmbeddingConfig(budget=10), mode="lambda", seed=None)
        assert embedder.config.mode is Mode.LAMBDA
        assert embedder.config.budget == 10
        assert embedder.config.seed is None

    def test_invalid_override(self):
        """Test that invalid values are rejected."""
        with pytest.raises(ValueError):
            TropicalEmbedder(mode="complex")


@pytest.mark.unit
class TestCrossingNumber:
    """Tests for TropicalEmbedder.crossing_number."""

    def test_exact(self, complete_five):
        """Test the exact count of K5."""
        k, exact, planarization = TropicalEmbedder().crossing_number(complete_five)
        assert (k, exact) == (1, True)
        assert planarization.k == 1

    def test_ignores_legs(self, legged_triangle):
        """Test that infinite edges do not take part."""
        k, exact, _ = TropicalEmbedder().crossing_number(legged_triangle)
        assert (k, exact) == (0, True)

    def test_loops_and_parallel_edges(self):
        """Test that multigraphs are subdivided before counting."""
        graph = MetricGraph.build(
            ["u", "v"], [("e1", "u", "v", 1), ("e2", "u", "v", 2), ("loop", "v", "v", 3)]
        )
        k, exact, _ = TropicalEmbedder().crossing_number(graph)
        assert (k, exact) == (0, True)

    def test_budget_fallback(self, petersen):
        """Test that an exhausted budget gives a heuristic upper bound."""
        k, exact, _ = TropicalEmbedder(budget=0).crossing_number(petersen)
        assert not exact
        assert k >= 2

    def test_heuristic(self, complete_four):
        """Test the heuristic on a planar graph."""
        k, exact, _ = TropicalEmbedder(exact_crossings=False).crossing_number(complete_four)
        assert (k, exact) == (0, False)


@pytest.mark.integration
class TestTropicalEmbedderPipeline:
    """Tests for embedding, storing and re-checking."""

    def test_load_graph(self, graph_file, unit_triangle):
        """Test reading a graph file."""
        graph, group = TropicalEmbedder().load_graph(graph_file)
        assert graph.same_as(unit_triangle)
        assert group is None

    def test_missing_file(self, tmp_path):
        """Test that a missing file raises OSError."""
        with pytest.raises(OSError):
            TropicalEmbedder().load_graph(tmp_path / "missing.json")

    def test_embed_is_cached(self, unit_triangle):
        """Test that a repeated graph reuses the result until cleared."""
        with TropicalEmbedder() as embedder:
            first = embedder.embed(unit_triangle)
            assert embedder.embed(unit_triangle) is first
            embedder.clear()
            assert embedder.embed(unit_triangle) is not first

    def test_dumps_then_verify(self, legged_triangle):
        """Test that a stored result verifies again."""
        embedder = TropicalEmbedder()
        result = embedder.embed(legged_triangle)
        document = parse_complex(embedder.dumps(result))
        assert document.source.same_as(legged_triangle)
        report = embedder.verify(document)
        assert report.passed
        assert report.modification_replayed is True

    def test_verify_catches_tampering(self, unit_triangle):
        """Test that a changed coordinate is caught."""
        embedder = TropicalEmbedder()
        data = json.loads(embedder.dumps(embedder.embed(unit_triangle)))
        data["vertices"][0] = ["1000", "1000"]
        report = embedder.verify(parse_complex(json.dumps(data)))
        assert not report.passed

    def test_verify_needs_graph(self, unit_triangle):
        """Test that a document without a graph cannot be verified."""
        embedder = TropicalEmbedder()
        result = embedder.embed(unit_triangle)
        document = parse_complex(embedder.dumps(result))
        document.graph = None
        document.source = None
        with pytest.raises(ValueError):
            embedder.verify(document)

    def test_render(self, unit_triangle):
        """Test rendering a result."""
        embedder = TropicalEmbedder()
        assert "<svg" in embedder.render(embedder.embed(unit_triangle))

"""Test data factories for creating test objects."""

from typing import Any, Optional

import networkx as nx

from tropembed.balancer import attach_balancing_rays
from tropembed.lattice import (
    SEGMENT,
    BalancedComplex,
    ElementRef,
    EmbeddingMap,
    LatticeRay,
    LatticeSegment,
    PrimitiveVector,
    RationalPoint,
)
from tropembed.metric_graph import MetricGraph
from tropembed.value_group import ValueGroup

PI_ENCLOSURE = "3.14159265358979323846"


class GraphFactory:
    """Factory for creating MetricGraph test objects."""

    @staticmethod
    def create(**kwargs) -> MetricGraph:
        """Create a single-edge graph with default or custom values."""
        defaults: dict[str, Any] = {
            "vertices": ["u", "v"],
            "edges": [("e", "u", "v", 1)],
            "infinite_vertices": None,
        }
        defaults.update(kwargs)
        return MetricGraph.build(
            defaults["vertices"], defaults["edges"], defaults["infinite_vertices"]
        )

    @staticmethod
    def from_networkx(graph: nx.Graph, length: Any = 1) -> MetricGraph:
        """Create a metric graph with every edge of ``graph`` at the same length."""
        vertices = [str(v) for v in graph.nodes]
        edges = [(f"e{i}", str(u), str(v), length) for i, (u, v) in enumerate(graph.edges)]
        return MetricGraph.build(vertices, edges)

    @staticmethod
    def cycle(count: int, length: Any = 1) -> MetricGraph:
        """Create a cycle on ``count`` vertices."""
        return GraphFactory.from_networkx(nx.cycle_graph(count), length)

    @staticmethod
    def with_legs(graph: MetricGraph, vertices: Optional[list[str]] = None) -> MetricGraph:
        """Attach one infinite edge to each of ``vertices`` (all vertices by default)."""
        targets = vertices if vertices is not None else list(graph.vertices)
        new_vertices = list(graph.vertices) + [f"{v}_inf" for v in targets]
        edges = [(e.id, e.u, e.v, e.length) for e in graph.edges]
        edges += [(f"{v}_leg", v, f"{v}_inf", "inf") for v in targets]
        return MetricGraph.build(new_vertices, edges)

    @staticmethod
    def create_batch(count: int, **kwargs) -> list[MetricGraph]:
        """Create cycles of growing size, starting at a triangle."""
        return [GraphFactory.cycle(3 + i, **kwargs) for i in range(count)]


class SegmentFactory:
    """Factory for creating LatticeSegment test objects."""

    @staticmethod
    def create(start: tuple = (0, 0), end: tuple = (1, 0), weight: int = 1) -> LatticeSegment:
        """Create a segment with default or custom values."""
        return LatticeSegment(RationalPoint(*start), RationalPoint(*end), weight)

    @staticmethod
    def create_batch(count: int, **kwargs) -> list[LatticeSegment]:
        """Create parallel horizontal segments one unit apart."""
        length = kwargs.pop("length", 1)
        return [
            SegmentFactory.create(start=(0, i), end=(length, i), **kwargs) for i in range(count)
        ]


class RayFactory:
    """Factory for creating LatticeRay test objects."""

    @staticmethod
    def create(apex: tuple = (0, 0), direction: tuple = (1, 0), weight: int = 1) -> LatticeRay:
        """Create a ray with default or custom values."""
        return LatticeRay(RationalPoint(*apex), PrimitiveVector(*direction), weight)


class GroupFactory:
    """Factory for creating ValueGroup test objects."""

    @staticmethod
    def create(
        labels: tuple[str, ...] = ("pi",), with_unit: bool = True, precision: int = 256
    ) -> ValueGroup:
        """Create a group with an optional exact unit and irrational-looking generators."""
        generators: list[dict[str, str]] = []
        if with_unit:
            generators.append({"label": "1", "exact": "1"})
        for label in labels:
            generators.append({"label": label, "enclosure": PI_ENCLOSURE})
        return ValueGroup.from_dict({"generators": generators}, precision)


class EmbeddingFactory:
    """Factory for straight-line embeddings of finite metric graphs."""

    @staticmethod
    def create(
        graph: MetricGraph,
        positions: dict[str, tuple],
        balanced: bool = True,
        weights: Optional[dict[str, int]] = None,
    ) -> tuple[BalancedComplex, EmbeddingMap]:
        """Draw every finite edge as one segment between its endpoint positions."""
        weights = weights or {}
        segments = []
        chains = {}
        for i, edge in enumerate(graph.finite_edges):
            start, end = RationalPoint(*positions[edge.u]), RationalPoint(*positions[edge.v])
            segments.append(LatticeSegment(start, end, weights.get(edge.id, 1)))
            chains[edge.id] = (ElementRef(SEGMENT, i),)
        complex_ = BalancedComplex.from_elements(segments)
        if balanced:
            complex_ = attach_balancing_rays(complex_)
        images: dict[str, Optional[int]] = {
            v: complex_.vertex_index[RationalPoint(*positions[v])] for v in graph.finite_vertices
        }
        return complex_, EmbeddingMap(chains, images)

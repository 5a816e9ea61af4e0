"""Pytest configuration and shared fixtures."""

import json
from pathlib import Path
from typing import Any

import networkx as nx
import pytest

from tropembed.lattice import BalancedComplex, LatticeRay, PrimitiveVector, RationalPoint
from tropembed.metric_graph import MetricGraph
from tropembed.value_group import ValueGroup

from tests.factories import PI_ENCLOSURE, GraphFactory, GroupFactory


@pytest.fixture
def triangle_data() -> dict[str, Any]:
    """Graph document of a triangle with unit edges."""
    return {
        "vertices": ["a", "b", "c"],
        "edges": [
            {"id": "ab", "u": "a", "v": "b", "length": "1"},
            {"id": "bc", "u": "b", "v": "c", "length": "1"},
            {"id": "ca", "u": "c", "v": "a", "length": "1"},
        ],
    }


@pytest.fixture
def unit_triangle() -> MetricGraph:
    """Triangle with three edges of length one."""
    return MetricGraph.build(
        ["a", "b", "c"], [("ab", "a", "b", 1), ("bc", "b", "c", 1), ("ca", "c", "a", 1)]
    )


@pytest.fixture
def legged_triangle(unit_triangle: MetricGraph) -> MetricGraph:
    """Unit triangle with an infinite leg at every vertex (the genus-one tropical curve)."""
    return GraphFactory.with_legs(unit_triangle)


@pytest.fixture
def complete_four() -> MetricGraph:
    """K4 with unit edges."""
    return GraphFactory.from_networkx(nx.complete_graph(4))


@pytest.fixture
def complete_five() -> MetricGraph:
    """K5 with unit edges."""
    return GraphFactory.from_networkx(nx.complete_graph(5))


@pytest.fixture
def utility_graph() -> MetricGraph:
    """K3,3 with unit edges."""
    return GraphFactory.from_networkx(nx.complete_bipartite_graph(3, 3))


@pytest.fixture
def petersen() -> MetricGraph:
    """Petersen graph with unit edges."""
    return GraphFactory.from_networkx(nx.petersen_graph())


@pytest.fixture
def pi_group() -> ValueGroup:
    """Group spanned by an exact unit and a pi-like generator."""
    return GroupFactory.create()


@pytest.fixture
def pi_only_group() -> ValueGroup:
    """Group spanned by a single pi-like generator, without rationals."""
    return GroupFactory.create(with_unit=False)


@pytest.fixture
def pi_group_data() -> dict[str, Any]:
    """Value group section as written in a graph document."""
    return {
        "generators": [
            {"label": "1", "exact": "1"},
            {"label": "pi", "enclosure": PI_ENCLOSURE},
        ]
    }


@pytest.fixture
def tropical_line() -> BalancedComplex:
    """Three rays from the origin in directions (-1, 0), (0, -1) and (1, 1)."""
    origin = RationalPoint(0, 0)
    return BalancedComplex(
        (origin,),
        (),
        (
            LatticeRay(origin, PrimitiveVector(-1, 0)),
            LatticeRay(origin, PrimitiveVector(0, -1)),
            LatticeRay(origin, PrimitiveVector(1, 1)),
        ),
    )


@pytest.fixture
def graph_file(tmp_path: Path, triangle_data: dict[str, Any]) -> Path:
    """Triangle graph written to a temporary file."""
    path = tmp_path / "triangle.json"
    path.write_text(json.dumps(triangle_data), encoding="utf-8")
    return path

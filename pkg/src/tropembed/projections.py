"""Coordinate projections of an embedded graph as piecewise-affine functions."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import networkx as nx

from tropembed.exceptions import NotInLambda
from tropembed.lattice import SEGMENT, BalancedComplex, ElementRef, EmbeddingMap, RationalPoint
from tropembed.value_group import Scalar, ValueGroup

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PAFunction:
    """A piecewise-affine function on the image of a graph.

    Attributes:
        axis: ``"x"`` or ``"y"``.
        values: Value at each vertex index of the complex touched by the graph image.
        slopes: Integer slope on each element, per unit of tropical length.
        lengths: Tropical length of each element; ``None`` for rays.
    """

    axis: str
    values: dict[int, Scalar]
    slopes: dict[ElementRef, int]
    lengths: dict[ElementRef, Optional[Scalar]]

    def discontinuities(self, complex_: BalancedComplex) -> list[ElementRef]:
        """Segments where ``value(end) - value(start) != slope * length``."""
        broken = []
        for ref, slope in self.slopes.items():
            if ref.kind != SEGMENT:
                continue
            segment = complex_.segments[ref.index]
            start = self.values[complex_.vertex_index[segment.start]]
            end = self.values[complex_.vertex_index[segment.end]]
            if end - start != slope * self.lengths[ref]:  # type: ignore[operator]
                broken.append(ref)
        return broken

    def cycle_sums(self, complex_: BalancedComplex) -> list[Scalar]:
        """Sum of ``slope * length`` around each cycle of a cycle basis."""
        graph = nx.Graph()
        for ref in self.slopes:
            if ref.kind == SEGMENT:
                segment = complex_.segments[ref.index]
                a = complex_.vertex_index[segment.start]
                b = complex_.vertex_index[segment.end]
                graph.add_edge(a, b, ref=ref, start=a)
        sums = []
        for cycle in nx.cycle_basis(graph):
            total: Scalar = 0  # type: ignore[assignment]
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                data = graph.edges[a, b]
                ref = data["ref"]
                step = self.slopes[ref] * self.lengths[ref]  # type: ignore[operator]
                total = total + (step if data["start"] == a else -step)
            sums.append(total)
        return sums


def projections(
    complex_: BalancedComplex, map_: EmbeddingMap, group: Optional[ValueGroup] = None
) -> tuple[PAFunction, PAFunction]:
    """The two coordinate functions restricted to the image of the graph.

    On an element with primitive direction ``(m, n)`` the slopes are ``m``
    and ``n``.

    Raises:
        NotInLambda: If a vertex of the image has a coordinate outside the group.
    """
    group = group or ValueGroup.rationals()
    refs = sorted({ref for chain in map_.edge_chains.values() for ref in chain})
    x_values: dict[int, Scalar] = {}
    y_values: dict[int, Scalar] = {}
    x_slopes: dict[ElementRef, int] = {}
    y_slopes: dict[ElementRef, int] = {}
    lengths: dict[ElementRef, Optional[Scalar]] = {}
    for ref in refs:
        element = complex_.element(ref)
        if ref.kind == SEGMENT:
            points: tuple[RationalPoint, ...] = element.endpoints  # type: ignore[union-attr]
        else:
            points = (element.apex,)  # type: ignore[union-attr]
        for point in points:
            if not (group.contains(point.x) and group.contains(point.y)):
                raise NotInLambda(f"vertex {point} of {ref} is not in the value group")
            index = complex_.vertex_index[point]
            x_values[index] = point.x
            y_values[index] = point.y
        direction = element.direction
        if math.gcd(direction.m, direction.n) != 1:
            raise ValueError(f"{ref} has a non-primitive direction")
        x_slopes[ref] = direction.m
        y_slopes[ref] = direction.n
        lengths[ref] = element.extent
    logger.debug(f"projections over {len(refs)} elements")
    return (
        PAFunction("x", x_values, x_slopes, lengths),
        PAFunction("y", y_values, y_slopes, dict(lengths)),
    )

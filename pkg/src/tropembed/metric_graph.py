"""Abstract metric graphs and tropical modifications.

A metric graph is a finite connected multigraph whose edges carry positive
lengths, or the distinguished length :data:`INFINITY` on edges ending at a
degree-one infinite vertex. Graphs are immutable values; every move returns a
new graph.
"""

import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Optional, Union

import networkx as nx

from tropembed.exceptions import InfiniteVertex, InvalidGraph, LengthMismatch, NotRemovable
from tropembed.utils import to_fraction
from tropembed.value_group import Scalar, sign_of

logger = logging.getLogger(__name__)

RESERVED_PREFIX = "#"


class _Infinity:
    """The length of an infinite edge. Absorbs finite summands."""

    _instance: Optional["_Infinity"] = None

    def __new__(cls) -> "_Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other: Any) -> "_Infinity":
        return self

    __radd__ = __add__

    def __repr__(self) -> str:
        return "INFINITY"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self) -> str:
        return "INFINITY"


INFINITY = _Infinity()

Length = Union[Scalar, _Infinity]


def is_infinite(length: Any) -> bool:
    return length is INFINITY


@dataclass(frozen=True)
class Edge:
    """An edge of a metric graph."""

    id: str
    u: str
    v: str
    length: Length

    @property
    def is_infinite(self) -> bool:
        return self.length is INFINITY

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def other(self, vertex: str) -> str:
        return self.v if vertex == self.u else self.u


@dataclass(frozen=True)
class MetricGraph:
    """A connected metric graph.

    Attributes:
        vertices: Vertex ids in a stable order.
        edges: Edges in a stable order.
        infinite_vertices: The degree-one endpoints of infinite edges.

    Raises:
        InvalidGraph: If any invariant fails.

    Example:
        >>> g = MetricGraph.build(["u", "v"], [("e", "u", "v", 5)])
        >>> g.edge("e").length
        Fraction(5, 1)
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    infinite_vertices: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "infinite_vertices", frozenset(self.infinite_vertices))
        self._validate()

    @classmethod
    def build(
        cls,
        vertices: Iterable[str],
        edges: Iterable[Sequence[Any]],
        infinite_vertices: Optional[Iterable[str]] = None,
    ) -> "MetricGraph":
        """Build a graph from ``(id, u, v, length)`` tuples.

        Lengths may be ints, rational strings, Fractions, value group elements
        or ``"inf"``/:data:`INFINITY`. When ``infinite_vertices`` is omitted,
        the infinite vertex of each infinite edge is its degree-one endpoint,
        preferring ``v``.
        """
        vertices = tuple(vertices)
        parsed = []
        for edge_id, u, v, length in edges:
            parsed.append(Edge(str(edge_id), str(u), str(v), _as_length(length)))
        if infinite_vertices is None:
            degree: dict[str, int] = {v: 0 for v in vertices}
            for e in parsed:
                degree[e.u] = degree.get(e.u, 0) + 1
                degree[e.v] = degree.get(e.v, 0) + 1
            marked = set()
            for e in parsed:
                if e.is_infinite:
                    marked.add(e.v if degree.get(e.v) == 1 else e.u)
            infinite_vertices = marked
        return cls(vertices, tuple(parsed), frozenset(infinite_vertices))

    def _validate(self) -> None:
        if not self.vertices:
            raise InvalidGraph("a metric graph needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidGraph("duplicate vertex id")
        for vertex in self.vertices:
            if vertex.startswith(RESERVED_PREFIX):
                raise InvalidGraph(f"vertex ids starting with {RESERVED_PREFIX!r} are reserved")
        known = set(self.vertices)
        seen_ids = set()
        for e in self.edges:
            if e.id in seen_ids:
                raise InvalidGraph(f"duplicate edge id {e.id!r}")
            seen_ids.add(e.id)
            if e.u not in known or e.v not in known:
                raise InvalidGraph(f"edge {e.id!r} has an unknown endpoint")
            if not e.is_infinite and sign_of(e.length) <= 0:  # type: ignore[arg-type]
                raise InvalidGraph(f"edge {e.id!r} has non-positive length {e.length}")
        unknown = self.infinite_vertices - known
        if unknown:
            raise InvalidGraph(f"unknown infinite vertices {sorted(unknown)}")
        for e in self.edges:
            ends = {e.u, e.v} & self.infinite_vertices
            if e.is_infinite:
                if e.is_loop or len(ends) != 1:
                    raise InvalidGraph(
                        f"infinite edge {e.id!r} needs exactly one infinite endpoint"
                    )
                (leaf,) = ends
                if self.degree(leaf) != 1:
                    raise InvalidGraph(
                        f"infinite edge {e.id!r} must end at a vertex of degree 1, "
                        f"{leaf!r} has degree {self.degree(leaf)}"
                    )
            elif ends:
                raise InvalidGraph(f"finite edge {e.id!r} touches an infinite vertex")
        for vertex in self.infinite_vertices:
            if not any(e.is_infinite for e in self.incident(vertex)):
                raise InvalidGraph(f"infinite vertex {vertex!r} has no infinite edge")
        if len(self.vertices) > 1 and not nx.is_connected(self.to_networkx()):
            raise InvalidGraph("metric graph must be connected")

    @cached_property
    def _edge_index(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _incidence(self) -> dict[str, list[Edge]]:
        table: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            table[e.u].append(e)
            if not e.is_loop:
                table[e.v].append(e)
        return table

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_index[edge_id]
        except KeyError:
            raise InvalidGraph(f"unknown edge {edge_id!r}") from None

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edge_index

    def incident(self, vertex: str) -> list[Edge]:
        if vertex not in self._incidence:
            raise InvalidGraph(f"unknown vertex {vertex!r}")
        return list(self._incidence[vertex])

    def degree(self, vertex: str) -> int:
        return sum(2 if e.is_loop else 1 for e in self.incident(vertex))

    def is_finite_vertex(self, vertex: str) -> bool:
        return vertex not in self.infinite_vertices

    @property
    def finite_vertices(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if v not in self.infinite_vertices)

    @property
    def finite_edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if not e.is_infinite)

    @property
    def infinite_edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.is_infinite)

    def is_simple(self) -> bool:
        pairs = set()
        for e in self.edges:
            if e.is_loop:
                return False
            key = frozenset((e.u, e.v))
            if key in pairs:
                return False
            pairs.add(key)
        return True

    def to_networkx(self) -> nx.MultiGraph:
        """The underlying multigraph, keyed by edge id, with a ``length`` attribute."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        for e in self.edges:
            graph.add_edge(e.u, e.v, key=e.id, length=e.length)
        return graph

    def finite_subgraph(self) -> nx.Graph:
        """Simple graph on the finite vertices and finite edges.

        Raises:
            InvalidGraph: If the finite part has loops or parallel edges.
        """
        if not self.is_simple():
            raise InvalidGraph("finite subgraph requested on a non-simple graph")
        graph = nx.Graph()
        graph.add_nodes_from(self.finite_vertices)
        for e in self.finite_edges:
            graph.add_edge(e.u, e.v, id=e.id, length=e.length)
        return graph

    def replace(
        self,
        vertices: Optional[Iterable[str]] = None,
        edges: Optional[Iterable[Edge]] = None,
        infinite_vertices: Optional[Iterable[str]] = None,
    ) -> "MetricGraph":
        return MetricGraph(
            tuple(self.vertices if vertices is None else vertices),
            tuple(self.edges if edges is None else edges),
            frozenset(self.infinite_vertices if infinite_vertices is None else infinite_vertices),
        )

    def same_as(self, other: "MetricGraph") -> bool:
        """Edge-for-edge equality, ignoring vertex and edge order."""
        return (
            set(self.vertices) == set(other.vertices)
            and self.infinite_vertices == other.infinite_vertices
            and {e.id: (frozenset((e.u, e.v)), e.length) for e in self.edges}
            == {e.id: (frozenset((e.u, e.v)), e.length) for e in other.edges}
        )


# Moves


@dataclass(frozen=True)
class Subdivide:
    edge: str
    lengths: tuple[Length, Length]
    vertex: str


@dataclass(frozen=True)
class ReverseSubdivide:
    vertex: str


@dataclass(frozen=True)
class AddInfiniteLeaf:
    vertex: str
    leaf: str
    edge: str


Move = Union[Subdivide, ReverseSubdivide, AddInfiniteLeaf]


@dataclass(frozen=True)
class ModificationTrace:
    """An ordered sequence of tropical modification moves."""

    moves: tuple[Move, ...] = ()

    def __len__(self) -> int:
        return len(self.moves)

    def __iter__(self):  # type: ignore[no-untyped-def]
        return iter(self.moves)

    def then(self, move: Move) -> "ModificationTrace":
        return ModificationTrace(self.moves + (move,))


def _fresh(taken: Iterable[str], base: str) -> str:
    taken = set(taken)
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def _as_length(value: Any) -> Length:
    from tropembed.value_group import LambdaScalar

    if is_infinite(value) or (isinstance(value, str) and value == "inf"):
        return INFINITY
    if isinstance(value, LambdaScalar):
        return value
    return to_fraction(value)


def subdivide(
    g: MetricGraph,
    edge_id: str,
    lengths: tuple[Any, Any],
    vertex: Optional[str] = None,
) -> MetricGraph:
    """Split an edge into two through a fresh degree-two vertex.

    Args:
        g: The graph.
        edge_id: Edge to split, from its ``u`` end to its ``v`` end.
        lengths: Lengths of the piece at ``u`` and the piece at ``v``.
        vertex: Id for the new vertex; derived from ``edge_id`` when omitted.

    Raises:
        LengthMismatch: If the lengths are not positive or do not add up. On an
            infinite edge exactly the piece at the infinite vertex must be
            infinite.
    """
    edge = g.edge(edge_id)
    first, second = (_as_length(x) for x in lengths)
    if edge.is_infinite:
        at_u_infinite = edge.u in g.infinite_vertices
        expected = (first, second) if at_u_infinite else (second, first)
        if not is_infinite(expected[0]) or is_infinite(expected[1]):
            raise LengthMismatch(
                f"splitting infinite edge {edge_id!r}: only the piece at the infinite vertex "
                "may be infinite"
            )
        if sign_of(expected[1]) <= 0:
            raise LengthMismatch(f"split lengths of {edge_id!r} must be positive")
    else:
        if is_infinite(first) or is_infinite(second):
            raise LengthMismatch(f"finite edge {edge_id!r} cannot have an infinite piece")
        if sign_of(first) <= 0 or sign_of(second) <= 0:
            raise LengthMismatch(f"split lengths of {edge_id!r} must be positive")
        if first + second != edge.length:
            raise LengthMismatch(
                f"split lengths {first} + {second} do not add up to {edge.length} on {edge_id!r}"
            )
    vertex = vertex or _fresh(g.vertices, f"{edge_id}~0")
    if vertex in g.vertices:
        raise InvalidGraph(f"vertex id {vertex!r} is already in use")
    taken = {e.id for e in g.edges}
    id_a = _fresh(taken, f"{edge_id}.a")
    id_b = _fresh(taken | {id_a}, f"{edge_id}.b")
    edges: list[Edge] = []
    for e in g.edges:
        if e.id == edge_id:
            edges.append(Edge(id_a, e.u, vertex, first))
            edges.append(Edge(id_b, vertex, e.v, second))
        else:
            edges.append(e)
    logger.debug(f"subdivided {edge_id!r} at new vertex {vertex!r}")
    return g.replace(vertices=g.vertices + (vertex,), edges=edges)


_PIECE = re.compile(r"^(?P<base>.+)\.(?P<side>[ab])\d*$")


def _joined_id(first: str, second: str, taken: set[str]) -> str:
    """Id of two joined pieces: their parent edge id when free, else a compound id."""
    pieces = [_PIECE.match(x) for x in (first, second)]
    if all(pieces):
        bases = {m.group("base") for m in pieces}  # type: ignore[union-attr]
        sides = sorted(m.group("side") for m in pieces)  # type: ignore[union-attr]
        if len(bases) == 1 and sides == ["a", "b"] and not bases & taken:
            return bases.pop()
    return _fresh(taken, f"{first}+{second}")


def _merge_at(g: MetricGraph, vertex: str, allow_loop: bool) -> MetricGraph:
    if vertex in g.infinite_vertices:
        raise NotRemovable(f"{vertex!r} is an infinite vertex")
    incident = g.incident(vertex)
    if len(incident) != 2 or any(e.is_loop for e in incident):
        raise NotRemovable(f"{vertex!r} has degree {g.degree(vertex)}, expected 2")
    first, second = incident
    left, right = first.other(vertex), second.other(vertex)
    if left == right and not allow_loop:
        raise NotRemovable(f"both edges at {vertex!r} lead to {left!r}")
    if first.is_infinite and second.is_infinite:
        raise NotRemovable(f"{vertex!r} joins two infinite edges")
    others = {e.id for e in g.edges if e.id not in (first.id, second.id)}
    merged_id = _joined_id(first.id, second.id, others)
    merged = Edge(merged_id, left, right, first.length + second.length)
    edges = []
    for e in g.edges:
        if e.id == first.id:
            edges.append(merged)
        elif e.id != second.id:
            edges.append(e)
    vertices = tuple(x for x in g.vertices if x != vertex)
    return g.replace(vertices=vertices, edges=edges)


def reverse_subdivide(g: MetricGraph, vertex: str) -> MetricGraph:
    """Remove a degree-two vertex, joining its two edges; infinity absorbs.

    Raises:
        NotRemovable: If the vertex does not have degree two, or both of its
            edges lead to the same neighbour.
    """
    return _merge_at(g, vertex, allow_loop=False)


def add_infinite_leaf(
    g: MetricGraph, vertex: str, leaf: Optional[str] = None, edge_id: Optional[str] = None
) -> MetricGraph:
    """Attach a fresh infinite vertex to a finite vertex by an infinite edge.

    Raises:
        InfiniteVertex: If ``vertex`` is an infinite vertex.
    """
    if vertex not in g.vertices:
        raise InvalidGraph(f"unknown vertex {vertex!r}")
    if vertex in g.infinite_vertices:
        raise InfiniteVertex(f"{vertex!r} is already an infinite vertex")
    leaf = leaf or _fresh(g.vertices, f"{vertex}~inf")
    edge_id = edge_id or _fresh((e.id for e in g.edges), f"{vertex}~ray")
    if leaf in g.vertices:
        raise InvalidGraph(f"vertex id {leaf!r} is already in use")
    return g.replace(
        vertices=g.vertices + (leaf,),
        edges=g.edges + (Edge(edge_id, vertex, leaf, INFINITY),),
        infinite_vertices=g.infinite_vertices | {leaf},
    )


def apply_move(g: MetricGraph, move: Move) -> MetricGraph:
    if isinstance(move, Subdivide):
        return subdivide(g, move.edge, move.lengths, move.vertex)
    if isinstance(move, ReverseSubdivide):
        return reverse_subdivide(g, move.vertex)
    return add_infinite_leaf(g, move.vertex, move.leaf, move.edge)


def replay(g: MetricGraph, trace: ModificationTrace) -> MetricGraph:
    """Apply every move of ``trace`` to ``g`` in order."""
    for move in trace:
        g = apply_move(g, move)
    return g


def normalize_simple(g: MetricGraph) -> tuple[MetricGraph, ModificationTrace]:
    """Remove loops and parallel edges by subdivision.

    Loops are split at one third and two thirds of their length; of a bundle of
    parallel edges, every edge except the first gets a midpoint.

    Example:
        >>> g = MetricGraph.build(["v"], [("e", "v", "v", 3)])
        >>> simple, trace = normalize_simple(g)
        >>> sorted(str(e.length) for e in simple.edges)
        ['1', '1', '1']
    """
    trace = ModificationTrace()
    current = g

    def record(edge_id: str, lengths: tuple[Any, Any]) -> str:
        nonlocal current, trace
        vertex = _fresh(current.vertices, f"{edge_id}~{len(trace)}")
        move = Subdivide(edge_id, lengths, vertex)
        current = apply_move(current, move)
        trace = trace.then(move)
        return vertex

    for e in g.edges:
        if e.is_loop:
            third = e.length / 3  # type: ignore[operator]
            vertex = record(e.id, (third, e.length - third))  # type: ignore[operator]
            rest = next(x for x in current.incident(vertex) if x.u == vertex)
            record(rest.id, (third, third))
    bundles: dict[frozenset, list[Edge]] = {}
    for e in current.edges:
        if not e.is_loop:
            bundles.setdefault(frozenset((e.u, e.v)), []).append(e)
    for bundle in bundles.values():
        for e in bundle[1:]:
            half = e.length / 2  # type: ignore[operator]
            record(e.id, (half, half))
    if trace.moves:
        logger.info(f"normalized graph with {len(trace)} subdivisions")
    return current, trace


def contract_degree_two(g: MetricGraph, keep: Iterable[str]) -> MetricGraph:
    """Smooth every finite degree-two vertex not in ``keep``, newest first.

    Unlike :func:`reverse_subdivide`, this may create loops, so it inverts
    :func:`normalize_simple` when ``keep`` is the original vertex set.
    """
    keep = set(keep)
    current = g
    for vertex in reversed(g.vertices):
        if vertex in keep or vertex in current.infinite_vertices:
            continue
        if current.degree(vertex) == 2 and not any(e.is_loop for e in current.incident(vertex)):
            current = _merge_at(current, vertex, allow_loop=True)
    return current

"""Crossing numbers and planarizations of simple graphs.

A planarization replaces every crossing of a drawing by a dummy vertex of
degree four. The exact solver enumerates sets of independent edge pairs and
their orders along each edge, and tests each planarized graph for planarity.
The heuristic inserts edges one at a time along shortest dual paths.
"""

import itertools
import logging
import random
from collections.abc import Hashable, Iterator, Sequence
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from tropembed.exceptions import BudgetExceeded, InvalidGraph, NotPlanar

logger = logging.getLogger(__name__)

DUMMY_PREFIX = "#x"
BEND_PREFIX = "#b"


def is_dummy(node: Hashable) -> bool:
    return isinstance(node, str) and node.startswith(DUMMY_PREFIX)


def is_bend(node: Hashable) -> bool:
    return isinstance(node, str) and node.startswith(BEND_PREFIX)


@dataclass
class Planarization:
    """A planar graph obtained from a drawing by making crossings into vertices.

    Attributes:
        graph: The planarized simple graph.
        paths: Per original edge id, its node sequence from first to second endpoint.
        crossing_pairs: Per dummy vertex, the ids of the two edges crossing there.
        exact: Whether ``k`` is known to be the crossing number.
        embedding: A planar embedding of ``graph`` in which every dummy vertex
            sees the two crossing edges alternate.
    """

    graph: nx.Graph
    paths: dict[str, tuple[Hashable, ...]]
    crossing_pairs: dict[str, tuple[str, str]]
    exact: bool = True
    embedding: Optional[nx.PlanarEmbedding] = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return len(self.crossing_pairs)

    @property
    def dummies(self) -> list[str]:
        return sorted(self.crossing_pairs, key=_node_order)

    def restore(self) -> nx.Graph:
        """Delete dummy and bend vertices and re-merge the edge fragments."""
        graph = nx.Graph()
        graph.add_nodes_from(n for n in self.graph.nodes if not is_dummy(n) and not is_bend(n))
        for edge_id, path in self.paths.items():
            graph.add_edge(path[0], path[-1], id=edge_id)
        return graph

    def owner(self, a: Hashable, b: Hashable) -> str:
        """Original edge id of the planarized edge ``{a, b}``."""
        return self.graph.edges[a, b]["id"]


def _node_order(node: Hashable) -> tuple:
    if isinstance(node, str) and node[:2] in (DUMMY_PREFIX, BEND_PREFIX) and node[2:].isdigit():
        return (1, node[:2], int(node[2:]))
    return (0, str(node), 0)


def _edge_list(graph: nx.Graph) -> list[tuple[str, Hashable, Hashable]]:
    edges = []
    for u, v, data in graph.edges(data=True):
        if u == v:
            raise InvalidGraph("planarization needs a simple graph")
        edges.append((str(data.get("id", f"{u}-{v}")), u, v))
    edges.sort(key=lambda e: e[0])
    return edges


def crossing_lower_bound(graph: nx.Graph) -> int:
    """Lower bound from Euler's formula and the girth.

    A planar graph of girth ``g`` on ``n >= 3`` vertices has at most
    ``g (n - 2) / (g - 2)`` edges, and each crossing removes at most one edge
    from that count.

    Example:
        >>> crossing_lower_bound(nx.petersen_graph())
        2
    """
    n = graph.number_of_nodes()
    m = graph.number_of_edges()
    if n < 3 or nx.is_forest(graph):
        return 0
    girth = nx.girth(graph)
    return max(0, m - (girth * (n - 2)) // (girth - 2))


class _Builder:
    """Mutable planarized graph with path bookkeeping."""

    def __init__(self, graph: nx.Graph, edges: Sequence[tuple[str, Hashable, Hashable]]):
        self.graph = nx.Graph()
        self.graph.add_nodes_from(graph.nodes)
        self.paths: dict[str, list[Hashable]] = {}
        self.crossing_pairs: dict[str, tuple[str, str]] = {}
        self._dummies = 0
        self._bends = 0
        self._edges = {edge_id: (u, v) for edge_id, u, v in edges}

    def new_dummy(self, first: str, second: str) -> str:
        node = f"{DUMMY_PREFIX}{self._dummies}"
        self._dummies += 1
        self.crossing_pairs[node] = (first, second) if first <= second else (second, first)
        self.graph.add_node(node)
        return node

    def link(self, edge_id: str, a: Hashable, b: Hashable) -> list[Hashable]:
        """Connect ``a`` to ``b`` as a fragment of ``edge_id``; returns the inner nodes used."""
        if self.graph.has_edge(a, b):
            bend = f"{BEND_PREFIX}{self._bends}"
            self._bends += 1
            self.graph.add_edge(a, bend, id=edge_id)
            self.graph.add_edge(bend, b, id=edge_id)
            return [bend]
        self.graph.add_edge(a, b, id=edge_id)
        return []

    def lay_path(self, edge_id: str, nodes: Sequence[Hashable]) -> None:
        path = [nodes[0]]
        for a, b in zip(nodes, nodes[1:]):
            path.extend(self.link(edge_id, a, b))
            path.append(b)
        self.paths[edge_id] = path

    def split(self, a: Hashable, b: Hashable, dummy: str) -> None:
        """Put ``dummy`` on the fragment ``{a, b}``."""
        owner = self.graph.edges[a, b]["id"]
        self.graph.remove_edge(a, b)
        path = self.paths[owner]
        i = next(j for j in range(len(path) - 1) if {path[j], path[j + 1]} == {a, b})
        left, right = path[i], path[i + 1]
        inner_left = self.link(owner, left, dummy)
        inner_right = self.link(owner, dummy, right)
        self.paths[owner] = path[: i + 1] + inner_left + [dummy] + inner_right + path[i + 1 :]

    def uncross(self, dummy: str) -> None:
        """Remove a touching dummy, reconnecting each strand directly."""
        pair = self.crossing_pairs.pop(dummy)
        self.graph.remove_node(dummy)
        for edge_id in pair:
            path = self.paths[edge_id]
            i = path.index(dummy)
            left, right = path[i - 1], path[i + 1]
            self.paths[edge_id] = path[:i] + self.link(edge_id, left, right) + path[i + 1 :]

    def freeze(self, exact: bool) -> Planarization:
        return Planarization(
            self.graph,
            {edge_id: tuple(path) for edge_id, path in sorted(self.paths.items())},
            dict(self.crossing_pairs),
            exact,
        )


def _independent_pairs(edges: Sequence[tuple[str, Hashable, Hashable]]) -> list[tuple[int, int]]:
    pairs = []
    for i, j in itertools.combinations(range(len(edges)), 2):
        if not {edges[i][1], edges[i][2]} & {edges[j][1], edges[j][2]}:
            pairs.append((i, j))
    return pairs


def _orders(chosen: Sequence[tuple[int, int]]) -> Iterator[dict[int, tuple[int, ...]]]:
    """All ways of ordering the crossings along each edge."""
    on_edge: dict[int, list[int]] = {}
    for c, (i, j) in enumerate(chosen):
        on_edge.setdefault(i, []).append(c)
        on_edge.setdefault(j, []).append(c)
    keys = sorted(on_edge)
    for combo in itertools.product(*(itertools.permutations(on_edge[k]) for k in keys)):
        yield dict(zip(keys, combo))


def _planarize(
    graph: nx.Graph,
    edges: Sequence[tuple[str, Hashable, Hashable]],
    chosen: Sequence[tuple[int, int]],
    order: dict[int, tuple[int, ...]],
) -> _Builder:
    builder = _Builder(graph, edges)
    dummies = [builder.new_dummy(edges[i][0], edges[j][0]) for i, j in chosen]
    for index, (edge_id, u, v) in enumerate(edges):
        inner = [dummies[c] for c in order.get(index, ())]
        builder.lay_path(edge_id, [u, *inner, v])
    return builder


def crossing_number_exact(graph: nx.Graph, budget: int = 20000) -> tuple[int, Planarization]:
    """Exact crossing number by exhaustive search over planarizations.

    Crossing sets of size ``k`` are drawn from pairs of non-adjacent edges,
    since some optimal drawing never crosses adjacent edges or one pair twice.
    ``k`` grows from :func:`crossing_lower_bound`; the first planar
    planarization in lexicographic order is returned.

    Args:
        graph: Simple connected graph; edges may carry an ``id`` attribute.
        budget: Maximum number of planarity tests.

    Returns:
        ``(k, planarization)``.

    Raises:
        BudgetExceeded: If the search needs more than ``budget`` planarity tests.
            ``best_lower_bound`` is the largest ``k`` not yet ruled out.
    """
    edges = _edge_list(graph)
    tests = 1
    if nx.check_planarity(graph)[0]:
        builder = _planarize(graph, edges, (), {})
        return 0, _finish(builder, exact=True)
    pairs = _independent_pairs(edges)
    k = max(1, crossing_lower_bound(graph))
    while k <= len(pairs):
        logger.debug(f"searching planarizations with {k} crossings")
        for chosen in itertools.combinations(pairs, k):
            for order in _orders(chosen):
                tests += 1
                if tests > budget:
                    raise BudgetExceeded(
                        f"crossing number search exceeded {budget} planarity tests at k={k}",
                        best_lower_bound=k,
                    )
                builder = _planarize(graph, edges, chosen, order)
                if nx.check_planarity(builder.graph)[0]:
                    logger.info(f"crossing number {k} found after {tests} planarity tests")
                    planarization = _finish(builder, exact=True)
                    if planarization.k != k:
                        raise NotPlanar(f"minimal planarization with {k} crossings has a touching")
                    return k, planarization
        k += 1
    raise NotPlanar("exhausted every crossing set without finding a planarization")


def _alternates(embedding: nx.PlanarEmbedding, builder: _Builder, dummy: str) -> bool:
    first, second = builder.crossing_pairs[dummy]
    path = builder.paths[first]
    i = path.index(dummy)
    strand = {path[i - 1], path[i + 1]}
    rotation = list(embedding.neighbors_cw_order(dummy))
    pattern = [node in strand for node in rotation]
    return pattern in ([True, False, True, False], [False, True, False, True])


def _finish(builder: _Builder, exact: bool) -> Planarization:
    """Embed the planarized graph, uncrossing dummies that only touch."""
    while True:
        planar, embedding = nx.check_planarity(builder.graph)
        if not planar:
            raise NotPlanar("planarized graph is not planar")
        touching = [d for d in builder.crossing_pairs if not _alternates(embedding, builder, d)]
        if not touching:
            break
        dummy = min(touching, key=_node_order)
        logger.warning(
            f"crossing {dummy} of {builder.crossing_pairs[dummy]} is a touching; removing it"
        )
        builder.uncross(dummy)
    planarization = builder.freeze(exact)
    planarization.embedding = embedding
    return planarization


# Heuristic


def _faces(
    embedding: nx.PlanarEmbedding,
) -> tuple[list[list[Hashable]], dict[tuple[Hashable, Hashable], int]]:
    face_of: dict[tuple[Hashable, Hashable], int] = {}
    faces: list[list[Hashable]] = []
    for v in sorted(embedding.nodes, key=_node_order):
        for w in embedding.neighbors_cw_order(v):
            if (v, w) in face_of:
                continue
            boundary = []
            a, b = v, w
            while (a, b) not in face_of:
                face_of[(a, b)] = len(faces)
                boundary.append(a)
                a, b = embedding.next_face_half_edge(a, b)
            faces.append(boundary)
    return faces, face_of


def _insert_edge(builder: _Builder, edge_id: str, u: Hashable, v: Hashable, penalty: int) -> int:
    """Route ``edge_id`` through the dual graph; returns the number of crossings made."""
    planar, embedding = nx.check_planarity(builder.graph)
    if not planar:
        raise NotPlanar("planarized graph lost planarity during insertion")
    faces, face_of = _faces(embedding)
    dual = nx.Graph()
    dual.add_nodes_from(range(len(faces)))
    fragments = sorted(
        builder.graph.edges(data=True), key=lambda e: (_node_order(e[0]), _node_order(e[1]))
    )
    for a, b, data in fragments:
        left, right = face_of[(a, b)], face_of[(b, a)]
        if left == right:
            continue
        owner_u, owner_v = builder._edges[data["id"]]
        weight = penalty if {owner_u, owner_v} & {u, v} else 1
        if not dual.has_edge(left, right) or dual.edges[left, right]["weight"] > weight:
            dual.add_edge(left, right, weight=weight, cut=(a, b))
    source, target = "source", "target"
    for w in embedding.neighbors_cw_order(u):
        dual.add_edge(source, face_of[(u, w)], weight=0)
    for w in embedding.neighbors_cw_order(v):
        dual.add_edge(face_of[(v, w)], target, weight=0)
    route = nx.shortest_path(dual, source, target, weight="weight")
    cuts = [dual.edges[f, g]["cut"] for f, g in zip(route[1:-2], route[2:-1])]
    inner = []
    for a, b in cuts:
        dummy = builder.new_dummy(edge_id, builder.graph.edges[a, b]["id"])
        builder.split(a, b, dummy)
        inner.append(dummy)
    builder.lay_path(edge_id, [u, *inner, v])
    return len(inner)


def planarize_heuristic(graph: nx.Graph, seed: Optional[int] = None) -> tuple[int, Planarization]:
    """Upper bound on the crossing number by incremental edge insertion.

    A depth-first spanning tree is grown into a maximal planar subgraph by
    adding edges in id order; each remaining edge is then inserted along a
    shortest path in the dual of the current planarization. Crossing an edge
    adjacent to the inserted one is penalized.

    Args:
        graph: Simple connected graph; edges may carry an ``id`` attribute.
        seed: When given, shuffles the order in which edges are tried.

    Returns:
        ``(k_ub, planarization)`` with ``planarization.exact`` False unless
        the graph is planar.
    """
    edges = _edge_list(graph)
    builder = _Builder(graph, edges)
    if nx.check_planarity(graph)[0]:
        for edge_id, u, v in edges:
            builder.lay_path(edge_id, [u, v])
        return 0, _finish(builder, exact=True)
    order = list(edges)
    if seed is not None:
        random.Random(seed).shuffle(order)
    root = min(graph.nodes, key=_node_order)
    tree = {frozenset(e) for e in nx.dfs_edges(graph, source=root)}
    planar_part = nx.Graph()
    planar_part.add_nodes_from(graph.nodes)
    planar_part.add_edges_from(tuple(e) for e in tree)
    deferred = []
    for edge_id, u, v in order:
        if frozenset((u, v)) in tree:
            continue
        planar_part.add_edge(u, v)
        if not nx.check_planarity(planar_part)[0]:
            planar_part.remove_edge(u, v)
            deferred.append((edge_id, u, v))
    for edge_id, u, v in edges:
        if planar_part.has_edge(u, v):
            builder.lay_path(edge_id, [u, v])
    penalty = len(edges) + 1
    for edge_id, u, v in deferred:
        made = _insert_edge(builder, edge_id, u, v, penalty)
        logger.debug(f"inserted {edge_id} with {made} crossings")
    planarization = _finish(builder, exact=False)
    logger.info(
        f"heuristic planarization: {len(deferred)} edges reinserted, {planarization.k} crossings"
    )
    return planarization.k, planarization

"""Straight-line drawings of planarizations with exact rational coordinates."""

import logging
import math
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import cmp_to_key
from typing import Optional, Union

import networkx as nx
from networkx.algorithms.planar_drawing import triangulate_embedding

from tropembed.exceptions import NeighborhoodConflict, NotPlanar, OverlapError, PerturbationFailed
from tropembed.lattice import LatticeSegment, RationalPoint, find_crossings, intersect
from tropembed.models import DrawingMethod
from tropembed.planarization import Planarization, is_bend, is_dummy
from tropembed.utils import solve_rational_system

logger = logging.getLogger(__name__)

SegmentKey = tuple[str, int]

_SMALL_POSITIONS = [(0, 0), (2, 0), (1, 1)]


@dataclass
class Drawing:
    """A straight-line drawing of a planarized graph.

    Attributes:
        positions: Exact position of every drawn node.
        paths: Per original edge id, the nodes its polyline passes through.
        crossing_nodes: Dummy nodes still present, with the two edges crossing there.
        crossing_points: Crossings that are no longer nodes (after orthogonalization),
            keyed by the dummy they replaced.
    """

    positions: dict[Hashable, RationalPoint]
    paths: dict[str, tuple[Hashable, ...]]
    crossing_nodes: dict[Hashable, tuple[str, str]] = field(default_factory=dict)
    crossing_points: dict[Hashable, RationalPoint] = field(default_factory=dict)

    @property
    def vertices(self) -> list[Hashable]:
        """Nodes that are vertices of the drawn graph (not dummies, bends or ports)."""
        return [n for n in self.positions if not _is_auxiliary(n)]

    def segments(self) -> list[tuple[SegmentKey, LatticeSegment]]:
        """Every straight piece, keyed by ``(edge id, index along the path)``."""
        items = []
        for edge_id, path in sorted(self.paths.items()):
            for i, (a, b) in enumerate(zip(path, path[1:])):
                items.append(((edge_id, i), LatticeSegment(self.positions[a], self.positions[b])))
        return items

    def edge_segments(self, edge_id: str) -> list[LatticeSegment]:
        path = self.paths[edge_id]
        return [
            LatticeSegment(self.positions[a], self.positions[b]) for a, b in zip(path, path[1:])
        ]

    def crossing_count(self) -> int:
        return len(find_crossings(self.segments()))

    def scaled(self, factor: Fraction) -> "Drawing":
        return Drawing(
            {n: p.scaled(factor) for n, p in self.positions.items()},
            dict(self.paths),
            dict(self.crossing_nodes),
            {n: p.scaled(factor) for n, p in self.crossing_points.items()},
        )

    def bounding_box(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [p.x for p in self.positions.values()]
        ys = [p.y for p in self.positions.values()]
        return min(xs), min(ys), max(xs), max(ys)


def _is_auxiliary(node: Hashable) -> bool:
    return is_dummy(node) or is_bend(node)


def _half(vector: tuple[Fraction, Fraction]) -> int:
    x, y = vector
    return 0 if y > 0 or (y == 0 and x > 0) else 1


def _ccw_compare(a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]) -> int:
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return ha - hb
    cross = a[0] * b[1] - a[1] * b[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def cyclic_order(center: RationalPoint, around: Mapping[Hashable, RationalPoint]) -> list[Hashable]:
    """Nodes sorted counter-clockwise by direction from ``center``, exactly."""
    vectors = {n: (p.x - center.x, p.y - center.y) for n, p in around.items()}
    return sorted(vectors, key=cmp_to_key(lambda a, b: _ccw_compare(vectors[a], vectors[b])))


def _strand_neighbors(
    paths: Mapping[str, Sequence[Hashable]], node: Hashable, edge_id: str
) -> tuple[Hashable, Hashable]:
    path = paths[edge_id]
    i = list(path).index(node)
    return path[i - 1], path[i + 1]


def crossing_alternates(drawing: Drawing, dummy: Hashable) -> bool:
    """True if the two edges through ``dummy`` alternate around it."""
    first, second = drawing.crossing_nodes[dummy]
    strand = set(_strand_neighbors(drawing.paths, dummy, first))
    other = _strand_neighbors(drawing.paths, dummy, second)
    around = {n: drawing.positions[n] for n in (*strand, *other)}
    pattern = [n in strand for n in cyclic_order(drawing.positions[dummy], around)]
    return pattern in ([True, False, True, False], [False, True, False, True])


def check_plane(drawing: Drawing) -> None:
    """Check that a drawing has no crossings and its dummies alternate.

    Raises:
        NotPlanar: On any crossing, overlap, repeated position or touching dummy.
    """
    if len(set(drawing.positions.values())) != len(drawing.positions):
        raise NotPlanar("two nodes share a position")
    try:
        records = find_crossings(drawing.segments())
    except OverlapError as e:
        raise NotPlanar(f"drawing is degenerate: {e}") from e
    if records:
        raise NotPlanar(f"drawing has {len(records)} unexpected crossings")
    for dummy in drawing.crossing_nodes:
        if not crossing_alternates(drawing, dummy):
            raise NotPlanar(f"edges through {dummy} touch instead of crossing")


def _grid_positions(p: Planarization) -> dict[Hashable, RationalPoint]:
    raw = nx.combinatorial_embedding_to_pos(p.embedding, fully_triangulate=False)
    return {n: RationalPoint(int(x), int(y)) for n, (x, y) in raw.items()}


def _barycentric_positions(p: Planarization) -> dict[Hashable, RationalPoint]:
    nodes = list(p.embedding.nodes)
    if len(nodes) < 4:
        return {n: RationalPoint(*_SMALL_POSITIONS[i]) for i, n in enumerate(nodes)}
    triangulated, outer = triangulate_embedding(p.embedding, fully_triangulate=True)
    fixed = dict(zip(outer[:3], (RationalPoint(0, 0), RationalPoint(1, 0), RationalPoint(0, 1))))
    inner = [n for n in nodes if n not in fixed]
    index = {n: i for i, n in enumerate(inner)}
    matrix = [[Fraction(0)] * len(inner) for _ in inner]
    rhs_x = [Fraction(0)] * len(inner)
    rhs_y = [Fraction(0)] * len(inner)
    for n in inner:
        row = index[n]
        neighbors = list(triangulated.neighbors(n))
        matrix[row][row] = Fraction(len(neighbors))
        for w in neighbors:
            if w in fixed:
                rhs_x[row] += fixed[w].x
                rhs_y[row] += fixed[w].y
            else:
                matrix[row][index[w]] -= 1
    xs = solve_rational_system(matrix, rhs_x) if inner else []
    ys = solve_rational_system(matrix, rhs_y) if inner else []
    positions = dict(fixed)
    for n in inner:
        positions[n] = RationalPoint(xs[index[n]], ys[index[n]])
    return positions


def straight_line_draw(
    p: Planarization, method: Union[DrawingMethod, str] = DrawingMethod.GRID
) -> Drawing:
    """Straight-line plane drawing of a planarization.

    Args:
        p: Planarization with its embedding.
        method: ``grid`` for integer grid coordinates, ``barycentric`` for a
            Tutte drawing of a full triangulation with the outer triangle at
            ``(0,0), (1,0), (0,1)``.

    Raises:
        NotPlanar: If the result is not a plane drawing respecting the crossings.
    """
    method = DrawingMethod(method)
    if p.embedding is None:
        planar, embedding = nx.check_planarity(p.graph)
        if not planar:
            raise NotPlanar("planarized graph is not planar")
        p.embedding = embedding
    if p.graph.number_of_nodes() == 1:
        positions = {next(iter(p.graph.nodes)): RationalPoint(0, 0)}
    elif method is DrawingMethod.GRID:
        positions = _grid_positions(p)
    else:
        positions = _barycentric_positions(p)
    drawing = Drawing(positions, dict(p.paths), dict(p.crossing_pairs))
    check_plane(drawing)
    logger.info(f"{method.value} drawing of {len(positions)} nodes with {p.k} crossings")
    return drawing


# Orthogonalization


def _linf(dx: Fraction, dy: Fraction) -> Fraction:
    return max(abs(dx), abs(dy))


def _segment_meets_box(segment: LatticeSegment, center: RationalPoint, r: Fraction) -> bool:
    """Exact Liang-Barsky test of a segment against a closed axis-parallel box."""
    x0, y0 = segment.start.x, segment.start.y
    dx, dy = segment.end.x - x0, segment.end.y - y0
    low, high = Fraction(0), Fraction(1)
    for p, q in (
        (-dx, x0 - (center.x - r)),
        (dx, (center.x + r) - x0),
        (-dy, y0 - (center.y - r)),
        (dy, (center.y + r) - y0),
    ):
        if p == 0:
            if q < 0:
                return False
            continue
        t = q / p
        if p < 0:
            low = max(low, t)
        else:
            high = min(high, t)
        if low > high:
            return False
    return True


def _check_neighborhoods(drawing: Drawing, r: Fraction) -> None:
    centers = {d: drawing.positions[d] for d in drawing.crossing_nodes}
    names = sorted(centers, key=str)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            ca, cb = centers[a], centers[b]
            if _linf(ca.x - cb.x, ca.y - cb.y) <= 2 * r:
                raise NeighborhoodConflict(f"neighborhoods of {a} and {b} overlap")
    for dummy, c in centers.items():
        for node, point in drawing.positions.items():
            if node != dummy and _linf(point.x - c.x, point.y - c.y) <= r:
                raise NeighborhoodConflict(f"{node} lies in the neighborhood of {dummy}")
        for (edge_id, i), segment in drawing.segments():
            path = drawing.paths[edge_id]
            if dummy in (path[i], path[i + 1]):
                continue
            if _segment_meets_box(segment, c, r):
                raise NeighborhoodConflict(
                    f"segment {i} of {edge_id} enters the neighborhood of {dummy}"
                )


def _initial_radius(drawing: Drawing, cap: Fraction) -> Fraction:
    """Half the smallest L-inf distance from a crossing to any other node, at most ``cap``."""
    closest: Optional[Fraction] = None
    for dummy in drawing.crossing_nodes:
        c = drawing.positions[dummy]
        for node, point in drawing.positions.items():
            if node != dummy:
                d = _linf(point.x - c.x, point.y - c.y)
                closest = d if closest is None else min(closest, d)
    if closest is None:
        return cap
    return min(cap, closest / 2)


def box_angle(dx: Fraction, dy: Fraction) -> Fraction:
    """Position in ``[0, 8)`` of the direction ``(dx, dy)`` on the unit L-inf square.

    The square is walked counter-clockwise from ``(1, 0)``; the axis directions
    sit at 0, 2, 4 and 6 and the corners at 1, 3, 5 and 7. The order agrees
    with the order of true angles.

    Example:
        >>> box_angle(Fraction(-2), Fraction(2))
        Fraction(3, 1)
    """
    m = _linf(dx, dy)
    u, v = dx / m, dy / m
    if u == 1 and v >= 0:
        return v
    if v == 1:
        return 2 - u
    if u == -1:
        return 4 - v
    if v == -1:
        return 6 + u
    return 8 + v


def box_point(c: RationalPoint, rho: Fraction, angle: Fraction) -> RationalPoint:
    """The point at ``angle`` on the square of L-inf radius ``rho`` around ``c``."""
    a = angle % 8
    if a <= 1:
        u, v = Fraction(1), a
    elif a <= 3:
        u, v = 2 - a, Fraction(1)
    elif a <= 5:
        u, v = Fraction(-1), 4 - a
    elif a <= 7:
        u, v = a - 6, Fraction(-1)
    else:
        u, v = Fraction(1), a - 8
    return c.offset(rho * u, rho * v)


def _ring_walk(
    c: RationalPoint, rho: Fraction, start: Fraction, end: Fraction
) -> list[RationalPoint]:
    lo, hi = min(start, end), max(start, end)
    corners = [Fraction(k) for k in range(math.floor(lo) + 1, math.ceil(hi)) if k % 2 == 1]
    if end < start:
        corners.reverse()
    return [box_point(c, rho, a) for a in (start, *corners, end)]


def _arc_covers(start: Fraction, end: Fraction, angle: Fraction) -> bool:
    lo, hi = min(start, end), max(start, end)
    return angle + 8 * math.ceil((lo - angle) / 8) <= hi


def _port_candidates(exits: Sequence[Fraction]) -> list[list[Fraction]]:
    # ports keep the cyclic order of the exits, so consecutive ports are 2 apart
    base = math.floor(exits[0])
    options = [
        [Fraction(t + 2 * i) for i in range(4)] for t in range(base - 8, base + 9) if t % 2 == 0
    ]

    def cost(ports: list[Fraction]) -> tuple:
        moves = [abs(p - e) for p, e in zip(ports, exits)]
        return max(moves), sum(moves), ports[0]

    return sorted(options, key=cost)


def _ring_order(exits: Sequence[Fraction], ports: Sequence[Fraction]) -> Optional[list[int]]:
    """Strands from the innermost ring outwards, or None if the arcs cannot be nested."""
    g = nx.DiGraph()
    g.add_nodes_from(range(4))
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            # an edge i -> j puts the ring of i inside the ring of j
            if _arc_covers(exits[i], ports[i], exits[j]):
                g.add_edge(i, j)
            if _arc_covers(exits[i], ports[i], ports[j]):
                g.add_edge(j, i)
    if not nx.is_directed_acyclic_graph(g):
        return None
    return list(nx.lexicographical_topological_sort(g))


def _local_routes(
    drawing: Drawing, dummy: Hashable, r: Fraction
) -> dict[Hashable, list[RationalPoint]]:
    """For each of the four neighbors of a crossing, the route from its fragment to its port.

    A route leaves the fragment on its own square ring, walks along the ring
    to an axis direction and ends there; the port on the opposite axis side
    belongs to the other half of the same strand.
    """
    c = drawing.positions[dummy]
    first, second = drawing.crossing_nodes[dummy]
    neighbors = [*_strand_neighbors(drawing.paths, dummy, first)]
    neighbors += [*_strand_neighbors(drawing.paths, dummy, second)]
    angles = {}
    for n in neighbors:
        point = drawing.positions[n]
        angles[n] = box_angle(point.x - c.x, point.y - c.y)
    order = sorted(neighbors, key=lambda n: angles[n])
    exits = [angles[n] for n in order]
    for ports in _port_candidates(exits):
        rings = _ring_order(exits, ports)
        if rings is None:
            continue
        routes = {}
        for i, n in enumerate(order):
            rho = r * (rings.index(i) + 1) / 5
            routes[n] = _ring_walk(c, rho, exits[i], ports[i])
        return routes
    raise NeighborhoodConflict(f"no port assignment found for {dummy}")


def _simplify(points: Sequence[RationalPoint]) -> list[RationalPoint]:
    """Drop repeated points and interior points where the polyline goes straight on."""
    kept: list[RationalPoint] = []
    for p in points:
        if kept and kept[-1] == p:
            continue
        if len(kept) >= 2:
            a, b = kept[-2], kept[-1]
            ux, uy = b.x - a.x, b.y - a.y
            vx, vy = p.x - b.x, p.y - b.y
            if ux * vy - uy * vx == 0 and ux * vx + uy * vy > 0:
                kept[-1] = p
                continue
        kept.append(p)
    return kept


def _reroute(drawing: Drawing, r: Fraction) -> Drawing:
    positions = dict(drawing.positions)
    paths = {k: list(v) for k, v in drawing.paths.items()}
    points: dict[Hashable, RationalPoint] = dict(drawing.crossing_points)
    for dummy in sorted(drawing.crossing_nodes, key=str):
        routes = _local_routes(drawing, dummy, r)
        del positions[dummy]
        points[dummy] = drawing.positions[dummy]
        for edge_id in drawing.crossing_nodes[dummy]:
            path = paths[edge_id]
            i = path.index(dummy)
            before, after = _strand_neighbors(drawing.paths, dummy, edge_id)
            strand = [drawing.positions[before], *routes[before]]
            strand += [*reversed(routes[after]), drawing.positions[after]]
            spots = _simplify(strand)[1:-1]
            names = [f"{dummy}.{edge_id}.{k}" for k in range(len(spots))]
            positions.update(zip(names, spots))
            paths[edge_id] = path[:i] + names + path[i + 1 :]
    return Drawing(positions, {k: tuple(v) for k, v in paths.items()}, {}, points)


def orthogonalize_crossings(
    drawing: Drawing, radius: Fraction = Fraction(1, 4), max_attempts: int = 24
) -> Drawing:
    """Reroute every crossing so the strands cross along ``(1, 0)`` and ``(0, 1)``.

    Each crossing ``c`` gets the box ``|p - c|_inf <= r``, with ``r`` starting at
    half the distance from ``c`` to the nearest other node (at most ``radius``).
    Inside the box each of the four fragments is cut at its own square ring,
    follows the ring to an axis port and the strand runs straight through ``c``.
    Rings are nested so that no route meets another. Boxes must be pairwise
    disjoint and free of other nodes and segments; otherwise ``r`` is halved.

    Raises:
        NeighborhoodConflict: If no radius works within ``max_attempts`` halvings.
    """
    if not drawing.crossing_nodes:
        return drawing
    r = _initial_radius(drawing, Fraction(radius))
    expected = len(drawing.crossing_nodes) + len(drawing.crossing_points)
    for attempt in range(max_attempts):
        try:
            _check_neighborhoods(drawing, r)
            result = _reroute(drawing, r)
            records = find_crossings(result.segments())
            if len(records) != expected:
                raise NeighborhoodConflict(
                    f"rerouting produced {len(records)} crossings, not {expected}"
                )
        except (NeighborhoodConflict, OverlapError) as e:
            logger.warning(f"crossing neighborhoods at radius {r} rejected ({e}); halving")
            r /= 2
            continue
        logger.info(f"orthogonalized {len(drawing.crossing_nodes)} crossings at radius {r}")
        return result
    raise NeighborhoodConflict(
        f"no crossing neighborhood radius found after {max_attempts} attempts"
    )


# Rationalization


RawCoordinate = Union[float, Decimal, Fraction, int, str]


def _exact_coordinate(value: RawCoordinate) -> Fraction:
    if isinstance(value, str):
        return Fraction(Decimal(value))
    return Fraction(value)


def _crossing_signature(
    positions: Mapping[Hashable, RationalPoint], paths: Mapping[str, Sequence[Hashable]]
) -> Optional[frozenset]:
    drawing = Drawing(dict(positions), {k: tuple(v) for k, v in paths.items()})
    try:
        if len(set(positions.values())) != len(positions):
            return None
        return frozenset((r.first, r.second) for r in find_crossings(drawing.segments()))
    except (OverlapError, ValueError):
        return None


def rationalize_vertices(
    positions: Mapping[Hashable, tuple[RawCoordinate, RawCoordinate]],
    paths: Mapping[str, Sequence[Hashable]],
    crossing_nodes: Optional[Mapping[Hashable, tuple[str, str]]] = None,
    max_bits: int = 64,
) -> Drawing:
    """Snap an imported drawing to dyadic rationals without changing its crossings.

    Coordinates are read exactly (floats as their binary value, decimal strings
    as decimals). Rational input is returned unchanged; otherwise every
    coordinate is rounded to the grid ``2**-j`` for growing ``j`` until the set
    of crossing segment pairs matches the input's.

    Raises:
        PerturbationFailed: If the input is degenerate or no grid up to
            ``2**-max_bits`` keeps the crossing pattern.
    """
    crossing_nodes = dict(crossing_nodes or {})
    exact = {n: (_exact_coordinate(x), _exact_coordinate(y)) for n, (x, y) in positions.items()}
    if all(isinstance(v, (Fraction, int)) for xy in positions.values() for v in xy):
        points = {n: RationalPoint(*xy) for n, xy in exact.items()}
        return Drawing(points, {k: tuple(v) for k, v in paths.items()}, crossing_nodes)
    reference = _crossing_signature({n: RationalPoint(*xy) for n, xy in exact.items()}, paths)
    if reference is None:
        raise PerturbationFailed("input drawing is degenerate (touching, overlapping or repeated)")
    for bits in range(1, max_bits + 1):
        grid = 2**bits
        snapped = {
            n: RationalPoint(Fraction(round(x * grid), grid), Fraction(round(y * grid), grid))
            for n, (x, y) in exact.items()
        }
        if _crossing_signature(snapped, paths) == reference:
            logger.debug(f"rationalized drawing on the 1/{grid} grid")
            return Drawing(snapped, {k: tuple(v) for k, v in paths.items()}, crossing_nodes)
    raise PerturbationFailed(f"no dyadic grid up to 2**-{max_bits} preserves the crossings")

"""Balancing rays, corridors and the isometric embedding pipeline.

The pipeline turns a metric graph into a balanced complex in the plane:

1. loops and parallel edges are subdivided away;
2. the finite part is planarized with its crossing number of crossings;
3. the planarization is drawn with straight lines and crossings are made
   orthogonal;
4. infinite edges become rays, and the drawing is scaled until every segment
   is shorter than its share of its edge;
5. every segment that is too short gets a creneau inside a private corridor;
6. gcd-weighted rays balance every vertex.
"""

import dataclasses
import itertools
import logging
import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Union

from tropembed.audit import verify
from tropembed.creneau import (
    CreneauPath,
    CreneauSpec,
    insert_creneau_lambda,
    insert_creneau_rotated,
)
from tropembed.drawing import Drawing, orthogonalize_crossings, straight_line_draw
from tropembed.exceptions import BudgetExceeded, NeighborhoodConflict, NotInLambda, OverlapError
from tropembed.lattice import (
    RAY,
    SEGMENT,
    BalancedComplex,
    Element,
    ElementRef,
    EmbeddingMap,
    GadgetRecord,
    LatticeRay,
    LatticeSegment,
    PrimitiveVector,
    RationalPoint,
    balance_defect,
    find_crossings,
    intersect,
)
from tropembed.metric_graph import MetricGraph, ModificationTrace, normalize_simple
from tropembed.models import EmbeddingConfig, LengthPartition, Mode, Report
from tropembed.planarization import Planarization, crossing_number_exact, planarize_heuristic
from tropembed.value_group import LambdaScalar, Scalar, ValueGroup, lambda_scale, sign_of

logger = logging.getLogger(__name__)

SegmentKey = tuple[str, int]

MAX_HALVINGS = 256


# Balancing rays


def balancing_ray(defect: Sequence[int]) -> Optional[tuple[PrimitiveVector, int]]:
    """The ray that cancels an integer defect.

    Returns:
        ``None`` for a zero defect, otherwise ``(-defect / w, w)`` with
        ``w = gcd(|x|, |y|)``.

    Example:
        >>> balancing_ray((2, 4))
        (PrimitiveVector(m=-1, n=-2), 2)
    """
    x, y = defect
    if x == 0 and y == 0:
        return None
    direction, weight = PrimitiveVector.from_integers(-x, -y)
    return direction, weight


def primitive_candidates(limit: int) -> list[PrimitiveVector]:
    """Primitive vectors with coordinates in ``[-limit, limit]``, by norm then lexicographically."""
    found = [
        PrimitiveVector(m, n)
        for m in range(-limit, limit + 1)
        for n in range(-limit, limit + 1)
        if (m, n) != (0, 0) and math.gcd(m, n) == 1
    ]
    return sorted(found, key=lambda d: (d.norm2, d.m, d.n))


def split_balancing_rays(
    defect: Sequence[int], occupied: set[PrimitiveVector]
) -> list[tuple[PrimitiveVector, int]]:
    """Rays cancelling ``defect`` whose directions avoid ``occupied``.

    A single ray is used when its direction is free. Otherwise the defect is
    split as ``r1 + w * r2`` with ``r1`` the smallest free primitive vector
    not parallel to the defect and ``r2`` primitive and free as well.
    """
    single = balancing_ray(defect)
    if single is None:
        return []
    if single[0] not in occupied:
        return [single]
    target = (-defect[0], -defect[1])
    for limit in itertools.count(1):
        for first in primitive_candidates(limit):
            if first in occupied or first.cross(single[0]) == 0:
                continue
            second, weight = PrimitiveVector.from_integers(
                target[0] - first.m, target[1] - first.n
            )
            if second not in occupied and second != first:
                logger.debug(
                    f"split defect {tuple(defect)} into {tuple(first)} and {weight}x{tuple(second)}"
                )
                return [(first, 1), (second, weight)]
    raise AssertionError("unreachable")


def attach_balancing_rays(complex_: BalancedComplex) -> BalancedComplex:
    """Append balancing rays at every unbalanced vertex; existing element indices are kept."""
    rays = list(complex_.rays)
    for index, point in enumerate(complex_.vertices):
        defect = balance_defect(complex_, index)
        occupied = {direction for _, direction, _ in complex_.incidence[index]}
        for direction, weight in split_balancing_rays(defect, occupied):
            rays.append(LatticeRay(point, direction, weight))
    added = len(rays) - len(complex_.rays)
    logger.info(f"attached {added} balancing rays")
    return BalancedComplex(complex_.vertices, complex_.segments, tuple(rays))


# Infinite edges


def choose_infinite_rays(drawing: Drawing, graph: MetricGraph) -> dict[str, LatticeRay]:
    """A ray for every infinite edge, leaving its finite endpoint.

    The direction is the smallest primitive vector that is free at the vertex
    and points away from the centroid of the drawn vertices (ties go to the
    larger outward component, then lexicographically). Directions whose ray
    crosses nothing are preferred; directions touching a vertex or running
    along a segment are never used when another exists.
    """
    points = [drawing.positions[v] for v in graph.finite_vertices]
    cx = sum((p.x for p in points), Fraction(0)) / len(points)
    cy = sum((p.y for p in points), Fraction(0)) / len(points)
    segments = [s for _, s in drawing.segments()]
    chosen: dict[str, LatticeRay] = {}
    for edge in graph.infinite_edges:
        vertex = edge.u if edge.v in graph.infinite_vertices else edge.v
        apex = drawing.positions[vertex]
        occupied = {s.direction for s in segments if s.start == apex}
        occupied |= {-s.direction for s in segments if s.end == apex}
        occupied |= {r.direction for r in chosen.values() if r.apex == apex}
        outward = (apex.x - cx, apex.y - cy)
        candidates = [
            d
            for d in primitive_candidates(4)
            if d not in occupied and (outward == (0, 0) or d.m * outward[0] + d.n * outward[1] > 0)
        ]
        candidates.sort(key=lambda d: (d.norm2, -(d.m * outward[0] + d.n * outward[1]), d.m, d.n))
        others = segments + list(chosen.values())
        ray = _best_ray(apex, candidates, others)
        chosen[edge.id] = ray
        logger.debug(f"infinite edge {edge.id} leaves {vertex} along {tuple(ray.direction)}")
    return chosen


def _best_ray(
    apex: RationalPoint, candidates: Sequence[PrimitiveVector], others: Sequence[Element]
) -> LatticeRay:
    fallback = None
    for direction in candidates:
        ray = LatticeRay(apex, direction)
        crossings = 0
        try:
            for other in others:
                if intersect(ray, other) is not None:
                    crossings += 1
        except OverlapError:
            continue
        if crossings == 0:
            return ray
        if fallback is None:
            fallback = ray
    if fallback is None:
        fallback = LatticeRay(apex, candidates[0])
    return fallback


# Scaling


def through_segments(drawing: Drawing) -> set[SegmentKey]:
    """Keys of the segments that carry a crossing."""
    return {key for r in find_crossings(drawing.segments()) for key in (r.first, r.second)}


def _edge_factors(
    drawing: Drawing, graph: MetricGraph, through: set[SegmentKey], partition: LengthPartition
) -> dict[str, Fraction]:
    # scale * factor < length is the feasibility condition per edge
    factors = {}
    for edge in graph.finite_edges:
        lengths = [s.extent for s in drawing.edge_segments(edge.id)]
        fixed = [i for i in range(len(lengths)) if (edge.id, i) in through]
        free = [i for i in range(len(lengths)) if (edge.id, i) not in through]
        crossing_length = sum((lengths[i] for i in fixed), Fraction(0))
        if partition is LengthPartition.UNIFORM:
            factors[edge.id] = max(lengths[i] * len(free) + crossing_length for i in free)
        else:
            factors[edge.id] = sum(lengths, Fraction(0))
    return factors


def _initial_scale(group: Optional[ValueGroup]) -> Scalar:
    if group is None or group.unit is not None:
        return Fraction(1)
    first = group.generator(group.labels[0])
    scale = lambda_scale(first, Fraction(first.sign()))
    while scale > Fraction(1, 2):
        scale = lambda_scale(scale, Fraction(1, 2))
    return scale


def scale_to_fit(
    drawing: Drawing,
    graph: MetricGraph,
    group: Optional[ValueGroup] = None,
    partition: Union[LengthPartition, str] = LengthPartition.UNIFORM,
) -> tuple[Drawing, Scalar]:
    """Shrink a drawing until every segment is shorter than its share of its edge.

    The scale is ``1, 1/2, 1/4, ...``. For a value group without rational
    elements it is ``q g / 2**j`` for the first generator ``g``, starting in
    ``(0, 1/2]``.

    Returns:
        ``(scaled drawing, scale)``.

    Example:
        A unit triangle drawn at ``(0,0), (3,0), (0,3)`` gets scale ``1/4``.
    """
    partition = LengthPartition(partition)
    factors = _edge_factors(drawing, graph, through_segments(drawing), partition)
    scale = _initial_scale(group)
    for _ in range(MAX_HALVINGS):
        if all(sign_of(graph.edge(e).length - scale * f) > 0 for e, f in factors.items()):
            if scale != 1:
                logger.info(f"scaled drawing by {scale}")
            return (drawing if scale == 1 else drawing.scaled(scale)), scale
        scale = scale / 2
    raise NeighborhoodConflict(f"no scale found after {MAX_HALVINGS} halvings")


def segment_targets(
    drawing: Drawing,
    graph: MetricGraph,
    through: set[SegmentKey],
    partition: Union[LengthPartition, str] = LengthPartition.UNIFORM,
) -> dict[SegmentKey, Scalar]:
    """Target tropical length of every drawn segment.

    Segments carrying a crossing keep their length; the rest of the edge
    length is shared by the other segments, equally or in proportion to
    their drawn lengths.
    """
    partition = LengthPartition(partition)
    targets: dict[SegmentKey, Scalar] = {}
    for edge in graph.finite_edges:
        pieces = drawing.edge_segments(edge.id)
        free = [i for i in range(len(pieces)) if (edge.id, i) not in through]
        remaining = edge.length
        for i, piece in enumerate(pieces):
            if (edge.id, i) in through:
                targets[(edge.id, i)] = piece.extent
                remaining = remaining - piece.extent
        free_length = sum((pieces[i].extent for i in free[1:]), pieces[free[0]].extent)
        for i in free:
            if partition is LengthPartition.UNIFORM:
                targets[(edge.id, i)] = remaining / len(free)
            else:
                targets[(edge.id, i)] = remaining * _ratio(pieces[i].extent, free_length)
    return targets


def _ratio(part: Scalar, whole: Scalar) -> Fraction:
    if not isinstance(whole, LambdaScalar):
        return Fraction(part) / Fraction(whole)
    # drawn lengths are rational multiples of the same scale
    label, coefficient = whole.coefficients[0]
    return dict(part.coefficients).get(label, Fraction(0)) / coefficient  # type: ignore[union-attr]


# Corridors


@dataclass(frozen=True)
class Corridor:
    """The rectangle ``start + a u + b v`` with ``x/3 <= a <= 2x/3`` and ``|b| <= epsilon``."""

    host: LatticeSegment
    epsilon: Scalar

    def corners(self) -> list[RationalPoint]:
        u = self.host.direction
        v = u.perpendicular()
        third = self.host.extent / 3
        near = self.host.start.step(u, third)
        far = self.host.start.step(u, 2 * third)
        return [
            near.step(v, -self.epsilon),
            far.step(v, -self.epsilon),
            far.step(v, self.epsilon),
            near.step(v, self.epsilon),
        ]

    def sides(self) -> list[LatticeSegment]:
        corners = self.corners()
        return [LatticeSegment(a, b) for a, b in zip(corners, corners[1:] + corners[:1])]

    def meets(self, element: Element) -> bool:
        """Exact test whether a segment or ray touches the closed rectangle."""
        u = self.host.direction
        v = u.perpendicular()
        d = element.direction
        origin = element.origin
        dx = origin.x - self.host.start.x
        dy = origin.y - self.host.start.y
        a0 = (dx * u.m + dy * u.n) / u.norm2
        b0 = (dx * v.m + dy * v.n) / u.norm2
        da = Fraction(d.dot(u), u.norm2)
        db = Fraction(d.dot(v), u.norm2)
        third = self.host.extent / 3
        low: Scalar = Fraction(0)
        high: Optional[Scalar] = element.extent
        # each pair (alpha, beta) stands for alpha + beta * t >= 0
        for alpha, beta in (
            (a0 - third, da),
            (2 * third - a0, -da),
            (self.epsilon - b0, -db),
            (self.epsilon + b0, db),
        ):
            if beta == 0:
                if sign_of(alpha) < 0:
                    return False
                continue
            bound = -alpha / beta
            if beta > 0:
                if sign_of(bound - low) > 0:
                    low = bound
            elif high is None or sign_of(bound - high) < 0:
                high = bound
        return high is None or sign_of(high - low) >= 0

    def meets_corridor(self, other: "Corridor") -> bool:
        return any(self.meets(side) for side in other.sides()) or any(
            other.meets(side) for side in self.sides()
        )


def build_corridors(
    hosts: Mapping[SegmentKey, LatticeSegment],
    obstacles: Sequence[tuple[Any, Element]],
    cap: Optional[Scalar] = None,
) -> dict[SegmentKey, Corridor]:
    """Pairwise disjoint corridors, one per host, clear of every obstacle.

    Each half-width starts at ``min(x/6, cap)`` and is halved until the
    rectangle is exactly clear. Obstacles crossing the host itself are ignored.

    Raises:
        NeighborhoodConflict: If a corridor stays blocked after repeated halving.
    """
    accepted: dict[SegmentKey, Corridor] = {}
    for key in sorted(hosts):
        host = hosts[key]
        blocking = []
        for other_key, element in obstacles:
            if other_key == key:
                continue
            try:
                if intersect(host, element) is not None:
                    continue
            except OverlapError:
                continue
            blocking.append(element)
        epsilon = host.extent / 6
        if cap is not None and sign_of(cap - epsilon) < 0:
            epsilon = cap
        for _ in range(MAX_HALVINGS):
            corridor = Corridor(host, epsilon)
            if not any(corridor.meets(e) for e in blocking) and not any(
                corridor.meets_corridor(c) for c in accepted.values()
            ):
                accepted[key] = corridor
                break
            epsilon = epsilon / 2
        else:
            raise NeighborhoodConflict(f"no clear corridor around segment {key}")
    logger.info(f"built {len(accepted)} corridors")
    return accepted


# Pipeline


@dataclass
class EmbeddingResult:
    """Everything produced by one pipeline run.

    Unpacks as ``(complex, map, report)``.
    """

    complex: BalancedComplex
    map: EmbeddingMap
    report: Report
    graph: MetricGraph
    source: MetricGraph
    trace: ModificationTrace
    group: Optional[ValueGroup]
    scale: Scalar
    planarization: Planarization

    def __iter__(self) -> Iterator[Any]:
        return iter((self.complex, self.map, self.report))


def _planarize(graph: MetricGraph, config: EmbeddingConfig) -> Planarization:
    finite = graph.finite_subgraph()
    if config.exact_crossings:
        try:
            _, planarization = crossing_number_exact(finite, config.budget)
            return planarization
        except BudgetExceeded as e:
            logger.warning(f"{e}; falling back to the heuristic (result is an upper bound)")
    _, planarization = planarize_heuristic(finite, config.seed)
    return planarization


def _prepare_lengths(graph: MetricGraph, mode: Mode, group: Optional[ValueGroup]) -> MetricGraph:
    edges = []
    for edge in graph.edges:
        length = edge.length
        if edge.is_infinite:
            edges.append(edge)
            continue
        if mode is Mode.LAMBDA:
            length = group.lift(length)  # type: ignore[union-attr]
        elif isinstance(length, LambdaScalar):
            if not length.is_rational():
                raise NotInLambda(f"edge {edge.id} has a non-rational length in rational mode")
            length = length.to_fraction()
        edges.append(dataclasses.replace(edge, length=length))
    return graph.replace(edges=edges)


def _lift_point(group: Optional[ValueGroup], point: RationalPoint) -> RationalPoint:
    if group is None:
        return point
    return RationalPoint(group.lift(point.x), group.lift(point.y))


def embed_isometric(
    graph: MetricGraph,
    config: Optional[EmbeddingConfig] = None,
    group: Optional[ValueGroup] = None,
) -> EmbeddingResult:
    """Embed a metric graph as a balanced complex, isometrically on its edges.

    Args:
        graph: The input metric graph.
        config: Pipeline settings; defaults to :class:`EmbeddingConfig`.
        group: Value group for lambda mode; the rationals when omitted.

    Returns:
        The complex, the embedding map and the verification report, with the
        normalized graph and modification trace.

    Raises:
        NotInLambda: If a length or coordinate is not in the value group.
    """
    config = config or EmbeddingConfig()
    if config.mode is Mode.LAMBDA:
        group = group or ValueGroup.rationals(config.precision)
    else:
        group = None
    normalized, trace = normalize_simple(graph)
    normalized = _prepare_lengths(normalized, config.mode, group)
    logger.info(
        f"embedding graph with {len(normalized.vertices)} vertices and "
        f"{len(normalized.edges)} edges in {config.mode.value} mode"
    )

    planarization = _planarize(normalized, config)
    drawing = straight_line_draw(planarization, config.drawing_method)
    drawing = orthogonalize_crossings(
        drawing, config.neighborhood_radius, config.max_neighborhood_attempts
    )
    infinite_rays = choose_infinite_rays(drawing, normalized)
    through = through_segments(drawing)

    scaled, scale = scale_to_fit(drawing, normalized, group, config.partition)
    positions = {n: _lift_point(group, p) for n, p in scaled.positions.items()}
    scaled = Drawing(positions, scaled.paths, scaled.crossing_nodes, scaled.crossing_points)
    rays = {
        e: LatticeRay(_lift_point(group, scaled_point(r.apex, scale)), r.direction)
        for e, r in infinite_rays.items()
    }

    targets = segment_targets(scaled, normalized, through, config.partition)
    pieces = dict(scaled.segments())
    hosts = {key: seg for key, seg in pieces.items() if key not in through}
    obstacles: list[tuple[Any, Element]] = list(pieces.items())
    obstacles += [(("ray", e), r) for e, r in sorted(rays.items())]
    cap: Optional[Scalar] = None
    if config.epsilon is not None:
        cap = config.epsilon * scale
        if group is not None and not isinstance(cap, LambdaScalar):
            cap = group.lift(cap)
    corridors = build_corridors(hosts, obstacles, cap)

    gadgets: dict[SegmentKey, CreneauPath] = {}
    records = []
    for key in sorted(hosts):
        host, corridor = hosts[key], corridors[key]
        if group is None:
            path = insert_creneau_rotated(CreneauSpec(host, targets[key], corridor.epsilon))
        else:
            path = insert_creneau_lambda(host, targets[key], corridor.epsilon, group)
        gadgets[key] = path
        records.append(
            GadgetRecord(key[0], host.start, host.end, corridor.epsilon, targets[key], path.teeth)
        )

    complex_, embedding_map = _assemble(normalized, scaled, rays, gadgets, records)
    complex_ = attach_balancing_rays(complex_)
    report = verify(
        complex_,
        embedding_map,
        normalized,
        expected_crossings=planarization.k,
        exact_flag=planarization.exact,
        group=group,
        source=graph,
        trace=trace,
        ray_report_limit=config.ray_report_limit,
    )
    logger.info(
        f"embedding done: {len(complex_.segments)} segments, {len(complex_.rays)} rays, "
        f"{report.crossings_on_gamma} crossings, passed={report.passed}"
    )
    return EmbeddingResult(
        complex_, embedding_map, report, normalized, graph, trace, group, scale, planarization
    )


def scaled_point(point: RationalPoint, scale: Scalar) -> RationalPoint:
    return point if scale == 1 else point.scaled(scale)


def _assemble(
    graph: MetricGraph,
    drawing: Drawing,
    rays: Mapping[str, LatticeRay],
    gadgets: Mapping[SegmentKey, CreneauPath],
    records: Sequence[GadgetRecord],
) -> tuple[BalancedComplex, EmbeddingMap]:
    segments: list[LatticeSegment] = []
    all_rays: list[LatticeRay] = []
    chains: dict[str, tuple[ElementRef, ...]] = {}
    for edge in graph.edges:
        if edge.is_infinite:
            all_rays.append(rays[edge.id])
            chains[edge.id] = (ElementRef(RAY, len(all_rays) - 1),)
            continue
        pieces: list[LatticeSegment] = []
        for i, host in enumerate(drawing.edge_segments(edge.id)):
            gadget = gadgets.get((edge.id, i))
            if gadget is None:
                pieces.append(host)
            else:
                pieces.extend(gadget.segments)
                all_rays.extend(gadget.rays)
        if drawing.paths[edge.id][0] != edge.u:
            pieces = [p.reversed() for p in reversed(pieces)]
        refs = []
        for piece in pieces:
            segments.append(piece)
            refs.append(ElementRef(SEGMENT, len(segments) - 1))
        chains[edge.id] = tuple(refs)
    images = [drawing.positions[v] for v in graph.finite_vertices]
    seen = dict.fromkeys(images)
    for segment in segments:
        seen.setdefault(segment.start)
        seen.setdefault(segment.end)
    for ray in all_rays:
        seen.setdefault(ray.apex)
    vertices = tuple(seen)
    index = {p: i for i, p in enumerate(vertices)}
    vertex_images: dict[str, Optional[int]] = {v: None for v in graph.infinite_vertices}
    for v in graph.finite_vertices:
        vertex_images[v] = index[drawing.positions[v]]
    complex_ = BalancedComplex(vertices, tuple(segments), tuple(all_rays))
    return complex_, EmbeddingMap(chains, vertex_images, tuple(records))

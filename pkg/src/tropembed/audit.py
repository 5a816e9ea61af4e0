"""Independent verification of embedded complexes.

The checks here recompute directions, lengths, defects and crossings with
their own orientation predicates instead of the constructions in
:mod:`tropembed.lattice`, so a construction bug cannot certify itself. Only
the bounding-box pruning of candidate pairs is shared.
"""

import logging
import math
from collections.abc import Sequence
from fractions import Fraction
from typing import Optional

from tropembed.exceptions import TropicalError
from tropembed.lattice import (
    RAY,
    SEGMENT,
    BalancedComplex,
    Element,
    ElementRef,
    EmbeddingMap,
    LatticeSegment,
    RationalPoint,
    candidate_pairs,
)
from tropembed.metric_graph import (
    Edge,
    MetricGraph,
    ModificationTrace,
    Subdivide,
    contract_degree_two,
    replay,
)
from tropembed.models import FailureCategory, Report
from tropembed.projections import projections
from tropembed.value_group import LambdaScalar, Scalar, ValueGroup, sign_of

logger = logging.getLogger(__name__)

Vector = tuple[int, int]

HORIZONTAL = {(1, 0), (-1, 0)}
VERTICAL = {(0, 1), (0, -1)}


def _integer_vector(dx: Fraction, dy: Fraction) -> Vector:
    scale = dx.denominator * dy.denominator
    m, n = int(dx * scale), int(dy * scale)
    g = math.gcd(m, n)
    return m // g, n // g


def _direction(dx: Scalar, dy: Scalar) -> Vector:
    """Primitive integer vector positively proportional to ``(dx, dy)``.

    Raises:
        ValueError: If the vector is zero or has an irrational slope.
    """
    if not isinstance(dx, LambdaScalar) and not isinstance(dy, LambdaScalar):
        if dx == 0 and dy == 0:
            raise ValueError("zero vector")
        return _integer_vector(Fraction(dx), Fraction(dy))
    group = dx.group if isinstance(dx, LambdaScalar) else dy.group  # type: ignore[union-attr]
    xs = dict(group.lift(dx).coefficients)
    ys = dict(group.lift(dy).coefficients)
    vector: Optional[Vector] = None
    for label in sorted(set(xs) | set(ys)):
        pair = _integer_vector(xs.get(label, Fraction(0)), ys.get(label, Fraction(0)))
        if vector is None:
            vector = pair
        elif pair not in (vector, (-vector[0], -vector[1])):
            raise ValueError(f"({dx}, {dy}) has no rational slope")
    if vector is None:
        raise ValueError("zero vector")
    along = dx if vector[0] != 0 else dy
    component = vector[0] if vector[0] != 0 else vector[1]
    if sign_of(along) * component < 0:
        vector = (-vector[0], -vector[1])
    return vector


def _segment_direction(segment: LatticeSegment) -> Vector:
    return _direction(segment.end.x - segment.start.x, segment.end.y - segment.start.y)


def _length(segment: LatticeSegment) -> Scalar:
    m, n = _segment_direction(segment)
    if m != 0:
        return (segment.end.x - segment.start.x) / m
    return (segment.end.y - segment.start.y) / n


def _side(origin: RationalPoint, vector: Vector, point: RationalPoint) -> int:
    """Orientation of ``point`` against the directed line ``origin + t * vector``."""
    return sign_of(vector[0] * (point.y - origin.y) - vector[1] * (point.x - origin.x))


def _along(origin: RationalPoint, vector: Vector, point: RationalPoint) -> Scalar:
    """Position of ``point`` along ``vector``, in units of ``|vector|^2``."""
    return vector[0] * (point.x - origin.x) + vector[1] * (point.y - origin.y)


class _Piece:
    """A segment or ray with an independently computed direction."""

    def __init__(self, element: Element):
        if isinstance(element, LatticeSegment):
            self.start = element.start
            self.end: Optional[RationalPoint] = element.end
            self.vector = _segment_direction(element)
            self.reach: Optional[Scalar] = _along(self.start, self.vector, element.end)
        else:
            self.start = element.apex
            self.end = None
            self.vector = (element.direction.m, element.direction.n)
            self.reach = None

    def position(self, point: RationalPoint) -> str:
        """Where a point of the supporting line lies: start, end, interior or outside."""
        t = _along(self.start, self.vector, point)
        s = sign_of(t)
        if s == 0:
            return "start"
        if s < 0:
            return "outside"
        if self.reach is None:
            return "interior"
        e = sign_of(self.reach - t)
        if e == 0:
            return "end"
        return "interior" if e > 0 else "outside"

    def span_on(self, other: "_Piece") -> tuple[Optional[Scalar], Optional[Scalar]]:
        """Interval covered on the collinear piece ``other``; ``None`` is unbounded."""
        a = _along(other.start, other.vector, self.start)
        same_way = self.vector == other.vector
        if self.end is None:
            return (a, None) if same_way else (None, a)
        b = _along(other.start, other.vector, self.end)
        return (a, b) if same_way else (b, a)


def _compare(first: _Piece, second: _Piece) -> tuple[str, Optional[RationalPoint]]:
    """Classify how two pieces meet: none, shared, cross, touch or overlap."""
    det = first.vector[0] * second.vector[1] - first.vector[1] * second.vector[0]
    if det == 0:
        if _side(first.start, first.vector, second.start) != 0:
            return "none", None
        return _compare_collinear(first, second), None
    ox = second.start.x - first.start.x
    oy = second.start.y - first.start.y
    s = (ox * second.vector[1] - oy * second.vector[0]) / det
    point = RationalPoint(first.start.x + s * first.vector[0], first.start.y + s * first.vector[1])
    where = (first.position(point), second.position(point))
    if "outside" in where:
        return "none", None
    if where == ("interior", "interior"):
        return "cross", point
    if "interior" in where:
        return "touch", point
    return "shared", point


def _compare_collinear(first: _Piece, second: _Piece) -> str:
    lo, hi = second.span_on(first)
    left: Scalar = Fraction(0) if lo is None or sign_of(lo) < 0 else lo
    right = hi
    if first.reach is not None and (hi is None or sign_of(hi - first.reach) > 0):
        right = first.reach
    if right is None:
        return "overlap"
    gap = sign_of(right - left)
    if gap > 0:
        return "overlap"
    return "shared" if gap == 0 else "none"


def _is_orthogonal(first: Vector, second: Vector) -> bool:
    return (first in HORIZONTAL and second in VERTICAL) or (
        first in VERTICAL and second in HORIZONTAL
    )


def verify(
    complex_: BalancedComplex,
    map_: EmbeddingMap,
    graph: MetricGraph,
    expected_crossings: Optional[int] = None,
    exact_flag: bool = True,
    group: Optional[ValueGroup] = None,
    source: Optional[MetricGraph] = None,
    trace: Optional[ModificationTrace] = None,
    ray_report_limit: int = 4000,
) -> Report:
    """Re-derive every certificate of an embedding from scratch.

    Args:
        complex_: The complex to check.
        map_: Images of the graph's edges and vertices.
        graph: The graph that was embedded, after normalization.
        expected_crossings: Crossing count the embedding claims, if any.
        exact_flag: Whether that count is claimed to be the crossing number.
        group: Value group to certify membership in.
        source: Graph before normalization, checked against ``trace``.
        trace: Modification moves from ``source`` to ``graph``.
        ray_report_limit: Largest element count for which contacts involving
            rays are counted.

    Returns:
        A report. Failures are recorded, never raised.

    Example:
        >>> report = verify(complex_, map_, graph)
        >>> report.passed
        True
    """
    report = Report(crossings_expected=expected_crossings, crossings_exact_flag=exact_flag)
    if _check_structure(complex_, map_, graph, report):
        _check_balance(complex_, report)
        _check_chains(complex_, map_, graph, report)
        _check_gadgets(complex_, map_, graph, report)
        _check_geometry(complex_, report, ray_report_limit)
        if group is not None:
            _check_lambda(complex_, map_, group, report)
        if source is not None and trace is not None:
            _check_modification(source, trace, graph, report)
    if not report.crossings_match:
        report.add(
            FailureCategory.CROSSINGS,
            "complex",
            f"found {report.crossings_on_gamma} crossings, expected {report.crossings_expected}",
        )
    _summarize(report)
    logger.info(f"verification finished with {len(report.failures)} failures")
    return report


def _summarize(report: Report) -> None:
    failed = report.failures.categories()
    report.balanced = FailureCategory.BALANCE not in failed
    report.isometric = FailureCategory.ISOMETRY not in failed
    report.infinite_edges_ok = FailureCategory.INFINITE not in failed
    report.unit_weights = FailureCategory.WEIGHT not in failed
    report.chains_connected = FailureCategory.CHAIN not in failed
    report.geometry_valid = not failed & {FailureCategory.GEOMETRY, FailureCategory.STRUCTURE}
    report.orthogonal_crossings = FailureCategory.ORTHOGONALITY not in failed
    if report.lambda_certified is not None:
        report.lambda_certified = not failed & {FailureCategory.LAMBDA, FailureCategory.PROJECTION}
    if report.modification_replayed is not None:
        report.modification_replayed = FailureCategory.MODIFICATION not in failed


def _check_structure(
    complex_: BalancedComplex, map_: EmbeddingMap, graph: MetricGraph, report: Report
) -> bool:
    """References, ownership and vertex images; the other checks need these intact."""
    ok = True
    sizes = {SEGMENT: len(complex_.segments), RAY: len(complex_.rays)}
    owners: dict[ElementRef, str] = {}
    for edge in graph.edges:
        if edge.id not in map_.edge_chains:
            report.add(FailureCategory.STRUCTURE, f"edge:{edge.id}", "edge has no image")
            ok = False
    for edge_id, chain in map_.edge_chains.items():
        if not graph.has_edge(edge_id):
            report.add(FailureCategory.STRUCTURE, f"edge:{edge_id}", "image of an unknown edge")
            ok = False
        if not chain:
            report.add(FailureCategory.STRUCTURE, f"edge:{edge_id}", "empty chain")
            ok = False
        for ref in chain:
            if ref.kind not in sizes or not 0 <= ref.index < sizes[ref.kind]:
                report.add(FailureCategory.STRUCTURE, f"edge:{edge_id}", f"{ref} does not exist")
                ok = False
            elif ref in owners:
                report.add(
                    FailureCategory.STRUCTURE, str(ref), f"shared by {owners[ref]} and {edge_id}"
                )
            else:
                owners[ref] = edge_id
    for vertex in graph.vertices:
        infinite = vertex in graph.infinite_vertices
        if vertex not in map_.vertex_images or (map_.vertex_images[vertex] is None) != infinite:
            report.add(FailureCategory.STRUCTURE, f"vertex:{vertex}", "missing or wrong image")
            ok = False
            continue
        image = map_.vertex_images[vertex]
        if image is not None and not 0 <= image < len(complex_.vertices):
            report.add(FailureCategory.STRUCTURE, f"vertex:{vertex}", f"image {image} out of range")
            ok = False
    for i in range(len(complex_.segments)):
        if ElementRef(SEGMENT, i) not in owners:
            report.add(FailureCategory.STRUCTURE, f"segment:{i}", "segment is in no chain")
    return ok


def _check_balance(complex_: BalancedComplex, report: Report) -> None:
    defects: dict[RationalPoint, list[int]] = {p: [0, 0] for p in complex_.vertices}
    for segment in complex_.segments:
        m, n = _segment_direction(segment)
        defects[segment.start][0] += segment.weight * m
        defects[segment.start][1] += segment.weight * n
        defects[segment.end][0] -= segment.weight * m
        defects[segment.end][1] -= segment.weight * n
    for i, ray in enumerate(complex_.rays):
        m, n = ray.direction.m, ray.direction.n
        if math.gcd(m, n) != 1:
            report.add(FailureCategory.STRUCTURE, f"ray:{i}", f"direction ({m}, {n}) not primitive")
        defects[ray.apex][0] += ray.weight * m
        defects[ray.apex][1] += ray.weight * n
    for index, point in enumerate(complex_.vertices):
        if defects[point] != [0, 0]:
            report.add(
                FailureCategory.BALANCE,
                f"vertex:{index}",
                f"defect {tuple(defects[point])} at {point}",
            )


def _walk(start: RationalPoint, segments: Sequence[Element]) -> Optional[RationalPoint]:
    """Follow consecutive segments from ``start``; ``None`` if they do not connect."""
    here = start
    for segment in segments:
        if not isinstance(segment, LatticeSegment):
            return None
        if segment.start == here:
            here = segment.end
        elif segment.end == here:
            here = segment.start
        else:
            return None
    return here


def _check_chains(
    complex_: BalancedComplex, map_: EmbeddingMap, graph: MetricGraph, report: Report
) -> None:
    for edge in graph.edges:
        chain = map_.edge_chains[edge.id]
        elements = [complex_.element(ref) for ref in chain]
        for ref, element in zip(chain, elements):
            if element.weight != 1:
                report.add(
                    FailureCategory.WEIGHT, f"edge:{edge.id}", f"{ref} has weight {element.weight}"
                )
        if edge.is_infinite:
            _check_infinite_chain(complex_, map_, edge, elements, report)
            continue
        start = complex_.vertices[map_.vertex_images[edge.u]]  # type: ignore[index]
        end = complex_.vertices[map_.vertex_images[edge.v]]  # type: ignore[index]
        if _walk(start, elements) != end:
            report.add(
                FailureCategory.CHAIN, f"edge:{edge.id}", "chain is not a path between its ends"
            )
            continue
        lengths = [_length(segment) for segment in elements]  # type: ignore[arg-type]
        total = sum(lengths[1:], lengths[0])
        if total != edge.length:
            report.add(
                FailureCategory.ISOMETRY,
                f"edge:{edge.id}",
                f"image has tropical length {total}, edge has length {edge.length}",
            )


def _magnitude(value: Scalar) -> Scalar:
    return -value if sign_of(value) < 0 else value


def _check_gadgets(
    complex_: BalancedComplex, map_: EmbeddingMap, graph: MetricGraph, report: Report
) -> None:
    """Every creneau stays inside the corridor recorded for it."""
    broken = set(report.failures.subjects(FailureCategory.CHAIN))
    for gadget in map_.gadgets:
        subject = f"edge:{gadget.edge}"
        if subject in broken or not graph.has_edge(gadget.edge):
            continue
        edge = graph.edge(gadget.edge)
        points = [complex_.vertices[map_.vertex_images[edge.u]]]  # type: ignore[index]
        for ref in map_.edge_chains[gadget.edge]:
            segment = complex_.element(ref)
            if isinstance(segment, LatticeSegment):
                points.append(segment.end if segment.start == points[-1] else segment.start)
        try:
            i, j = sorted((points.index(gadget.host_start), points.index(gadget.host_end)))
        except ValueError:
            report.add(FailureCategory.GEOMETRY, subject, "creneau host is not on the chain")
            continue
        u = _direction(
            gadget.host_end.x - gadget.host_start.x, gadget.host_end.y - gadget.host_start.y
        )
        v = (-u[1], u[0])
        norm = u[0] * u[0] + u[1] * u[1]
        host = _along(gadget.host_start, u, gadget.host_end) / norm
        for point in points[i + 1 : j]:
            a = _along(gadget.host_start, u, point) / norm
            b = _along(gadget.host_start, v, point) / norm
            beside = sign_of(3 * a - host) >= 0 and sign_of(2 * host - 3 * a) >= 0
            if (sign_of(b) != 0 and not beside) or sign_of(_magnitude(b) - gadget.epsilon) > 0:
                report.add(FailureCategory.GEOMETRY, subject, f"creneau leaves corridor at {point}")
                break


def _check_infinite_chain(
    complex_: BalancedComplex,
    map_: EmbeddingMap,
    edge: Edge,
    elements: Sequence[Element],
    report: Report,
) -> None:
    finite_end = edge.u if map_.vertex_images[edge.v] is None else edge.v
    last = elements[-1]
    if isinstance(last, LatticeSegment):
        report.add(FailureCategory.INFINITE, f"edge:{edge.id}", "image does not end in a ray")
        return
    start = complex_.vertices[map_.vertex_images[finite_end]]  # type: ignore[index]
    if _walk(start, elements[:-1]) != last.apex:
        report.add(
            FailureCategory.INFINITE, f"edge:{edge.id}", "ray is not reached from the finite end"
        )


def _check_geometry(complex_: BalancedComplex, report: Report, ray_report_limit: int) -> None:
    """Pairwise contacts. Transversal crossings among segments are counted."""
    refs = complex_.refs()
    with_rays = len(refs) <= ray_report_limit
    if not with_rays:
        refs = [ref for ref in refs if ref.kind == SEGMENT]
    items = [(ref, complex_.element(ref)) for ref in refs]
    pieces = [_Piece(element) for _, element in items]
    crossing_points: dict[RationalPoint, int] = {}
    ray_crossings = ray_conflicts = 0
    for i, j in candidate_pairs(items):
        kind, point = _compare(pieces[i], pieces[j])
        if kind in ("none", "shared"):
            continue
        if RAY in (refs[i].kind, refs[j].kind):
            if kind == "cross":
                ray_crossings += 1
            else:
                ray_conflicts += 1
            continue
        subject = f"{refs[i]},{refs[j]}"
        if point is None:
            report.add(FailureCategory.GEOMETRY, subject, "segments overlap")
            continue
        if kind == "touch":
            report.add(FailureCategory.GEOMETRY, subject, f"segments touch at {point}")
            continue
        report.crossings_on_gamma += 1
        crossing_points[point] = crossing_points.get(point, 0) + 1
        if not _is_orthogonal(pieces[i].vector, pieces[j].vector):
            report.add(
                FailureCategory.ORTHOGONALITY,
                subject,
                f"crossing at {point} has directions {pieces[i].vector} and {pieces[j].vector}",
            )
    for point, count in crossing_points.items():
        if count > 1:
            report.add(FailureCategory.GEOMETRY, str(point), f"{count} crossings share a point")
    if with_rays:
        report.ray_crossings = ray_crossings
        report.ray_conflicts = ray_conflicts
    else:
        logger.info(f"skipping ray contact report for {len(complex_.refs())} elements")


def _check_lambda(
    complex_: BalancedComplex, map_: EmbeddingMap, group: ValueGroup, report: Report
) -> None:
    report.lambda_certified = True
    for index, point in enumerate(complex_.vertices):
        if not (group.contains(point.x) and group.contains(point.y)):
            report.add(FailureCategory.LAMBDA, f"vertex:{index}", f"{point} is outside the group")
    try:
        f, g = projections(complex_, map_, group)
    except (TropicalError, ValueError) as e:
        report.add(FailureCategory.PROJECTION, "complex", str(e))
        return
    for function in (f, g):
        for ref in function.discontinuities(complex_):
            report.add(FailureCategory.PROJECTION, str(ref), f"{function.axis} jumps along {ref}")
        if any(total != 0 for total in function.cycle_sums(complex_)):
            report.add(FailureCategory.PROJECTION, function.axis, "nonzero sum around a cycle")


def _check_modification(
    source: MetricGraph, trace: ModificationTrace, graph: MetricGraph, report: Report
) -> None:
    report.modification_replayed = True
    try:
        replayed = replay(source, trace)
    except TropicalError as e:
        report.add(FailureCategory.MODIFICATION, "trace", f"replay failed: {e}")
        return
    if not replayed.same_as(graph):
        report.add(FailureCategory.MODIFICATION, "trace", "replay does not give the embedded graph")
    if all(isinstance(move, Subdivide) for move in trace):
        if not contract_degree_two(graph, keep=source.vertices).same_as(source):
            report.add(FailureCategory.MODIFICATION, "trace", "embedded graph is not a subdivision")

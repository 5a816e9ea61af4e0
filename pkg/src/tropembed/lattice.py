"""Exact plane geometry on the integer lattice.

Points carry exact coordinates, either ``Fraction`` or value group elements.
Every segment and ray has a primitive integer direction, so intersection
parameters are obtained by Cramer's rule with an integer determinant and never
leave the coordinate field.
"""

import logging
import math
from collections.abc import Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, NamedTuple, Optional, Union

from tropembed.collections import CrossingCollection
from tropembed.exceptions import (
    DegenerateSegment,
    IrrationalSlope,
    NotUnimodular,
    OverlapError,
    TangencyError,
    UnknownVertex,
)
from tropembed.utils import integer_direction, to_fraction
from tropembed.value_group import LambdaScalar, Scalar, sign_of

logger = logging.getLogger(__name__)

SEGMENT = "segment"
RAY = "ray"


def _exact(value: Any) -> Scalar:
    if isinstance(value, (Fraction, LambdaScalar)):
        return value
    if isinstance(value, (int, str)):
        return to_fraction(value)
    raise TypeError(f"coordinates must be exact, got {type(value).__name__}")


def _sort_key(value: Scalar) -> tuple:
    if isinstance(value, LambdaScalar):
        return (1, value.coefficients)
    return (0, value)


@dataclass(frozen=True)
class RationalPoint:
    """A point with exact coordinates.

    Example:
        >>> RationalPoint(1, "3/2")
        RationalPoint(x=Fraction(1, 1), y=Fraction(3, 2))
    """

    x: Scalar
    y: Scalar

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _exact(self.x))
        object.__setattr__(self, "y", _exact(self.y))

    def offset(self, dx: Scalar, dy: Scalar) -> "RationalPoint":
        return RationalPoint(self.x + dx, self.y + dy)

    def step(self, direction: "PrimitiveVector", length: Scalar) -> "RationalPoint":
        """The point ``self + length * direction``."""
        return RationalPoint(self.x + length * direction.m, self.y + length * direction.n)

    def scaled(self, factor: Scalar) -> "RationalPoint":
        return RationalPoint(self.x * factor, self.y * factor)

    def sort_key(self) -> tuple:
        return (_sort_key(self.x), _sort_key(self.y))

    def as_floats(self) -> tuple[float, float]:
        return float(self.x), float(self.y)

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


@dataclass(frozen=True)
class PrimitiveVector:
    """A coprime integer direction ``(m, n)``."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if (self.m, self.n) == (0, 0):
            raise DegenerateSegment("the zero vector is not a direction")
        if math.gcd(self.m, self.n) != 1:
            raise ValueError(f"({self.m}, {self.n}) is not primitive")

    def __neg__(self) -> "PrimitiveVector":
        return PrimitiveVector(-self.m, -self.n)

    def __iter__(self) -> Iterator[int]:
        return iter((self.m, self.n))

    def cross(self, other: "PrimitiveVector") -> int:
        return self.m * other.n - self.n * other.m

    def dot(self, other: "PrimitiveVector") -> int:
        return self.m * other.m + self.n * other.n

    def perpendicular(self) -> "PrimitiveVector":
        """The quarter turn ``(-n, m)``."""
        return PrimitiveVector(-self.n, self.m)

    @property
    def norm2(self) -> int:
        return self.m * self.m + self.n * self.n

    @classmethod
    def from_integers(cls, m: int, n: int) -> tuple["PrimitiveVector", int]:
        """Split an integer vector into its primitive direction and gcd."""
        g = math.gcd(m, n)
        if g == 0:
            raise DegenerateSegment("the zero vector is not a direction")
        return cls(m // g, n // g), g


def primitive_vector(start: RationalPoint, end: RationalPoint) -> PrimitiveVector:
    """Primitive direction from ``start`` towards ``end``.

    Raises:
        DegenerateSegment: If the points coincide.
        IrrationalSlope: If the points differ by a vector with no rational slope.

    Example:
        >>> primitive_vector(RationalPoint(0, 0), RationalPoint(2, 4))
        PrimitiveVector(m=1, n=2)
    """
    dx = end.x - start.x
    dy = end.y - start.y
    if dx == 0 and dy == 0:
        raise DegenerateSegment(f"segment endpoints coincide at {start}")
    if not isinstance(dx, LambdaScalar) and not isinstance(dy, LambdaScalar):
        m, n = integer_direction(Fraction(dx), Fraction(dy))
        return PrimitiveVector(m, n)
    return _lambda_direction(dx, dy)


def _lambda_direction(dx: Scalar, dy: Scalar) -> PrimitiveVector:
    # The vector is proportional to an integer one iff its coefficient columns are.
    x_coefficients = dict(dx.coefficients) if isinstance(dx, LambdaScalar) else {}
    y_coefficients = dict(dy.coefficients) if isinstance(dy, LambdaScalar) else {}
    if not isinstance(dx, LambdaScalar) or not isinstance(dy, LambdaScalar):
        group = dx.group if isinstance(dx, LambdaScalar) else dy.group  # type: ignore[union-attr]
        x_coefficients = dict(group.lift(dx).coefficients)
        y_coefficients = dict(group.lift(dy).coefficients)
    labels = sorted(set(x_coefficients) | set(y_coefficients))
    a = x_coefficients.get(labels[0], Fraction(0))
    b = y_coefficients.get(labels[0], Fraction(0))
    m, n = integer_direction(a, b)
    for label in labels[1:]:
        if x_coefficients.get(label, Fraction(0)) * n != y_coefficients.get(label, Fraction(0)) * m:
            raise IrrationalSlope(f"direction ({dx}, {dy}) has no rational slope")
    scale = dx / m if m != 0 else dy / n
    if sign_of(scale) < 0:
        m, n = -m, -n
    return PrimitiveVector(m, n)


@dataclass(frozen=True)
class LatticeSegment:
    """A bounded edge with exact endpoints and a positive integer weight."""

    start: RationalPoint
    end: RationalPoint
    weight: int = 1

    def __post_init__(self) -> None:
        if self.weight < 1:
            raise ValueError(f"segment weight must be positive, got {self.weight}")
        if self.start == self.end:
            raise DegenerateSegment(f"segment endpoints coincide at {self.start}")

    @property
    def endpoints(self) -> tuple[RationalPoint, RationalPoint]:
        return self.start, self.end

    @cached_property
    def direction(self) -> PrimitiveVector:
        return primitive_vector(self.start, self.end)

    @property
    def origin(self) -> RationalPoint:
        return self.start

    @cached_property
    def extent(self) -> Scalar:
        return tropical_length(self)

    def reversed(self) -> "LatticeSegment":
        return LatticeSegment(self.end, self.start, self.weight)


@dataclass(frozen=True)
class LatticeRay:
    """An unbounded edge leaving ``apex`` in a primitive direction."""

    apex: RationalPoint
    direction: PrimitiveVector
    weight: int = 1

    def __post_init__(self) -> None:
        if self.weight < 1:
            raise ValueError(f"ray weight must be positive, got {self.weight}")

    @property
    def origin(self) -> RationalPoint:
        return self.apex

    @property
    def extent(self) -> None:
        return None


Element = Union[LatticeSegment, LatticeRay]


class ElementRef(NamedTuple):
    """Identifies a segment or ray of a complex by kind and position."""

    kind: str
    index: int

    def __str__(self) -> str:
        return f"{self.kind}:{self.index}"

    @classmethod
    def parse(cls, text: str) -> "ElementRef":
        kind, _, index = text.partition(":")
        if kind not in (SEGMENT, RAY) or not index.isdigit():
            raise ValueError(f"malformed element reference {text!r}")
        return cls(kind, int(index))


@dataclass(frozen=True)
class CrossingRecord:
    """A transversal interior intersection of two elements."""

    point: RationalPoint
    first: Hashable
    second: Hashable


def tropical_length(segment: LatticeSegment) -> Scalar:
    """Lattice length of a segment.

    Example:
        >>> tropical_length(LatticeSegment(RationalPoint(0, 0), RationalPoint(2, 4)))
        Fraction(2, 1)
    """
    direction = segment.direction
    if direction.m != 0:
        return (segment.end.x - segment.start.x) / direction.m
    return (segment.end.y - segment.start.y) / direction.n


@dataclass(frozen=True)
class BalancedComplex:
    """A weighted rational polyhedral complex of dimension one.

    The complex does not enforce balancing on construction; use
    :func:`is_balanced` to check it.
    """

    vertices: tuple[RationalPoint, ...]
    segments: tuple[LatticeSegment, ...] = ()
    rays: tuple[LatticeRay, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "rays", tuple(self.rays))
        known = self.vertex_index
        if len(known) != len(self.vertices):
            raise ValueError("complex lists a vertex twice")
        for i, segment in enumerate(self.segments):
            for point in segment.endpoints:
                if point not in known:
                    raise UnknownVertex(f"segment {i} ends at unlisted point {point}")
        for i, ray in enumerate(self.rays):
            if ray.apex not in known:
                raise UnknownVertex(f"ray {i} starts at unlisted point {ray.apex}")

    @classmethod
    def from_elements(
        cls, segments: Iterable[LatticeSegment], rays: Iterable[LatticeRay] = ()
    ) -> "BalancedComplex":
        """Build a complex whose vertices are the element endpoints, in order of appearance."""
        segments = tuple(segments)
        rays = tuple(rays)
        seen: dict[RationalPoint, None] = {}
        for segment in segments:
            seen.setdefault(segment.start)
            seen.setdefault(segment.end)
        for ray in rays:
            seen.setdefault(ray.apex)
        return cls(tuple(seen), segments, rays)

    @cached_property
    def vertex_index(self) -> dict[RationalPoint, int]:
        return {point: i for i, point in enumerate(self.vertices)}

    @cached_property
    def incidence(self) -> dict[int, list[tuple[ElementRef, PrimitiveVector, int]]]:
        """Per vertex index: incident elements with their outgoing directions and weights."""
        table: dict[int, list[tuple[ElementRef, PrimitiveVector, int]]] = {
            i: [] for i in range(len(self.vertices))
        }
        index = self.vertex_index
        for i, segment in enumerate(self.segments):
            ref = ElementRef(SEGMENT, i)
            table[index[segment.start]].append((ref, segment.direction, segment.weight))
            table[index[segment.end]].append((ref, -segment.direction, segment.weight))
        for i, ray in enumerate(self.rays):
            table[index[ray.apex]].append((ElementRef(RAY, i), ray.direction, ray.weight))
        return table

    def element(self, ref: ElementRef) -> Element:
        if ref.kind == SEGMENT:
            return self.segments[ref.index]
        if ref.kind == RAY:
            return self.rays[ref.index]
        raise KeyError(ref)

    def refs(self) -> list[ElementRef]:
        return [ElementRef(SEGMENT, i) for i in range(len(self.segments))] + [
            ElementRef(RAY, i) for i in range(len(self.rays))
        ]

    def resolve_vertex(self, vertex: Union[int, RationalPoint]) -> int:
        """Vertex index for an index or a point.

        Raises:
            UnknownVertex: If the vertex is not in the complex.
        """
        if isinstance(vertex, RationalPoint):
            try:
                return self.vertex_index[vertex]
            except KeyError:
                raise UnknownVertex(f"{vertex} is not a vertex of the complex") from None
        if isinstance(vertex, int) and 0 <= vertex < len(self.vertices):
            return vertex
        raise UnknownVertex(f"{vertex!r} is not a vertex of the complex")


@dataclass(frozen=True)
class GadgetRecord:
    """A creneau placed on one drawn segment, kept for rendering and auditing."""

    edge: str
    host_start: RationalPoint
    host_end: RationalPoint
    epsilon: Scalar
    target: Scalar
    teeth: int
    orientation: int = 1


@dataclass(frozen=True)
class EmbeddingMap:
    """Where each edge and vertex of the metric graph went in the complex.

    Attributes:
        edge_chains: Per graph edge, the ordered elements of its image, from the
            image of its first endpoint to the image of its second endpoint.
        vertex_images: Per graph vertex, the index of its image vertex, or
            ``None`` for infinite vertices.
        gadgets: Creneaux placed during construction.
    """

    edge_chains: Mapping[str, tuple[ElementRef, ...]]
    vertex_images: Mapping[str, Optional[int]]
    gadgets: tuple[GadgetRecord, ...] = field(default=())

    def gamma_refs(self, finite_only: bool = True) -> list[ElementRef]:
        """All elements that are images of graph edges."""
        refs = []
        for chain in self.edge_chains.values():
            if finite_only and any(ref.kind == RAY for ref in chain):
                continue
            refs.extend(chain)
        return refs


def balance_defect(complex_: BalancedComplex, vertex: Union[int, RationalPoint]) -> tuple[int, int]:
    """Weighted sum of outgoing primitive vectors at a vertex.

    Raises:
        UnknownVertex: If the vertex is not in the complex.
    """
    index = complex_.resolve_vertex(vertex)
    x = y = 0
    for _, direction, weight in complex_.incidence[index]:
        x += weight * direction.m
        y += weight * direction.n
    return x, y


def is_balanced(complex_: BalancedComplex) -> bool:
    """True iff every vertex of the complex has zero defect."""
    return all(balance_defect(complex_, i) == (0, 0) for i in range(len(complex_.vertices)))


def unimodular_transform(
    complex_: BalancedComplex,
    matrix: Sequence[Sequence[int]],
    translation: tuple[Any, Any] = (0, 0),
) -> BalancedComplex:
    """Apply ``p -> M p + t`` with ``M`` an integer matrix of determinant +-1.

    Raises:
        NotUnimodular: If ``M`` is not an integer matrix with ``|det M| = 1``.
    """
    (a, b), (c, d) = matrix
    if not all(isinstance(v, int) for v in (a, b, c, d)) or abs(a * d - b * c) != 1:
        raise NotUnimodular(f"matrix {matrix} is not unimodular")
    tx, ty = (_exact(v) for v in translation)

    def move(p: RationalPoint) -> RationalPoint:
        return RationalPoint(a * p.x + b * p.y + tx, c * p.x + d * p.y + ty)

    return BalancedComplex(
        tuple(move(p) for p in complex_.vertices),
        tuple(LatticeSegment(move(s.start), move(s.end), s.weight) for s in complex_.segments),
        tuple(
            LatticeRay(
                move(r.apex),
                PrimitiveVector(
                    a * r.direction.m + b * r.direction.n,
                    c * r.direction.m + d * r.direction.n,
                ),
                r.weight,
            )
            for r in complex_.rays
        ),
    )


# Intersections


def _position(parameter: Scalar, extent: Optional[Scalar]) -> str:
    s = sign_of(parameter)
    if s < 0:
        return "outside"
    if s == 0:
        return "start"
    if extent is None:
        return "interior"
    e = sign_of(extent - parameter)
    if e < 0:
        return "outside"
    return "end" if e == 0 else "interior"


def intersect(first: Element, second: Element) -> Optional[RationalPoint]:
    """Transversal interior intersection point of two elements, if any.

    Shared endpoints are not intersections.

    Raises:
        OverlapError: If the elements overlap along a piece of positive length.
        TangencyError: If an endpoint of one lies in the interior of the other.
    """
    d1, d2 = first.direction, second.direction
    p1, p2 = first.origin, second.origin
    dx = p2.x - p1.x
    dy = p2.y - p1.y
    det = d2.m * d1.n - d1.m * d2.n
    if det == 0:
        if d1.m * dy - d1.n * dx != 0:
            return None
        _check_collinear(first, second, dx, dy)
        return None
    s = (d2.m * dy - d2.n * dx) / det
    t = (d1.m * dy - d1.n * dx) / det
    where_s = _position(s, first.extent)
    if where_s == "outside":
        return None
    where_t = _position(t, second.extent)
    if where_t == "outside":
        return None
    if where_s == "interior" and where_t == "interior":
        return p1.step(d1, s)
    if where_s == "interior" or where_t == "interior":
        raise TangencyError(
            f"an endpoint touches the interior of another element at {p1.step(d1, s)}"
        )
    return None


def _check_collinear(first: Element, second: Element, dx: Scalar, dy: Scalar) -> None:
    # Parametrize both elements along the first one; None stands for an infinite end.
    d1 = first.direction
    offset = dx / d1.m if d1.m != 0 else dy / d1.n
    lo2: Optional[Scalar]
    hi2: Optional[Scalar]
    if second.direction == d1:
        lo2, hi2 = offset, (None if second.extent is None else offset + second.extent)
    else:
        lo2, hi2 = (None if second.extent is None else offset - second.extent), offset
    lo = lo2 if lo2 is not None and sign_of(lo2) > 0 else Fraction(0)
    if first.extent is None:
        hi = hi2
    elif hi2 is None:
        hi = first.extent
    else:
        hi = hi2 if sign_of(hi2 - first.extent) < 0 else first.extent
    if hi is None or sign_of(hi - lo) > 0:
        raise OverlapError("collinear elements overlap")


Box = tuple[float, float, float, float]

# Boxes covering more grid cells than this are compared against everything.
_MAX_CELLS = 64


def _float_box(element: Element, floats: dict[RationalPoint, tuple[float, float]]) -> Box:
    def approx(point: RationalPoint) -> tuple[float, float]:
        if point not in floats:
            floats[point] = point.as_floats()
        return floats[point]

    x0, y0 = approx(element.origin)
    margin = 1e-9 * (1.0 + abs(x0) + abs(y0))
    if element.extent is None:
        d = element.direction
        xmin = x0 - margin if d.m >= 0 else -math.inf
        xmax = x0 + margin if d.m <= 0 else math.inf
        ymin = y0 - margin if d.n >= 0 else -math.inf
        ymax = y0 + margin if d.n <= 0 else math.inf
        return xmin, xmax, ymin, ymax
    x1, y1 = approx(element.end)  # type: ignore[arg-type]
    margin = 1e-9 * (1.0 + abs(x0) + abs(y0) + abs(x1) + abs(y1))
    return min(x0, x1) - margin, max(x0, x1) + margin, min(y0, y1) - margin, max(y0, y1) + margin


def _boxes_meet(a: Box, b: Box) -> bool:
    return a[0] <= b[1] and b[0] <= a[1] and a[2] <= b[3] and b[2] <= a[3]


def candidate_pairs(items: Sequence[tuple[Hashable, Element]]) -> Iterator[tuple[int, int]]:
    """Index pairs ``i < j`` of elements whose bounding boxes meet, in sorted order.

    Finite boxes are hashed into a uniform grid whose cell is the median box
    size; rays and boxes spanning many cells are checked against every box.
    Each point is converted to floats once.
    """
    floats: dict[RationalPoint, tuple[float, float]] = {}
    boxes = [_float_box(element, floats) for _, element in items]
    finite = [i for i, box in enumerate(boxes) if all(map(math.isfinite, box))]
    sizes = sorted(max(boxes[i][1] - boxes[i][0], boxes[i][3] - boxes[i][2]) for i in finite)
    cell = sizes[len(sizes) // 2] if sizes and sizes[len(sizes) // 2] > 0 else 1.0
    wide = sorted(set(range(len(boxes))) - set(finite))
    corners: dict[int, tuple[int, int]] = {}
    grid: dict[tuple[int, int], list[int]] = {}
    for i in finite:
        xmin, xmax, ymin, ymax = boxes[i]
        ix0, ix1 = math.floor(xmin / cell), math.floor(xmax / cell)
        iy0, iy1 = math.floor(ymin / cell), math.floor(ymax / cell)
        if (ix1 - ix0 + 1) * (iy1 - iy0 + 1) > _MAX_CELLS:
            wide.append(i)
            continue
        corners[i] = (ix0, iy0)
        for cx in range(ix0, ix1 + 1):
            for cy in range(iy0, iy1 + 1):
                grid.setdefault((cx, cy), []).append(i)
    pairs: set[tuple[int, int]] = set()
    for here, members in grid.items():
        for a, i in enumerate(members):
            for j in members[a + 1 :]:
                # a pair is reported only in the first cell both boxes cover
                first = (max(corners[i][0], corners[j][0]), max(corners[i][1], corners[j][1]))
                if first == here and _boxes_meet(boxes[i], boxes[j]):
                    pairs.add((min(i, j), max(i, j)))
    for i in wide:
        for j in range(len(boxes)):
            if j != i and _boxes_meet(boxes[i], boxes[j]):
                pairs.add((min(i, j), max(i, j)))
    yield from sorted(pairs)


def find_crossings(items: Sequence[tuple[Hashable, Element]]) -> list[CrossingRecord]:
    """All transversal crossings among keyed elements, sorted by key pair.

    Raises:
        OverlapError: On overlapping or tangent elements.
    """
    records = []
    for i, j in candidate_pairs(items):
        key_i, first = items[i]
        key_j, second = items[j]
        try:
            point = intersect(first, second)
        except OverlapError as e:
            raise type(e)(f"{key_i} and {key_j}: {e}") from e
        if point is not None:
            a, b = sorted((key_i, key_j), key=_key_order)
            records.append(CrossingRecord(point, a, b))
    records.sort(key=lambda r: (_key_order(r.first), _key_order(r.second), r.point.sort_key()))
    return records


def _key_order(key: Hashable) -> tuple:
    if isinstance(key, tuple):
        return tuple(_key_order(k) for k in key)
    return (type(key).__name__, key)


def crossings(
    complex_: BalancedComplex, restrict_to: Optional[Iterable[ElementRef]] = None
) -> CrossingCollection:
    """Transversal interior intersections among elements of a complex.

    Args:
        complex_: The complex.
        restrict_to: Element references to consider; all elements when omitted.

    Returns:
        Crossing records sorted by element pair.

    Raises:
        OverlapError: If two of the considered elements overlap or touch tangentially.
    """
    refs = complex_.refs() if restrict_to is None else sorted(set(restrict_to))
    items = [(ref, complex_.element(ref)) for ref in refs]
    records = find_crossings(items)
    logger.debug(f"found {len(records)} crossings among {len(items)} elements")
    return CrossingCollection(records)

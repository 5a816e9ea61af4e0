"""Creneau gadgets: staircases that lengthen a segment without moving its ends.

A creneau replaces the middle third of a host segment by ``m`` (even) steps
of height ``delta`` along the perpendicular frame direction ``v``, separated
by ``m - 1`` equal steps along the host direction ``u``. Every corner gets a
balancing ray, so the gadget is balanced on its own.
"""

import logging
from dataclasses import dataclass
from typing import Optional

from tropembed.exceptions import InvalidFrame, InvalidTarget, NonPositiveLength, NotInLambda
from tropembed.lattice import (
    BalancedComplex,
    LatticeRay,
    LatticeSegment,
    PrimitiveVector,
    RationalPoint,
)
from tropembed.value_group import Scalar, ValueGroup, floor_ratio, sign_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CreneauSpec:
    """A host segment together with its target length and corridor.

    Attributes:
        host: Segment to be elongated.
        target: Required tropical length of the replacement path.
        epsilon: Corridor half-width along ``v``, in tropical units.
        orientation: ``1`` puts the teeth on the ``+v`` side, ``-1`` on the ``-v`` side.

    Raises:
        InvalidTarget: If the target does not exceed the host length.
        NonPositiveLength: If the corridor is empty.
    """

    host: LatticeSegment
    target: Scalar
    epsilon: Scalar
    orientation: int = 1

    def __post_init__(self) -> None:
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be 1 or -1")
        if sign_of(self.epsilon) <= 0:
            raise NonPositiveLength(f"corridor half-width must be positive, got {self.epsilon}")
        if sign_of(self.target - self.length) <= 0:
            raise InvalidTarget(
                f"target {self.target} does not exceed the host length {self.length}"
            )

    @property
    def length(self) -> Scalar:
        return self.host.extent

    @property
    def u(self) -> PrimitiveVector:
        return self.host.direction

    @property
    def v(self) -> PrimitiveVector:
        return self.u.perpendicular()


@dataclass(frozen=True)
class CreneauPath:
    """The staircase replacing a host segment, with its balancing rays."""

    segments: tuple[LatticeSegment, ...]
    rays: tuple[LatticeRay, ...]
    teeth: int
    delta: Scalar

    def tropical_length(self) -> Scalar:
        total = self.segments[0].extent
        for segment in self.segments[1:]:
            total = total + segment.extent
        return total

    def points(self) -> list[RationalPoint]:
        """Path vertices from the host start to the host end."""
        return [self.segments[0].start] + [s.end for s in self.segments]

    def corners(self) -> list[RationalPoint]:
        """Staircase vertices, i.e. every path vertex except the host endpoints."""
        return self.points()[1:-1]

    def turn_signs(self) -> list[str]:
        """``"+"`` for a left turn and ``"-"`` for a right turn at each corner."""
        signs = []
        for before, after in zip(self.segments, self.segments[1:]):
            signs.append("+" if before.direction.cross(after.direction) > 0 else "-")
        return signs

    def as_complex(self) -> BalancedComplex:
        return BalancedComplex.from_elements(self.segments, self.rays)

    def within_corridor(self, spec: CreneauSpec) -> bool:
        """Check exactly that every vertex lies in the host's corridor.

        In the frame ``(u, v)`` a vertex ``start + a u + b v`` must satisfy
        ``0 <= a <= x`` and ``|b| <= epsilon``.
        """
        u, v = spec.u, spec.v
        start = spec.host.start
        for point in self.points():
            dx = point.x - start.x
            dy = point.y - start.y
            a = (dx * u.m + dy * u.n) / u.norm2
            b = (dx * v.m + dy * v.n) / v.norm2
            if sign_of(a) < 0 or sign_of(spec.length - a) < 0:
                return False
            if sign_of(spec.epsilon - abs(b)) < 0:
                return False
        return True


def creneau_params(x: Scalar, target: Scalar, epsilon: Scalar) -> tuple[int, Scalar]:
    """Tooth count and tooth height for elongating ``x`` to ``target``.

    Returns:
        ``(m, delta)`` with ``m`` the smallest even integer strictly greater than
        ``(target - x) / epsilon`` and ``delta = (target - x) / m``.

    Raises:
        InvalidTarget: If ``target <= x`` or ``x <= 0``.

    Example:
        >>> creneau_params(Fraction(1), Fraction(2), Fraction(3, 10))
        (4, Fraction(1, 4))
    """
    if sign_of(x) <= 0 or sign_of(target - x) <= 0:
        raise InvalidTarget(f"need target > x > 0, got x={x}, target={target}")
    if sign_of(epsilon) <= 0:
        raise NonPositiveLength(f"corridor half-width must be positive, got {epsilon}")
    excess = target - x
    bound = floor_ratio(excess, epsilon)
    m = bound + 1 if (bound + 1) % 2 == 0 else bound + 2
    return m, excess / m


def _staircase(spec: CreneauSpec, m: int, delta: Scalar) -> CreneauPath:
    from tropembed.balancer import balancing_ray

    u, v = spec.u, spec.v
    x = spec.length
    start, end = spec.host.start, spec.host.end
    inner = x / (3 * (m - 1)) if m > 1 else None
    points = [start, start.step(u, x / 3)]
    for i in range(m):
        up = v if (i % 2 == 0) == (spec.orientation == 1) else -v
        points.append(points[-1].step(up, delta))
        if i < m - 1:
            points.append(points[-1].step(u, inner))
    if points[-1] != start.step(u, 2 * x / 3):
        raise AssertionError("staircase did not return to the host line")
    points.append(end)
    segments = tuple(LatticeSegment(a, b) for a, b in zip(points, points[1:]))
    rays = []
    for before, after in zip(segments, segments[1:]):
        outgoing = (
            after.direction.m - before.direction.m,
            after.direction.n - before.direction.n,
        )
        attached = balancing_ray(outgoing)
        if attached is not None:
            direction, weight = attached
            rays.append(LatticeRay(before.end, direction, weight))
    logger.debug(f"creneau with {m} teeth of height {delta} on a host of length {x}")
    return CreneauPath(segments, tuple(rays), m, delta)


def insert_creneau(spec: CreneauSpec) -> CreneauPath:
    """Creneau on a host pointing along ``(1, 0)``.

    Raises:
        InvalidFrame: If the host is not horizontal and left-to-right.
    """
    if spec.u != PrimitiveVector(1, 0):
        raise InvalidFrame(f"axis-aligned creneau needs host direction (1, 0), got {tuple(spec.u)}")
    m, delta = creneau_params(spec.length, spec.target, spec.epsilon)
    return _staircase(spec, m, delta)


def insert_creneau_rotated(spec: CreneauSpec) -> CreneauPath:
    """Creneau on a host of any primitive direction ``u = (p, q)``.

    Steps are taken along ``u`` and ``v = (-q, p)`` directly in lattice
    coordinates, so tropical lengths equal the step multipliers.
    """
    m, delta = creneau_params(spec.length, spec.target, spec.epsilon)
    return _staircase(spec, m, delta)


def insert_creneau_lambda(
    host: LatticeSegment,
    target: Scalar,
    epsilon: Scalar,
    group: ValueGroup,
    orientation: int = 1,
) -> CreneauPath:
    """Creneau whose corners all have coordinates in ``group``.

    Uses ``2n`` teeth of height ``(target - x) / 2n`` with ``n`` minimal such
    that the height does not exceed ``epsilon``; the inner horizontal steps
    have length ``x / (6n - 3)``.

    Raises:
        NotInLambda: If the host, the target or the corridor is not in the group.
        InvalidTarget: If ``target <= x``.
    """
    for name, value in (
        ("host start x", host.start.x),
        ("host start y", host.start.y),
        ("host end x", host.end.x),
        ("host end y", host.end.y),
        ("target", target),
        ("epsilon", epsilon),
    ):
        if not group.contains(value):
            raise NotInLambda(f"{name} {value} is not in the value group")
    spec = CreneauSpec(host, target, epsilon, orientation)
    excess = target - spec.length
    n = _half_teeth(excess, epsilon)
    return _staircase(spec, 2 * n, excess / (2 * n))


def _half_teeth(excess: Scalar, epsilon: Scalar) -> int:
    """Smallest n >= 1 with ``excess / 2n <= epsilon``."""
    bound = floor_ratio(excess, epsilon)
    exact: Optional[bool] = sign_of(bound * epsilon - excess) == 0
    teeth = bound if exact else bound + 1
    return max(1, (teeth + 1) // 2)

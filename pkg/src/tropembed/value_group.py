"""Exact arithmetic in a value group.

A value group is modelled as the Q-span of finitely many declared generators,
assumed linearly independent over Q. Elements are exact rational coefficient
maps; real enclosures of the generators are only consulted to decide signs.
"""

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from functools import lru_cache
from typing import Any, Optional, Union

from tropembed.exceptions import (
    NonPositiveLength,
    NotInLambda,
    NotOnSegment,
    UndecidableComparison,
    ValueGroupError,
)
from tropembed.utils import format_rational, to_fraction

logger = logging.getLogger(__name__)

UNIT_LABEL = "1"

Scalar = Union[Fraction, "LambdaScalar"]


@lru_cache(maxsize=4096)
def _decimal_interval(enclosure: str, digits: int) -> tuple[Fraction, Fraction]:
    """Interval containing the real number written as ``enclosure``.

    The written value is trusted to one unit of its last digit. Only the first
    ``digits`` fractional digits are used.
    """
    text = enclosure.strip()
    negative = text.startswith("-")
    text = text.lstrip("+-")
    whole, _, frac = text.partition(".")
    written = len(frac)
    used = min(digits, written)
    numerator = int((whole or "0") + frac[:used])
    value = Fraction(-numerator if negative else numerator, 10**used)
    radius = Fraction(1, 10**written)
    if used < written:
        radius += Fraction(1, 10**used)
    return value - radius, value + radius


@dataclass(frozen=True)
class Generator:
    """A declared generator of the value group.

    Attributes:
        label: Identifier used in coefficient maps.
        enclosure: Decimal string approximating the generator's real value.
        exact: Exact rational value, if the generator is rational.
    """

    label: str
    enclosure: str
    exact: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueGroupError("generator label must be non-empty")
        try:
            decimal_value = Decimal(self.enclosure)
        except InvalidOperation as e:
            raise ValueGroupError(
                f"generator {self.label!r} has malformed enclosure {self.enclosure!r}"
            ) from e
        if not decimal_value.is_finite() or "e" in self.enclosure.lower():
            raise ValueGroupError(f"generator {self.label!r} needs a plain decimal enclosure")
        if self.exact is not None:
            object.__setattr__(self, "exact", to_fraction(self.exact))
            low, high = _decimal_interval(self.enclosure, 10**6)
            if not low <= self.exact <= high:
                raise ValueGroupError(
                    f"exact value of generator {self.label!r} lies outside its enclosure"
                )

    def interval(self, digits: int) -> tuple[Fraction, Fraction]:
        """Closed interval containing the generator, using ``digits`` digits."""
        if self.exact is not None:
            return self.exact, self.exact
        return _decimal_interval(self.enclosure, digits)


@dataclass(frozen=True)
class ValueGroup:
    """The Q-span of a finite tuple of generators.

    Attributes:
        generators: Declared generators, in declaration order.
        precision: Maximum number of decimal digits used for certified signs.

    Example:
        >>> group = ValueGroup.rationals()
        >>> group.rational(Fraction(2, 3))
        LambdaScalar(2/3)
    """

    generators: tuple[Generator, ...]
    precision: int = 256
    _by_label: dict[str, Generator] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if not self.generators:
            raise ValueGroupError("a value group needs at least one generator")
        by_label = {}
        for generator in self.generators:
            if generator.label in by_label:
                raise ValueGroupError(f"duplicate generator label {generator.label!r}")
            by_label[generator.label] = generator
        exact = [g for g in self.generators if g.exact is not None]
        if len(exact) > 1:
            raise ValueGroupError(
                "at most one generator may be rational; "
                f"{', '.join(g.label for g in exact)} are linearly dependent over Q"
            )
        if exact and exact[0].exact == 0:
            raise ValueGroupError(f"generator {exact[0].label!r} is zero")
        object.__setattr__(self, "_by_label", by_label)

    @classmethod
    def rationals(cls, precision: int = 256) -> "ValueGroup":
        """The default group Q, generated by the exact unit."""
        return cls((Generator(UNIT_LABEL, "1", Fraction(1)),), precision)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], precision: int = 256) -> "ValueGroup":
        """Create a group from its file representation.

        Args:
            data: Mapping with a ``generators`` list of
                ``{"label", "enclosure", "exact"?}`` entries.
            precision: Maximum digits for certified comparisons.
        """
        generators = []
        for entry in data.get("generators", []):
            exact = entry.get("exact")
            enclosure = entry.get("enclosure")
            if enclosure is None and exact is not None:
                enclosure = _exact_enclosure(to_fraction(exact))
            generators.append(
                Generator(
                    label=str(entry["label"]),
                    enclosure=str(enclosure),
                    exact=to_fraction(exact) if exact is not None else None,
                )
            )
        return cls(tuple(generators), precision)

    def to_dict(self) -> dict[str, Any]:
        """Serialize the group; inverse of :meth:`from_dict`."""
        entries = []
        for generator in self.generators:
            entry: dict[str, Any] = {"label": generator.label, "enclosure": generator.enclosure}
            if generator.exact is not None:
                entry["exact"] = format_rational(generator.exact)
            entries.append(entry)
        return {"generators": entries}

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(g.label for g in self.generators)

    @property
    def unit(self) -> Optional[Generator]:
        """The rational generator, if the group contains Q."""
        return next((g for g in self.generators if g.exact is not None), None)

    @property
    def is_rationals(self) -> bool:
        return len(self.generators) == 1 and self.unit is not None

    def generator(self, label: str) -> "LambdaScalar":
        """The element of coefficient 1 on ``label``."""
        if label not in self._by_label:
            raise NotInLambda(f"{label!r} is not a generator of this group")
        return LambdaScalar(self, {label: Fraction(1)})

    def zero(self) -> "LambdaScalar":
        return LambdaScalar(self, {})

    def element(self, coefficients: Mapping[str, Any]) -> "LambdaScalar":
        """Build an element from a label -> rational coefficient mapping."""
        for label in coefficients:
            if label not in self._by_label:
                raise NotInLambda(f"{label!r} is not a generator of this group")
        return LambdaScalar(self, {k: to_fraction(v) for k, v in coefficients.items()})

    def rational(self, value: Any) -> "LambdaScalar":
        """Lift a rational number into the group.

        Raises:
            NotInLambda: If the number is non-zero and the group has no rational
                generator.
        """
        value = to_fraction(value)
        if value == 0:
            return self.zero()
        unit = self.unit
        if unit is None or unit.exact is None:
            raise NotInLambda(f"{format_rational(value)} is not in the value group")
        return LambdaScalar(self, {unit.label: value / unit.exact})

    def lift(self, value: Scalar) -> "LambdaScalar":
        """Return ``value`` as an element of this group."""
        if isinstance(value, LambdaScalar):
            if not self.contains(value):
                raise NotInLambda(f"{value} is not in the value group")
            return LambdaScalar(self, dict(value.coefficients))
        return self.rational(value)

    def contains(self, value: Any) -> bool:
        """Exact membership test.

        A scalar belongs to the group when every generator it uses is one of
        the group's generators (with matching declaration); a rational belongs
        when it is zero or the group has a rational generator.
        """
        if isinstance(value, LambdaScalar):
            for label, _ in value.coefficients:
                mine = self._by_label.get(label)
                if mine is None or mine != value.group._by_label[label]:
                    return False
            return True
        try:
            rational = to_fraction(value)
        except (TypeError, ValueError):
            return False
        return rational == 0 or self.unit is not None

    def enclosure(self, value: "LambdaScalar", digits: int) -> tuple[Fraction, Fraction]:
        """Interval containing the real value of ``value`` at ``digits`` digits."""
        low = high = Fraction(0)
        for label, coefficient in value.coefficients:
            g_low, g_high = self._generator(label).interval(digits)
            if coefficient >= 0:
                low += coefficient * g_low
                high += coefficient * g_high
            else:
                low += coefficient * g_high
                high += coefficient * g_low
        return low, high

    def sign(self, value: "LambdaScalar") -> int:
        """Certified sign of ``value``.

        Raises:
            UndecidableComparison: If the enclosure still contains zero at the
                maximum precision.
        """
        if not value.coefficients:
            return 0
        if all(self._generator(label).exact is not None for label, _ in value.coefficients):
            low, _ = self.enclosure(value, 0)
            return (low > 0) - (low < 0)
        digits = 16
        while True:
            low, high = self.enclosure(value, digits)
            if low > 0:
                return 1
            if high < 0:
                return -1
            if digits >= self.precision:
                break
            digits = min(2 * digits, self.precision)
        raise UndecidableComparison(
            f"cannot certify the sign of {value} with {self.precision} digits; "
            "supply longer generator enclosures or check generator independence"
        )

    def _generator(self, label: str) -> Generator:
        try:
            return self._by_label[label]
        except KeyError:
            raise NotInLambda(f"{label!r} is not a generator of this group") from None


def _common_group(first: ValueGroup, second: ValueGroup) -> ValueGroup:
    if first is second or first == second:
        return first
    if set(first.labels) <= set(second.labels):
        return second
    if set(second.labels) <= set(first.labels):
        return first
    raise ValueGroupError("cannot combine elements of unrelated value groups")


def _exact_enclosure(value: Fraction) -> str:
    digits = Decimal(value.numerator) / Decimal(value.denominator)
    return format(digits, "f")


class LambdaScalar:
    """An element of a value group: a finite rational combination of generators.

    Scalars are immutable and hashable. Addition, negation and multiplication
    or division by rationals are exact; comparisons are exact when only rational
    generators are involved and certified by interval enclosures otherwise.
    """

    __slots__ = ("group", "coefficients", "_hash")

    def __init__(self, group: ValueGroup, coefficients: Mapping[str, Fraction]):
        self.group = group
        self.coefficients: tuple[tuple[str, Fraction], ...] = tuple(
            sorted((label, Fraction(c)) for label, c in coefficients.items() if c != 0)
        )
        self._hash = hash(self.coefficients)

    # Arithmetic

    def _coerce(self, other: Any) -> Optional["LambdaScalar"]:
        if isinstance(other, LambdaScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return self.group.rational(other)
        return None

    def _combine(self, other: "LambdaScalar", factor: int) -> "LambdaScalar":
        merged = dict(self.coefficients)
        for label, coefficient in other.coefficients:
            merged[label] = merged.get(label, Fraction(0)) + factor * coefficient
        return LambdaScalar(_common_group(self.group, other.group), merged)

    def __add__(self, other: Any) -> "LambdaScalar":
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return self._combine(coerced, 1)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "LambdaScalar":
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return self._combine(coerced, -1)

    def __rsub__(self, other: Any) -> "LambdaScalar":
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return coerced._combine(self, -1)

    def __neg__(self) -> "LambdaScalar":
        return LambdaScalar(self.group, {k: -v for k, v in self.coefficients})

    def __pos__(self) -> "LambdaScalar":
        return self

    def __mul__(self, other: Any) -> "LambdaScalar":
        if isinstance(other, (int, Fraction)):
            return LambdaScalar(self.group, {k: v * other for k, v in self.coefficients})
        if isinstance(other, LambdaScalar):
            if other.is_rational():
                return self * other.to_fraction()
            if self.is_rational():
                return other * self.to_fraction()
            raise TypeError("the product of two non-rational value group elements is undefined")
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "LambdaScalar":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of a value group element by zero")
            return LambdaScalar(self.group, {k: v / other for k, v in self.coefficients})
        if isinstance(other, LambdaScalar) and other.is_rational():
            return self / other.to_fraction()
        return NotImplemented

    # Comparison

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LambdaScalar):
            return self.coefficients == other.coefficients
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self.coefficients
            return self.is_rational() and self.to_fraction() == other
        return NotImplemented

    def __hash__(self) -> int:
        return self._hash

    def sign(self) -> int:
        return self.group.sign(self)

    def _compare(self, other: Any) -> Optional[int]:
        if isinstance(other, LambdaScalar):
            return (self - other).sign()
        if isinstance(other, (int, Fraction)):
            if self.group.unit is not None or other == 0:
                return (self - other).sign()
            return _sign_against_rational(self, Fraction(other))
        return None

    def __lt__(self, other: Any) -> bool:
        result = self._compare(other)
        return NotImplemented if result is None else result < 0

    def __le__(self, other: Any) -> bool:
        result = self._compare(other)
        return NotImplemented if result is None else result <= 0

    def __gt__(self, other: Any) -> bool:
        result = self._compare(other)
        return NotImplemented if result is None else result > 0

    def __ge__(self, other: Any) -> bool:
        result = self._compare(other)
        return NotImplemented if result is None else result >= 0

    def __bool__(self) -> bool:
        return bool(self.coefficients)

    def __abs__(self) -> "LambdaScalar":
        return -self if self.sign() < 0 else self

    # Conversion

    def is_rational(self) -> bool:
        """True when the value is a known rational number."""
        if not self.coefficients:
            return True
        unit = self.group.unit
        if unit is None or len(self.coefficients) != 1:
            return False
        return self.coefficients[0][0] == unit.label

    def to_fraction(self) -> Fraction:
        """Exact rational value.

        Raises:
            NotInLambda: If the value is not a known rational.
        """
        if not self.coefficients:
            return Fraction(0)
        unit = self.group.unit
        if unit is None or unit.exact is None or not self.is_rational():
            raise NotInLambda(f"{self} is not a rational number")
        return self.coefficients[0][1] * unit.exact

    def __float__(self) -> float:
        low, high = self.group.enclosure(self, 32)
        return float((low + high) / 2)

    def to_dict(self) -> dict[str, str]:
        """Coefficient map with canonical rational strings."""
        return {label: format_rational(c) for label, c in self.coefficients}

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for label, coefficient in self.coefficients:
            text = format_rational(coefficient)
            parts.append(text if label == UNIT_LABEL else f"{text}*{label}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"LambdaScalar({self})"


def _sign_against_rational(value: LambdaScalar, rational: Fraction) -> int:
    """Sign of ``value - rational`` for groups that do not contain Q."""
    digits = 16
    group = value.group
    while True:
        low, high = group.enclosure(value, digits)
        if low > rational:
            return 1
        if high < rational:
            return -1
        if digits >= group.precision:
            raise UndecidableComparison(f"cannot compare {value} with {format_rational(rational)}")
        digits = min(2 * digits, group.precision)


def sign_of(value: Scalar) -> int:
    """Sign of a rational or value group element."""
    if isinstance(value, LambdaScalar):
        return value.sign()
    return (value > 0) - (value < 0)


def floor_ratio(numerator: Scalar, denominator: Scalar) -> int:
    """Largest integer k with ``k * denominator <= numerator``.

    Args:
        numerator: Any scalar.
        denominator: A strictly positive scalar.

    Raises:
        NonPositiveLength: If the denominator is not positive.
    """
    if sign_of(denominator) <= 0:
        raise NonPositiveLength("floor_ratio needs a positive denominator")
    if not isinstance(numerator, LambdaScalar) and not isinstance(denominator, LambdaScalar):
        return math.floor(Fraction(numerator) / Fraction(denominator))
    estimate = math.floor(float(numerator) / float(denominator))
    while estimate * denominator > numerator:
        estimate -= 1
    while (estimate + 1) * denominator <= numerator:
        estimate += 1
    return estimate


# Operations on the group


def lambda_scale(value: LambdaScalar, q: Any) -> LambdaScalar:
    """Scale a value group element by a rational number.

    Example:
        >>> g = ValueGroup.rationals()
        >>> lambda_scale(g.rational(1), Fraction(2, 3))
        LambdaScalar(2/3)
    """
    return value * to_fraction(q)


def segment_length_in_lambda(start: Any, end: Any) -> LambdaScalar:
    """Tropical length of the segment between two points with coordinates in the group.

    Raises:
        DegenerateSegment: If the points coincide.
        IrrationalSlope: If the segment has no rational slope.
    """
    from tropembed.lattice import primitive_vector

    direction = primitive_vector(start, end)
    if direction.m != 0:
        return (end.x - start.x) / direction.m
    return (end.y - start.y) / direction.n


def advance_point(start: Any, direction: Any, length: Scalar) -> Any:
    """Move ``start`` by ``length`` steps of the primitive ``direction``.

    Raises:
        NonPositiveLength: If ``length`` is not strictly positive.
    """
    from tropembed.lattice import RationalPoint

    if sign_of(length) <= 0:
        raise NonPositiveLength(f"cannot advance by non-positive length {length}")
    return RationalPoint(start.x + length * direction.m, start.y + length * direction.n)


def point_on_segment_in_lambda(group: ValueGroup, start: Any, end: Any, point: Any) -> bool:
    """Decide whether a point of a segment is a group point.

    The test is done two ways: by the tropical distance from ``start`` and by
    the point's coordinates. Both must agree.

    Raises:
        NotInLambda: If the segment endpoints are not group points.
        NotOnSegment: If ``point`` is not on the closed segment.
    """
    from tropembed.lattice import primitive_vector

    for coordinate in (start.x, start.y, end.x, end.y):
        if not group.contains(coordinate):
            raise NotInLambda(f"segment endpoint coordinate {coordinate} is not in the group")
    direction = primitive_vector(start, end)
    dx = point.x - start.x
    dy = point.y - start.y
    if dx * direction.n - dy * direction.m != 0:
        raise NotOnSegment(f"{point} is not on the line through {start} and {end}")
    distance = dx / direction.m if direction.m != 0 else dy / direction.n
    length = segment_length_in_lambda(start, end)
    if sign_of(distance) < 0 or length < distance:
        raise NotOnSegment(f"{point} lies outside the segment {start} -- {end}")
    by_distance = group.contains(distance)
    by_coordinates = group.contains(point.x) and group.contains(point.y)
    if by_distance != by_coordinates:
        raise AssertionError("distance and coordinate membership disagree")
    return by_distance

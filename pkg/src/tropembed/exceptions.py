"""Exception hierarchy for tropembed.

Every error raised on purpose by the library derives from :class:`TropicalError`.
Errors about bad input values also derive from :class:`ValueError` so callers
that only know the builtin families keep working.
"""

from typing import Optional


class TropicalError(Exception):
    """Base class for all tropembed errors."""


# Metric graphs


class InvalidGraph(TropicalError, ValueError):
    """A metric graph violates one of its invariants."""


class LengthMismatch(TropicalError, ValueError):
    """Split lengths do not add up to the length of the edge being split."""


class NotRemovable(TropicalError, ValueError):
    """A vertex cannot be removed by a reverse subdivision."""


class InfiniteVertex(TropicalError, ValueError):
    """An operation that needs a finite vertex was given an infinite one."""


# Lattice geometry


class DegenerateSegment(TropicalError, ValueError):
    """A segment has coincident endpoints."""


class IrrationalSlope(TropicalError, ValueError):
    """A direction is not proportional to any integer vector."""


class UnknownVertex(TropicalError, KeyError):
    """A vertex does not belong to the complex."""


class OverlapError(TropicalError, ValueError):
    """Two elements of a complex share a piece of positive length."""


class TangencyError(OverlapError):
    """An endpoint of one element lies in the relative interior of another."""


class NotUnimodular(TropicalError, ValueError):
    """A transformation matrix is not invertible over the integers."""


# Layout


class BudgetExceeded(TropicalError, RuntimeError):
    """The exact crossing number search ran out of planarity tests."""

    def __init__(self, message: str, best_lower_bound: int = 0):
        super().__init__(message)
        self.best_lower_bound = best_lower_bound


class NotPlanar(TropicalError, RuntimeError):
    """A drawing step received or produced a non-planar configuration."""


class NeighborhoodConflict(TropicalError, RuntimeError):
    """Crossing neighborhoods could not be made pairwise disjoint."""


class PerturbationFailed(TropicalError, ValueError):
    """No rational snapping preserves the combinatorics of a drawing."""


# Creneaux


class InvalidTarget(TropicalError, ValueError):
    """A creneau target length does not exceed the host length."""


class InvalidFrame(TropicalError, ValueError):
    """A creneau host does not match the requested lattice frame."""


# Value groups


class ValueGroupError(TropicalError, ValueError):
    """A value group declaration is inconsistent."""


class NotInLambda(TropicalError, ValueError):
    """A value falls outside the declared value group."""


class NonPositiveLength(TropicalError, ValueError):
    """A length that must be positive is zero or negative."""


class NotOnSegment(TropicalError, ValueError):
    """A point does not lie on the given segment."""


class UndecidableComparison(TropicalError, ArithmeticError):
    """Interval enclosures could not separate a value from zero."""


# Input / output


class ParseError(TropicalError, ValueError):
    """A document could not be decoded.

    Attributes:
        line: 1-based line of the offending token, when known.
        column: 1-based column of the offending token, when known.
        field: Dotted path of the offending field, when known.
    """

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        field: Optional[str] = None,
    ):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column {column}")
        if field is not None:
            location.append(f"field {field!r}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")
        self.line = line
        self.column = column
        self.field = field


class SchemaError(TropicalError, ValueError):
    """A decoded document does not describe a valid object."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(f"{message} (field {field!r})" if field else message)
        self.field = field

"""Utility functions shared across tropembed modules."""

import json
import logging
import math
import re
from collections.abc import Sequence
from decimal import Decimal
from fractions import Fraction
from typing import Any, Union

from tropembed.exceptions import ParseError

logger = logging.getLogger(__name__)

RationalLike = Union[int, str, Fraction, Decimal]

_RATIONAL_PATTERN = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str, field: str = "value") -> Fraction:
    """Parse a rational written as ``"p/q"`` or ``"p"``.

    Args:
        text: The string to parse.
        field: Name of the field being parsed, used in error messages.

    Returns:
        The exact rational value.

    Raises:
        ParseError: If the string is not an integer or an integer fraction.

    Example:
        >>> parse_rational("10/3")
        Fraction(10, 3)
    """
    if not isinstance(text, str):
        raise ParseError(f"expected a rational string, got {type(text).__name__}", field=field)
    match = _RATIONAL_PATTERN.match(text)
    if not match:
        raise ParseError(f"malformed rational {text!r}", field=field)
    numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        raise ParseError(f"zero denominator in {text!r}", field=field)
    return Fraction(int(numerator), int(denominator or 1))


def format_rational(value: Fraction) -> str:
    """Format a rational in canonical lowest terms.

    Integers are written without a denominator; all other values as ``"p/q"``
    with ``q > 0``.
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def to_fraction(value: RationalLike) -> Fraction:
    """Convert ints, rational strings, Fractions and Decimals to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, (int, Decimal)):
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def decode_json_document(text: Union[bytes, str]) -> Any:
    """Decode a JSON document, reporting errors with their position.

    Args:
        text: UTF-8 bytes or a string.

    Returns:
        The decoded JSON value.

    Raises:
        ParseError: If the document is not valid UTF-8 or not valid JSON.
    """
    try:
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        return json.loads(text)
    except UnicodeDecodeError as e:
        raise ParseError(f"document is not UTF-8: {e.reason}") from e
    except json.JSONDecodeError as e:
        logger.debug(f"JSON decoding failed at offset {e.pos}")
        raise ParseError(e.msg, line=e.lineno, column=e.colno) from e


def encode_json_document(document: Any) -> str:
    """Encode a JSON document deterministically (sorted keys, fixed indent)."""
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def integer_direction(dx: Fraction, dy: Fraction) -> tuple[int, int]:
    """Return the coprime integer pair positively proportional to ``(dx, dy)``.

    Raises:
        ValueError: If both components are zero.
    """
    if dx == 0 and dy == 0:
        raise ValueError("zero vector has no direction")
    common = math.lcm(dx.denominator, dy.denominator)
    m = int(dx * common)
    n = int(dy * common)
    g = math.gcd(m, n)
    return m // g, n // g


def solve_rational_system(
    matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> list[Fraction]:
    """Solve a square linear system exactly by Gaussian elimination over Q.

    Args:
        matrix: Square coefficient matrix.
        rhs: Right-hand side.

    Returns:
        The unique solution.

    Raises:
        ValueError: If the matrix is singular.
    """
    size = len(matrix)
    rows = [[Fraction(entry) for entry in row] + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        pivot_row = rows[col]
        inverse = 1 / pivot_row[col]
        for j in range(col, size + 1):
            pivot_row[j] *= inverse
        for r in range(size):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                row = rows[r]
                for j in range(col, size + 1):
                    row[j] -= factor * pivot_row[j]
    return [rows[i][size] for i in range(size)]

"""Parsing and rendering of exact rationals.

Probabilities enter as strings such as ``"0.44"`` or ``"11/25"`` and are
converted without ever passing through a binary float.
"""

from __future__ import annotations

import decimal
from fractions import Fraction
from numbers import Rational

from .exceptions import DomainError

__all__ = [
    "as_fraction",
    "parse_rational",
    "format_fraction",
    "format_decimal",
    "format_scientific",
]


def parse_rational(text: str) -> Fraction:
    """Parse ``"0.44"``, ``"44/100"``, ``"1"`` or ``"1e-3"`` exactly."""
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(decimal.Decimal(text))
    except (ValueError, ZeroDivisionError, decimal.InvalidOperation) as exc:
        raise DomainError(f"not a rational number: {text!r}") from exc


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, gmpy2 rationals and strings to ``Fraction``.

    Floats are rejected: silently accepting ``0.44`` as a float would
    smuggle ``0.44000000000000000222...`` into an exact computation.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError("booleans are not probabilities")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise DomainError(
            f"float {value!r} is not exact; pass a Fraction or a string like '0.44'"
        )
    if isinstance(value, Rational) or hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise DomainError(f"cannot interpret {value!r} as a rational")


def format_fraction(value: Fraction) -> str:
    value = as_fraction(value)
    return f"{value.numerator}/{value.denominator}"


def _round_half_even(value: Fraction) -> int:
    q, r = divmod(value.numerator, value.denominator)
    twice = 2 * r
    if twice > value.denominator or (twice == value.denominator and q % 2 == 1):
        q += 1
    return q


def format_decimal(value: Fraction, digits: int = 12) -> str:
    """Correctly rounded fixed-point rendering (round-half-even)."""
    value = as_fraction(value)
    q = _round_half_even(abs(value) * 10**digits)
    sign = "-" if value < 0 and q else ""
    whole, frac = divmod(q, 10**digits)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"


def format_scientific(value: Fraction, significant: int = 6) -> str:
    """Correctly rounded scientific rendering, e.g. ``-7.95109e-09``."""
    value = as_fraction(value)
    if value == 0:
        return f"{0:.{significant - 1}e}"
    sign = "-" if value < 0 else ""
    a = abs(value)
    # exponent e with 10**e <= a < 10**(e+1)
    e = len(str(a.numerator)) - len(str(a.denominator))
    if a < Fraction(10) ** e:
        e -= 1
    q = _round_half_even(a / Fraction(10) ** (e - significant + 1))
    if q >= 10**significant:
        q //= 10
        e += 1
    digits = str(q)
    mantissa = digits[0] + ("." + digits[1:] if significant > 1 else "")
    return f"{sign}{mantissa}e{e:+03d}"

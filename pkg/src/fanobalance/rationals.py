"""Exact rational helpers and the "p/q" wire format."""

from __future__ import annotations

from fractions import Fraction
from math import lcm


def rat_to_str(x: Fraction | int) -> str:
    """Serialize a rational as "p" or "p/q" (lowest terms)."""
    f = Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def rat_from_str(s) -> Fraction:
    """Parse "p/q", "p", or a plain int back into a Fraction."""
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s.strip())
    raise TypeError(f"expected rational string or int, got {type(s).__name__}")


def common_denominator(values) -> int:
    """Least common denominator of an iterable of Fractions."""
    den = 1
    for v in values:
        den = lcm(den, Fraction(v).denominator)
    return den

"""Exact polynomial interpolation over the rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InconsistentSamples


@dataclass(frozen=True)
class RationalPolynomial:
    """Polynomial with exact rational coefficients, degree-indexed.

    The zero polynomial is the empty coefficient tuple; otherwise the leading
    coefficient is nonzero.
    """

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        if self.coefficients and self.coefficients[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, i: int) -> Fraction:
        if 0 <= i < len(self.coefficients):
            return self.coefficients[i]
        return Fraction(0)

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * Fraction(x) + c
        return acc

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        return RationalPolynomial.from_coefficients(
            [self.coefficient(i) + other.coefficient(i) for i in range(n)]
        )

    def __mul__(self, other):
        if isinstance(other, RationalPolynomial):
            if not self.coefficients or not other.coefficients:
                return RationalPolynomial(())
            out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
            for i, a in enumerate(self.coefficients):
                for j, b in enumerate(other.coefficients):
                    out[i + j] += a * b
            return RationalPolynomial.from_coefficients(out)
        return RationalPolynomial.from_coefficients(
            [Fraction(other) * c for c in self.coefficients]
        )

    __rmul__ = __mul__

    def __neg__(self) -> "RationalPolynomial":
        return self * Fraction(-1)

    def __pow__(self, e: int) -> "RationalPolynomial":
        if e < 0:
            raise ValueError("negative power")
        out = RationalPolynomial.from_coefficients([1])
        for _ in range(e):
            out = out * self
        return out

    @staticmethod
    def from_coefficients(coeffs) -> "RationalPolynomial":
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return RationalPolynomial(tuple(cs))


def fit_polynomial(samples, degree: int) -> RationalPolynomial:
    """Interpolate exact samples (x, value) by a degree <= ``degree`` polynomial.

    Requires at least ``degree + 2`` samples at distinct abscissae; the
    interpolant is built from the first ``degree + 1`` and every surplus
    sample must evaluate exactly, else InconsistentSamples is raised.
    """
    pts = [(Fraction(x), Fraction(y)) for x, y in samples]
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if len({x for x, _ in pts}) != len(pts):
        raise ValueError("sample abscissae must be distinct")
    if len(pts) < degree + 2:
        raise ValueError(
            f"need at least {degree + 2} samples for degree {degree} "
            f"(one surplus for the consistency check), got {len(pts)}"
        )
    base, surplus = pts[: degree + 1], pts[degree + 1 :]
    poly = _lagrange(base)
    for x, y in surplus:
        if poly(x) != y:
            raise InconsistentSamples(
                f"surplus sample at x={x} gives {y}, interpolant gives {poly(x)}; "
                "input is not a polynomial of the stated degree on this window"
            )
    return poly


def _lagrange(points) -> RationalPolynomial:
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(points):
        # numerator polynomial prod_{j != i} (x - xj), built incrementally
        num = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            num = _mul_linear(num, -xj)
            denom *= xi - xj
        scale = yi / denom
        for d, c in enumerate(num):
            coeffs[d] += scale * c
    return RationalPolynomial.from_coefficients(coeffs)


def _mul_linear(coeffs, const):
    """Multiply a coefficient list by (x + const)."""
    out = [Fraction(0)] * (len(coeffs) + 1)
    for d, c in enumerate(coeffs):
        out[d] += c * const
        out[d + 1] += c
    return out

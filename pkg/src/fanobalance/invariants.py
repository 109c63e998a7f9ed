"""Exact algebro-geometric invariants of toric test configurations.

Everything here is computed in rational arithmetic from two expansions in
the level variable s = km:

    N_km = a_0 s^n + ... + a_n          (section-space dimensions)
    w_km = b_0 s^{n+1} + ... + b_{n+1}  (total equivariant weights)

with the downstream combinations

    DF      = 2 (a_1 b_0 - a_0 b_1) / a_0^2
    Chow_k  = b_0 / a_0 - w_k / (k N_k)
    Fut_k   = k N_k (DF + Chow_k).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from . import lattice
from .errors import DegenerateNorm, NotProduct
from .polyfit import fit_polynomial


@dataclass(frozen=True)
class ExpansionCoeffs:
    """Dimension and weight expansion coefficients at a fixed exponent."""

    a: tuple[Fraction, ...]  # a_0 .. a_n
    b: tuple[Fraction, ...]  # b_0 .. b_{n+1}
    k: int

    @property
    def dim(self) -> int:
        return len(self.a) - 1


@lru_cache(maxsize=8192)
def expansion(tc, m_offset: int = 0) -> ExpansionCoeffs:
    """Fit both expansions of a configuration, with consistency surplus.

    The default window samples m = 1 .. degree+2 (shift with ``m_offset`` to
    probe eventual-polynomial behavior); a failed surplus check propagates
    InconsistentSamples.
    """
    P, k = tc.polytope, tc.k
    n = P.dim
    a_samples = [
        (k * m, lattice.ehrhart_count(P, k * m))
        for m in range(1 + m_offset, n + 3 + m_offset)
    ]
    a_poly = fit_polynomial(a_samples, n)
    b_samples = [
        (k * m, tc.total_weight(m)) for m in range(1 + m_offset, n + 4 + m_offset)
    ]
    b_poly = fit_polynomial(b_samples, n + 1)
    a = tuple(a_poly.coefficient(n - i) for i in range(n + 1))
    b = tuple(b_poly.coefficient(n + 1 - i) for i in range(n + 2))
    coeffs = ExpansionCoeffs(a=a, b=b, k=k)
    _check_expansion(coeffs, tc)
    return coeffs


def _check_expansion(coeffs: ExpansionCoeffs, tc):
    n = coeffs.dim
    vol = lattice.volume(tc.polytope)
    if coeffs.a[0] != vol:
        raise AssertionError(
            f"leading Ehrhart coefficient {coeffs.a[0]} != volume {vol}"
        )
    if coeffs.a[1] != Fraction(n, 2) * coeffs.a[0]:
        raise AssertionError("subleading Ehrhart coefficient violates a1 = (n/2) a0")
    if getattr(tc, "is_product", False) and coeffs.b[n + 1] != 0:
        raise AssertionError(
            "product configuration must have vanishing constant weight term"
        )


def donaldson_futaki(tc) -> Fraction:
    """DF invariant; exponent-independent and linearization-invariant."""
    c = expansion(tc)
    a0, a1, b0, b1 = c.a[0], c.a[1], c.b[0], c.b[1]
    return 2 * (a1 * b0 - a0 * b1) / (a0 * a0)


def chow_weight(tc) -> Fraction:
    """Finite-level Chow obstruction b0/a0 - w_k/(k N_k)."""
    c = expansion(tc)
    k = tc.k
    n_k = lattice.ehrhart_count(tc.polytope, k)
    w_k = tc.total_weight(1)
    return c.b[0] / c.a[0] - w_k / (k * n_k)


def quantized_futaki(tc) -> Fraction:
    """Fut_k = k N_k (DF + Chow_k); nonnegativity over exponent-k
    configurations is the finite-level semistability being probed."""
    k = tc.k
    n_k = lattice.ehrhart_count(tc.polytope, k)
    return k * n_k * (donaldson_futaki(tc) + chow_weight(tc))


def chow_df_limit(tc, m_max: int) -> list[tuple[int, Fraction]]:
    """Sequence (m, km * Chow of the rescaled configuration), which tends to
    DF/2 as the rescaling exponent grows."""
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    c = expansion(tc)
    k = tc.k
    out = []
    for m in range(1, m_max + 1):
        n_km = lattice.ehrhart_count(tc.polytope, k * m)
        w_km = tc.total_weight(m)
        chow_km = c.b[0] / c.a[0] - w_km / (k * m * n_km)
        out.append((m, k * m * chow_km))
    return out


@dataclass(frozen=True)
class PNorm:
    """p-norm of a configuration: p-th root of the leading coefficient of
    the trace-free power sums tr(Abar_km^p) ~ leading * (km)^{n+p}."""

    p: int
    leading: Fraction
    value: float


def pnorm(tc, p: int) -> PNorm:
    """Leading coefficient of tr(Abar_km^p) at order (km)^{n+p}, exactly.

    The trace-free power sum itself is a rational function of the level (the
    mean carries a 1/N_km), so the extraction goes through the pure moment
    sums S_j(s) = sum_b w(b)^j, each a genuine polynomial in s = km, and
    exact polynomial algebra on

        G = S_0^{p-1} tr(Abar^p)
          = (-S_1)^p + sum_{j>=1} C(p,j) S_j (-S_1)^{p-j} S_0^{j-1},

    of degree np + p with leading coefficient a_0^{p-1} * ||.||_p^p.
    """
    if p < 2 or p % 2 != 0:
        raise ValueError("p must be a positive even integer")
    P, k = tc.polytope, tc.k
    n = P.dim
    window = range(1, n + p + 3)
    moments = []
    for j in range(0, p + 1):
        samples = []
        for m in window:
            wv = tc.weight_values(m)
            samples.append((k * m, sum((w ** j for w in wv), Fraction(0))))
        moments.append(fit_polynomial(samples, n + j))
    s0, s1 = moments[0], moments[1]
    g = (-s1) ** p
    for j in range(1, p + 1):
        g = g + Fraction(comb(p, j)) * moments[j] * (-s1) ** (p - j) * s0 ** (j - 1)
    leading = g.coefficient(n * p + p) / lattice.volume(P) ** (p - 1)
    if leading == 0:
        raise DegenerateNorm(f"trace-free generator has zero {p}-norm")
    return PNorm(p=p, leading=leading, value=float(leading) ** (1.0 / p))


def higher_futaki(tc) -> tuple[Fraction, ...]:
    """Higher obstruction coefficients F_1..F_n of a product configuration,
    F_p = (n+1-p)! (a_0 b_p - a_p b_0) / a_0."""
    if not getattr(tc, "is_product", False):
        raise NotProduct("higher coefficients are defined for product data only")
    c = expansion(tc)
    n = c.dim
    a0 = c.a[0]
    return tuple(
        Fraction(factorial(n + 1 - p)) * (a0 * c.b[p] - c.a[p] * c.b[0]) / a0
        for p in range(1, n + 1)
    )


@dataclass(frozen=True)
class InvariantReport:
    """All exact invariants of one configuration, plus the p-norm."""

    name: str
    df: Fraction
    chow: Fraction
    futaki: Fraction
    pnorm: PNorm | None
    higher: tuple[Fraction, ...] | None
    is_product: bool
    is_trivial: bool
    k: int
    n_k: int
    expansion: ExpansionCoeffs = field(repr=False)


def invariant_report(tc, p: int = 2) -> InvariantReport:
    coeffs = expansion(tc)
    df = donaldson_futaki(tc)
    chow = chow_weight(tc)
    k = tc.k
    n_k = lattice.ehrhart_count(tc.polytope, k)
    fut = k * n_k * (df + chow)
    try:
        pn = pnorm(tc, p)
    except DegenerateNorm:
        pn = None
    higher = higher_futaki(tc) if getattr(tc, "is_product", False) else None
    return InvariantReport(
        name=getattr(tc, "name", ""),
        df=df,
        chow=chow,
        futaki=fut,
        pnorm=pn,
        higher=higher,
        is_product=tc.is_product,
        is_trivial=tc.is_trivial,
        k=k,
        n_k=n_k,
        expansion=coeffs,
    )

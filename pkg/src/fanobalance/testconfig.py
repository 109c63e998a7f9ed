"""Toric test configurations from piecewise-linear convex data.

A configuration of exponent k on a polytope P is encoded by a convex
function g = max_i(<l_i, y> + c_i) with rational data.  The induced weight
on a section point b of the level-m space (lattice points of km*P) is

    w_m(b) = -km * g(b / (km)) = -max_i(<l_i, b> + km * c_i),

exact rational arithmetic throughout.  The sign is fixed so that the
K-semistable builtins come out with nonnegative Donaldson-Futaki values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

from . import lattice
from .lattice import LatticePolytope
from .rationals import rat_from_str, rat_to_str

Covector = tuple[Fraction, ...]
Piece = tuple[Covector, Fraction]


@dataclass(frozen=True)
class PLConvexFunction:
    """Max of affine pieces; every stored piece is essential on its domain
    polytope (redundant pieces are rejected at validation time)."""

    pieces: tuple[Piece, ...]

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("need at least one piece")
        dims = {len(l) for l, _ in self.pieces}
        if len(dims) != 1:
            raise ValueError("inconsistent piece dimensions")
        if len(set(self.pieces)) != len(self.pieces):
            raise ValueError("duplicate pieces")

    @property
    def dim(self) -> int:
        return len(self.pieces[0][0])

    def value(self, y) -> Fraction:
        yf = tuple(Fraction(t) for t in y)
        return max(
            sum(a * t for a, t in zip(l, yf)) + c for l, c in self.pieces
        )

    def scaled_value(self, b, scale: int) -> Fraction:
        """Exact scale * g(b / scale) without per-coordinate division."""
        return max(
            sum(a * t for a, t in zip(l, b)) + scale * c for l, c in self.pieces
        )

    def plus_affine(self, ell, const) -> "PLConvexFunction":
        ellf = tuple(Fraction(e) for e in ell)
        cf = Fraction(const)
        return PLConvexFunction(
            tuple(
                (tuple(a + e for a, e in zip(l, ellf)), c + cf)
                for l, c in self.pieces
            )
        )

    def scaled(self, d) -> "PLConvexFunction":
        df = Fraction(d)
        if df <= 0:
            raise ValueError("scale must be positive")
        return PLConvexFunction(
            tuple((tuple(df * a for a in l), df * c) for l, c in self.pieces)
        )


def linear_function(ell) -> PLConvexFunction:
    """Single affine piece <ell, y>."""
    return PLConvexFunction(((tuple(Fraction(e) for e in ell), Fraction(0)),))


def kink_function(ell) -> PLConvexFunction:
    """max(0, <ell, y>), the basic non-product degeneration datum."""
    ellf = tuple(Fraction(e) for e in ell)
    zero = tuple(Fraction(0) for _ in ellf)
    return PLConvexFunction(((zero, Fraction(0)), (ellf, Fraction(0))))


def essential_pieces(g: PLConvexFunction, P: LatticePolytope) -> tuple[bool, ...]:
    """For each piece, whether it strictly exceeds all others somewhere on P.

    Exact for dim <= 2: the concave excess f_i - max_{j != i} f_j attains its
    maximum at a vertex of the subdivision of P cut by the tie lines
    {f_j = f_l}, so checking a finite candidate set decides strict positivity.
    """
    candidates = _candidate_points(g, P)
    flags = []
    for i, (li, ci) in enumerate(g.pieces):
        others = [p for j, p in enumerate(g.pieces) if j != i]
        if not others:
            flags.append(True)
            continue
        strict = False
        for y in candidates:
            fi = sum(a * t for a, t in zip(li, y)) + ci
            rest = max(sum(a * t for a, t in zip(l, y)) + c for l, c in others)
            if fi > rest:
                strict = True
                break
        flags.append(strict)
    return tuple(flags)


def _candidate_points(g: PLConvexFunction, P: LatticePolytope):
    verts = [tuple(Fraction(x) for x in v) for v in P.vertices]
    cands = list(verts)
    pairs = []
    n = len(g.pieces)
    for j in range(n):
        for l in range(j + 1, n):
            dl = tuple(a - b for a, b in zip(g.pieces[j][0], g.pieces[l][0]))
            dc = g.pieces[l][1] - g.pieces[j][1]  # tie line <dl, y> = dc
            if any(a != 0 for a in dl):
                pairs.append((dl, dc))
    if P.dim == 1:
        for (a,), dc in pairs:
            y = (dc / a,)
            if P.contains(y):
                cands.append(y)
        return cands
    edges = list(zip(verts, verts[1:] + verts[:1]))
    for dl, dc in pairs:
        for v, w in edges:
            dv = tuple(b - a for a, b in zip(v, w))
            denom = sum(a * t for a, t in zip(dl, dv))
            if denom == 0:
                continue
            t = (dc - sum(a * t0 for a, t0 in zip(dl, v))) / denom
            if 0 <= t <= 1:
                cands.append(tuple(a + t * b for a, b in zip(v, dv)))
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            pt = _solve2(pairs[i], pairs[j])
            if pt is not None and P.contains(pt):
                cands.append(pt)
    return cands


def _solve2(line1, line2):
    (a1, b1), c1 = line1
    (a2, b2), c2 = line2
    det = a1 * b2 - a2 * b1
    if det == 0:
        return None
    return ((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)


@dataclass(frozen=True)
class ToricTestConfig:
    """Exponent-k configuration on a polytope, with a validated PL function."""

    polytope: LatticePolytope
    k: int
    g: PLConvexFunction
    name: str = ""

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("exponent k must be >= 1")
        if self.g.dim != self.polytope.dim:
            raise ValueError("function dimension does not match polytope")
        flags = essential_pieces(self.g, self.polytope)
        if not all(flags):
            dead = [i for i, f in enumerate(flags) if not f]
            raise ValueError(f"redundant pieces on {self.polytope.name}: {dead}")

    @property
    def is_product(self) -> bool:
        return len(self.g.pieces) == 1

    @property
    def is_trivial(self) -> bool:
        return self.is_product and all(a == 0 for a in self.g.pieces[0][0])

    @property
    def weight_denominator(self) -> int:
        """Common denominator of the level-1 weights (1 means an honest
        integral linearization)."""
        return _weights_denominator(self)

    def weight_values(self, m: int) -> tuple:
        """Level-m weights aligned with lattice_points(P, k*m) order."""
        if m < 1:
            raise ValueError("level m must be >= 1")
        return _weight_values_cached(self, m)

    def weights_at_level(self, m: int) -> dict:
        pts = lattice.lattice_points(self.polytope, self.k * m)
        return dict(zip(pts, self.weight_values(m)))

    def total_weight(self, m: int) -> Fraction:
        return sum(self.weight_values(m), Fraction(0))


@lru_cache(maxsize=16384)
def _weight_values_cached(tc: ToricTestConfig, m: int) -> tuple:
    km = tc.k * m
    pts = lattice.lattice_points(tc.polytope, km)
    return tuple(-tc.g.scaled_value(b, km) for b in pts)


def _weights_denominator(tc: ToricTestConfig) -> int:
    den = 1
    for w in tc.weight_values(1):
        den = lcm(den, w.denominator)
    return den


@dataclass(frozen=True)
class Generator:
    """Diagonal infinitesimal generator on the level-1 section basis."""

    basis: tuple
    weights: tuple
    k: int

    @property
    def trace(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @property
    def trace_free(self) -> tuple:
        mean = self.trace / len(self.weights)
        return tuple(w - mean for w in self.weights)

    @property
    def is_zero(self) -> bool:
        return all(w == 0 for w in self.weights)


def generator(tc: ToricTestConfig) -> Generator:
    """The diagonal generator acting on sections at the base exponent."""
    wmap = tc.weights_at_level(1)
    basis = lattice.lattice_points(tc.polytope, tc.k)
    return Generator(basis, tuple(wmap[b] for b in basis), tc.k)


@dataclass(frozen=True)
class ShiftedWeights:
    """A linearization shift: every level-m weight moved by c*m.

    Wraps a configuration without changing its geometry; the stability
    invariants must not see the shift.
    """

    base: ToricTestConfig
    c: Fraction

    @property
    def polytope(self):
        return self.base.polytope

    @property
    def k(self):
        return self.base.k

    @property
    def name(self):
        return f"{self.base.name}+shift({rat_to_str(self.c)})"

    @property
    def is_product(self):
        return self.base.is_product

    @property
    def is_trivial(self):
        return self.base.is_trivial

    def weight_values(self, m: int) -> tuple:
        shift = Fraction(self.c) * m
        return tuple(w + shift for w in self.base.weight_values(m))

    def weights_at_level(self, m: int) -> dict:
        pts = lattice.lattice_points(self.polytope, self.k * m)
        return dict(zip(pts, self.weight_values(m)))

    def total_weight(self, m: int) -> Fraction:
        n_km = lattice.ehrhart_count(self.polytope, self.k * m)
        return self.base.total_weight(m) + Fraction(self.c) * m * n_km


def shift_linearization(tc: ToricTestConfig, c) -> ShiftedWeights:
    return ShiftedWeights(tc, Fraction(c))


def clear_denominators(tc: ToricTestConfig):
    """Rescale g by the least common denominator of its data, returning
    (integral configuration, scale).  Invariants scale linearly in it."""
    den = 1
    for l, c in tc.g.pieces:
        for a in l:
            den = lcm(den, a.denominator)
        den = lcm(den, c.denominator)
    if den == 1:
        return tc, 1
    return (
        ToricTestConfig(tc.polytope, tc.k, tc.g.scaled(den), name=f"{tc.name}x{den}"),
        den,
    )


def to_json_dict(tc: ToricTestConfig) -> dict:
    return {
        "polytope": tc.polytope.name,
        "k": tc.k,
        "pieces": [
            {"linear": [rat_to_str(a) for a in l], "const": rat_to_str(c)}
            for l, c in tc.g.pieces
        ],
        "name": tc.name,
    }


def from_json_dict(data: dict, polytope: LatticePolytope | None = None) -> ToricTestConfig:
    P = polytope if polytope is not None else lattice.load(str(data["polytope"]))
    pieces = tuple(
        (
            tuple(rat_from_str(a) for a in piece["linear"]),
            rat_from_str(piece.get("const", 0)),
        )
        for piece in data["pieces"]
    )
    return ToricTestConfig(P, int(data["k"]), PLConvexFunction(pieces),
                           name=str(data.get("name", "")))


def load(path: str) -> ToricTestConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json_dict(json.load(fh))


def save(tc: ToricTestConfig, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(tc), fh, indent=2)
        fh.write("\n")

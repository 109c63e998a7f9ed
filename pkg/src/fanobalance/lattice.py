"""Exact lattice polytope layer for dimensions 1 and 2.

Polytopes are stored as integer vertex lists together with derived primitive
facet data (nu, c) meaning ``<x, nu> >= -c``.  All arithmetic in this module
is exact (ints and Fractions); no floating point enters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd

Point = tuple[int, ...]
Facet = tuple[Point, int]

MAX_DIM = 2


class PolytopeError(ValueError):
    """Invalid polytope data."""


@dataclass(frozen=True)
class LatticePolytope:
    """Full-dimensional lattice polytope, the moment body of the build.

    ``vertices`` are ordered deterministically (counterclockwise from the
    lexicographic minimum in 2d, increasing in 1d); ``facets`` list primitive
    inward normals with offsets, P = {x : <x, nu> >= -c for all (nu, c)}.
    """

    name: str
    dim: int
    vertices: tuple[Point, ...]
    facets: tuple[Facet, ...]

    def __post_init__(self):
        _validate(self)

    @property
    def is_reflexive(self) -> bool:
        """All facet offsets are 1 and the origin is the unique interior
        lattice point."""
        if any(c != 1 for _, c in self.facets):
            return False
        return interior_lattice_points(self) == ((0,) * self.dim,)

    def contains(self, point, m: int = 1) -> bool:
        """Exact membership of ``point`` (ints or Fractions) in the dilation m*P."""
        return all(
            sum(Fraction(x) * n for x, n in zip(point, nu)) >= -m * c
            for nu, c in self.facets
        )

    def support(self, direction) -> Fraction:
        """Support function value max_{y in P} <y, direction>."""
        return max(
            sum(Fraction(d) * v for d, v in zip(direction, vert))
            for vert in self.vertices
        )


def from_vertices(name: str, vertices) -> LatticePolytope:
    """Build a polytope from integer vertices, deriving and validating facets."""
    verts = tuple(tuple(int(x) for x in v) for v in vertices)
    if not verts:
        raise PolytopeError("no vertices")
    dims = {len(v) for v in verts}
    if len(dims) != 1:
        raise PolytopeError("inconsistent vertex dimensions")
    dim = dims.pop()
    if dim < 1 or dim > MAX_DIM:
        raise PolytopeError(f"dimension {dim} outside supported range 1..{MAX_DIM}")
    if len(set(verts)) != len(verts):
        raise PolytopeError("duplicate vertices")
    if dim == 1:
        ordered, facets = _build_1d(verts)
    else:
        ordered, facets = _build_2d(verts)
    return LatticePolytope(name, dim, ordered, facets)


def _build_1d(verts):
    xs = sorted(v[0] for v in verts)
    if len(xs) != 2:
        raise PolytopeError("a 1d polytope needs exactly two vertices")
    a, b = xs
    if a >= b:
        raise PolytopeError("degenerate interval")
    ordered = ((a,), (b,))
    facets = (((1,), -a), ((-1,), b))
    return ordered, facets


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _convex_hull_2d(points):
    """Monotone chain over integer points; returns ccw hull vertices."""
    pts = sorted(set(points))
    if len(pts) < 3:
        raise PolytopeError("a 2d polytope needs at least three vertices")
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return tuple(lower[:-1] + upper[:-1])


def _build_2d(verts):
    hull = _convex_hull_2d(verts)
    if set(hull) != set(verts):
        extra = set(verts) - set(hull)
        raise PolytopeError(f"input points are not all hull vertices: {sorted(extra)}")
    facets = []
    n = len(hull)
    for i in range(n):
        v, w = hull[i], hull[(i + 1) % n]
        d = (w[0] - v[0], w[1] - v[1])
        nu = (-d[1], d[0])  # inward for ccw ordering
        g = gcd(abs(nu[0]), abs(nu[1]))
        nu = (nu[0] // g, nu[1] // g)
        c = -(v[0] * nu[0] + v[1] * nu[1])
        facets.append((nu, c))
    return hull, tuple(facets)


def _validate(P: LatticePolytope):
    if P.dim > MAX_DIM:
        raise PolytopeError("dimension above supported limit")
    for v in P.vertices:
        for nu, c in P.facets:
            if sum(x * n for x, n in zip(v, nu)) < -c:
                raise PolytopeError(f"vertex {v} violates facet {(nu, c)}")
    for nu, c in P.facets:
        tight = [v for v in P.vertices if sum(x * n for x, n in zip(v, nu)) == -c]
        if len(tight) < P.dim:
            raise PolytopeError(f"facet {(nu, c)} supports too few vertices")
    if volume(P) <= 0:
        raise PolytopeError("zero volume")
    # hull == facet intersection: every vertex of P must be extreme among
    # the m=1 lattice points, and conversely each facet system vertex is listed.
    pts = set(lattice_points(P, 1))
    if not set(P.vertices) <= pts:
        raise PolytopeError("vertices escape the facet system")


@lru_cache(maxsize=4096)
def lattice_points(P: LatticePolytope, m: int) -> tuple[Point, ...]:
    """All integer points of the dilation m*P, sorted lexicographically.

    The lexicographic order is the basis order used everywhere downstream.
    """
    if m < 0:
        raise ValueError("dilation factor must be nonnegative")
    if m == 0:
        return ((0,) * P.dim,)
    lo = [m * min(v[i] for v in P.vertices) for i in range(P.dim)]
    hi = [m * max(v[i] for v in P.vertices) for i in range(P.dim)]
    ranges = [range(lo[i], hi[i] + 1) for i in range(P.dim)]
    out = []
    for cand in product(*ranges):
        if all(
            sum(x * n for x, n in zip(cand, nu)) >= -m * c for nu, c in P.facets
        ):
            out.append(cand)
    return tuple(out)


def interior_lattice_points(P: LatticePolytope, m: int = 1) -> tuple[Point, ...]:
    """Integer points strictly inside m*P."""
    return tuple(
        p
        for p in lattice_points(P, m)
        if all(sum(x * n for x, n in zip(p, nu)) > -m * c for nu, c in P.facets)
    )


def ehrhart_count(P: LatticePolytope, m: int) -> int:
    """Number of lattice points of m*P (the section-space dimension at level m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return len(lattice_points(P, m))


def volume(P: LatticePolytope) -> Fraction:
    """Euclidean volume, exact."""
    if P.dim == 1:
        return Fraction(P.vertices[1][0] - P.vertices[0][0])
    s = 0
    n = len(P.vertices)
    for i in range(n):
        x0, y0 = P.vertices[i]
        x1, y1 = P.vertices[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return Fraction(abs(s), 2)


def dilate(P: LatticePolytope, k: int) -> LatticePolytope:
    """The dilation k*P as a polytope object (offsets scale by k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    verts = tuple(tuple(k * x for x in v) for v in P.vertices)
    facets = tuple((nu, k * c) for nu, c in P.facets)
    return LatticePolytope(f"{P.name}*{k}", P.dim, verts, facets)


# Builtin reflexive polytopes of the anticanonical models used throughout.
_BUILTIN_VERTICES = {
    "P1": [(-1,), (1,)],
    "P2": [(-1, -1), (2, -1), (-1, 2)],
    "P1xP1": [(-1, -1), (1, -1), (1, 1), (-1, 1)],
    "F1": [(-1, 0), (0, -1), (2, -1), (-1, 2)],
}

BUILTIN_NAMES = tuple(_BUILTIN_VERTICES)


@lru_cache(maxsize=None)
def builtin(name: str) -> LatticePolytope:
    """Look up a builtin polytope by name (P1, P2, P1xP1, F1)."""
    if name not in _BUILTIN_VERTICES:
        raise KeyError(f"unknown builtin polytope {name!r}; have {BUILTIN_NAMES}")
    P = from_vertices(name, _BUILTIN_VERTICES[name])
    if not P.is_reflexive:
        raise PolytopeError(f"builtin {name} failed the reflexivity check")
    return P


def to_json_dict(P: LatticePolytope) -> dict:
    return {"name": P.name, "dim": P.dim, "vertices": [list(v) for v in P.vertices]}


def from_json_dict(data: dict) -> LatticePolytope:
    P = from_vertices(str(data["name"]), data["vertices"])
    if P.dim != int(data["dim"]):
        raise PolytopeError("declared dim does not match vertices")
    if not P.is_reflexive:
        raise PolytopeError(
            f"polytope {P.name!r} is not reflexive; only anticanonical models "
            "are supported"
        )
    return P


def load(path_or_name: str) -> LatticePolytope:
    """Resolve a builtin name or load a polytope JSON file."""
    if path_or_name in _BUILTIN_VERTICES:
        return builtin(path_or_name)
    with open(path_or_name, "r", encoding="utf-8") as fh:
        return from_json_dict(json.load(fh))

"""Torus-invariant potentials in log coordinates and their densities.

Conventions (see CONVENTIONS.md): with x_i = log|z_i|^2 and the angular
factor normalized to 1,

  * a section point b of the level-k basis has |s_b|^2 = e^{<b,x> - k u(x)},
  * the probability density of the normalized anticanonical volume form is
    e^{-u}/Z_u with Z_u = int e^{-u} dx,
  * the top curvature power reduces to the density  n! det D^2 u(x),
    total mass n! vol(P),
  * the deviation density is
    B(x) = (e^{-u}/Z_u) / det D^2 u  -  1/vol(P),
    vanishing identically exactly at the Einstein point, and its L^q norms
    are taken against det D^2 u dx (unit-normalized curvature measure).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from . import lattice
from .errors import NumericalUnderflow, TailTolerance
from .lattice import LatticePolytope
from .quadrature import QuadratureSpec, gauss_grid, integrate, tail_estimate

_CHUNK = 32768


@dataclass(frozen=True)
class ToricPotential:
    """Log-sum-exp potential u(x) = (1/k) log((1/N_k) sum_b e^{<b,x>}/h_b) + shift."""

    polytope: LatticePolytope
    k: int
    h: tuple[float, ...]
    shift: float = 0.0

    def __post_init__(self):
        basis = lattice.lattice_points(self.polytope, self.k)
        if len(self.h) != len(basis):
            raise ValueError(
                f"expected {len(basis)} entries for the level-{self.k} basis, "
                f"got {len(self.h)}"
            )
        if any(not np.isfinite(v) or v <= 0 for v in self.h):
            raise ValueError("metric entries must be positive and finite")

    @property
    def basis(self) -> np.ndarray:
        return np.asarray(lattice.lattice_points(self.polytope, self.k), dtype=float)

    @property
    def n_sections(self) -> int:
        return len(self.h)

    def shifted(self, c: float) -> "ToricPotential":
        return ToricPotential(self.polytope, self.k, self.h, self.shift + float(c))

    def value(self, points) -> np.ndarray:
        return jets(self, points, order=0)[0]

    def __call__(self, points) -> np.ndarray:
        return self.value(points)


@dataclass(frozen=True)
class Jets:
    """Pointwise value/gradient/Hessian data of a potential on a batch."""

    value: np.ndarray      # (M,)
    gradient: np.ndarray   # (M, n)
    hessian: np.ndarray    # (M, n, n)
    hess_det: np.ndarray   # (M,), cancellation-free


def _softmax_rows(logits):
    mx = logits.max(axis=1, keepdims=True)
    if not np.isfinite(mx).all():
        raise NumericalUnderflow("potential exponents are not finite")
    p = np.exp(logits - mx)
    s = p.sum(axis=1, keepdims=True)
    return p / s, (mx[:, 0] + np.log(s[:, 0]))


def jets(u: ToricPotential, points, order: int = 2) -> Jets:
    """Evaluate u and its derivatives on a batch of points.

    Gradient and Hessian are softmax moments of the section points divided
    by k; the Hessian determinant is accumulated as the pairwise sum
    (1/2) sum_{ij} p_i p_j (c_i x c_j)^2 whose terms are nonnegative, so it
    keeps relative accuracy deep in the exponential tail.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if not np.isfinite(pts).all():
        raise ValueError("evaluation points must be finite")
    B = u.basis
    logh = np.log(np.asarray(u.h, dtype=float))
    n = pts.shape[1]
    M = pts.shape[0]
    N = B.shape[0]
    val = np.empty(M)
    grad = np.empty((M, n)) if order >= 1 else None
    hess = np.empty((M, n, n)) if order >= 2 else None
    det = np.empty(M) if order >= 2 else None
    for s in range(0, M, _CHUNK):
        pc = pts[s:s + _CHUNK]
        m = pc.shape[0]
        p, lse = _softmax_rows(pc @ B.T - logh[None, :])
        val[s:s + m] = (lse - np.log(N)) / u.k + u.shift
        if order < 1:
            continue
        mean = p @ B
        grad[s:s + m] = mean / u.k
        if order < 2:
            continue
        C = B[None, :, :] - mean[:, None, :]
        hess[s:s + m] = np.einsum("mb,mbi,mbj->mij", p, C, C) / u.k
        if n == 1:
            det[s:s + m] = hess[s:s + m, 0, 0]
        else:
            a, b = C[:, :, 0], C[:, :, 1]
            acc = np.zeros(m)
            for j in range(N):
                cross = a * b[:, j:j + 1] - a[:, j:j + 1] * b
                acc += p[:, j] * np.einsum("mb,mb->m", p, cross * cross)
            det[s:s + m] = 0.5 * acc / u.k ** 2
    return Jets(val, grad, hess, det)


def potential_jet(u: ToricPotential, x):
    """Single-point (value, gradient, Hessian) view of ``jets``."""
    j = jets(u, np.asarray(x, dtype=float)[None, :]
             if np.ndim(x) == 1 else x)
    if np.ndim(x) == 1:
        return j.value[0], j.gradient[0], j.hessian[0]
    return j.value, j.gradient, j.hessian


def mu_decay_rate(P: LatticePolytope) -> float:
    """Certificate for e^{-u}: support-function growth along the axes."""
    return min(
        float(P.support(sgn * e))
        for e in np.eye(P.dim, dtype=int).tolist()
        for sgn in (1, -1)
    )


def section_decay_rate(P: LatticePolytope, beta, c: float) -> float:
    """Certificate for e^{<beta,x> - c*u(x)} along the axes (c > k needed)."""
    rate = np.inf
    for i in range(P.dim):
        for sgn in (1, -1):
            e = [0] * P.dim
            e[i] = sgn
            rate = min(rate, c * float(P.support(e)) - sgn * float(beta[i]))
    return float(rate)


def curvature_decay_rate(P: LatticePolytope, k: int) -> float:
    """Conservative certificate for det D^2 u tails (lattice gap over k)."""
    return 1.0 / (2.0 * k)


@dataclass(frozen=True)
class MuDensity:
    """Normalized density e^{-u}/Z with its partition value and tail record."""

    potential: ToricPotential
    z_value: float
    tail: float
    spec: QuadratureSpec

    def __call__(self, points) -> np.ndarray:
        return np.exp(-self.potential.value(points)) / self.z_value


def density_mu(u: ToricPotential, spec: QuadratureSpec | None = None) -> MuDensity:
    """Normalize e^{-u}; raises TailTolerance if the box cannot close the tail."""
    spec = spec or QuadratureSpec.default(u.polytope.dim)
    rate = mu_decay_rate(u.polytope)
    z, tail, used = integrate(lambda pts: np.exp(-u.value(pts)), spec, rate)
    return MuDensity(u, z, tail, used)


def ma_density(u: ToricPotential, points) -> np.ndarray:
    """Density of the top curvature power: n! det D^2 u."""
    j = jets(u, points)
    return factorial(u.polytope.dim) * j.hess_det


def ma_mass(u: ToricPotential, spec: QuadratureSpec | None = None):
    """Total curvature mass; contract: n! vol(P) up to the tail estimate."""
    spec = spec or QuadratureSpec.default(u.polytope.dim)
    rate = curvature_decay_rate(u.polytope, u.k)
    return integrate(lambda pts: ma_density(u, pts), spec, rate)


@dataclass(frozen=True)
class BFunction:
    """Deviation-from-Einstein density with cached normalization."""

    potential: ToricPotential
    z_value: float
    spec: QuadratureSpec

    def __call__(self, points) -> np.ndarray:
        j = jets(self.potential, points)
        mu = np.exp(-j.value) / self.z_value
        vol = float(lattice.volume(self.potential.polytope))
        return mu / j.hess_det - 1.0 / vol

    def values_with_weight(self, points):
        """(B values, det D^2 u values) sharing one jet evaluation."""
        j = jets(self.potential, points)
        mu = np.exp(-j.value) / self.z_value
        vol = float(lattice.volume(self.potential.polytope))
        return mu / j.hess_det - 1.0 / vol, j.hess_det


def b_function(u: ToricPotential, spec: QuadratureSpec | None = None) -> BFunction:
    spec = spec or QuadratureSpec.default(u.polytope.dim)
    mu = density_mu(u, spec)
    return BFunction(u, mu.z_value, mu.spec)


def lq_norm_b(u: ToricPotential, q: float,
              spec: QuadratureSpec | None = None,
              max_expansions: int = 3) -> float:
    """L^q norm of B against the unit-normalized curvature measure,
    (int |B|^q det D^2 u dx)^{1/q}."""
    if q <= 1:
        raise ValueError("q must exceed 1")
    current = spec or QuadratureSpec.default(u.polytope.dim)
    rate = curvature_decay_rate(u.polytope, u.k)
    for _ in range(max_expansions + 1):
        b = b_function(u, current)
        pts, wts = gauss_grid(b.spec)
        vals, weight = b.values_with_weight(pts)
        integrand = np.abs(vals) ** q * weight
        tail = tail_estimate(integrand, b.spec, rate)
        if tail <= b.spec.tail_tol:
            return float(wts @ integrand) ** (1.0 / q)
        current = b.spec.expanded()
    raise TailTolerance(
        f"deviation-norm tail {tail:.3e} above {current.tail_tol:.1e}"
    )

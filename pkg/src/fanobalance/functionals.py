"""Quantization maps and the energy functional layer.

All functionals are evaluated in log coordinates against a fixed reference
pair (u_0, H_0) with u_0 the potential of the identity metric and
H_0 = hilb(u_0); the reference only moves every value by a constant, which
cancels in the slopes, differences and identities this package tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from . import lattice
from .lattice import LatticePolytope
from .potentials import (
    ToricPotential,
    jets,
    mu_decay_rate,
    section_decay_rate,
)
from .quadrature import QuadratureSpec, gauss_grid, tail_estimate
from .errors import TailTolerance
from .rationals import rat_to_str


@dataclass(frozen=True)
class DiagonalHermitian:
    """Positive diagonal metric on the level-k section space, entries aligned
    with the lexicographic basis order of the k-fold dilation."""

    polytope: LatticePolytope
    k: int
    entries: tuple[float, ...]

    def __post_init__(self):
        basis = lattice.lattice_points(self.polytope, self.k)
        if len(self.entries) != len(basis):
            raise ValueError(
                f"expected {len(basis)} entries, got {len(self.entries)}"
            )
        if any(not np.isfinite(v) or v <= 0 for v in self.entries):
            raise ValueError("metric entries must be positive and finite")

    @property
    def basis(self):
        return lattice.lattice_points(self.polytope, self.k)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=float)

    @property
    def n_sections(self) -> int:
        return len(self.entries)

    def scaled(self, c: float) -> "DiagonalHermitian":
        if c <= 0:
            raise ValueError("scale must be positive")
        return DiagonalHermitian(
            self.polytope, self.k, tuple(c * v for v in self.entries)
        )

    def det_normalized(self) -> "DiagonalHermitian":
        """Determinant-one gauge (divide by the geometric mean)."""
        gm = float(np.exp(np.mean(np.log(self.array))))
        return self.scaled(1.0 / gm)

    @staticmethod
    def identity(P: LatticePolytope, k: int) -> "DiagonalHermitian":
        n = len(lattice.lattice_points(P, k))
        return DiagonalHermitian(P, k, (1.0,) * n)


def fs(H: DiagonalHermitian) -> ToricPotential:
    """Dequantization: the projective potential of an H-orthonormal basis,
    fs(c H) = fs(H) - log(c)/k."""
    return ToricPotential(H.polytope, H.k, H.entries)


def hilb(u: ToricPotential, spec: QuadratureSpec | None = None) -> DiagonalHermitian:
    """Quantization: h_b = int e^{<b,x> - k u} dmu_u, with mu_u = e^{-u}/Z_u.

    All entries and Z_u are computed on one shared grid, which keeps the
    algebraic identity sum_b h_b / h'_b = N exact at float level for the
    fixed-point residuals downstream.
    """
    P, k = u.polytope, u.k
    spec = spec or QuadratureSpec.default(P.dim)
    basis = np.asarray(lattice.lattice_points(P, k), dtype=float)
    for _ in range(4):
        pts, wts = gauss_grid(spec)
        uv = u.value(pts)
        emu = np.exp(-uv)
        z = float(wts @ emu)
        integrands = np.exp(pts @ basis.T - (k + 1.0) * uv[:, None])
        entries = (wts @ integrands) / z
        rate = min(
            min(section_decay_rate(P, b, k + 1.0) for b in basis),
            mu_decay_rate(P),
        )
        tail = max(
            tail_estimate(integrands[:, j], spec, rate)
            for j in range(integrands.shape[1])
        )
        if tail <= spec.tail_tol * max(1.0, float(entries.max())):
            return DiagonalHermitian(P, k, tuple(float(v) for v in entries))
        spec = spec.expanded()
    raise TailTolerance("quantization integrals could not close their tails")


@lru_cache(maxsize=32)
def reference(P: LatticePolytope, k: int) -> tuple[ToricPotential, DiagonalHermitian]:
    """Cached reference pair: u_0 = fs(Id) and H_0 = hilb(u_0)."""
    u0 = fs(DiagonalHermitian.identity(P, k))
    return u0, hilb(u0)


def _mixed_densities(j_u, j_v, dim: int):
    """Densities of the curvature-power pairings between two potentials.

    dim 1: (u'', v''); dim 2: (2 det S, mix(S, T), 2 det T) with
    mix(S, T) = S00 T11 + S11 T00 - 2 S01 T01.
    """
    if dim == 1:
        return [j_u.hessian[:, 0, 0], j_v.hessian[:, 0, 0]]
    S, T = j_u.hessian, j_v.hessian
    mix = (S[:, 0, 0] * T[:, 1, 1] + S[:, 1, 1] * T[:, 0, 0]
           - 2.0 * S[:, 0, 1] * T[:, 0, 1])
    return [2.0 * j_u.hess_det, mix, 2.0 * j_v.hess_det]


def monge_ampere_energy(u: ToricPotential, u0: ToricPotential,
                        spec: QuadratureSpec | None = None) -> float:
    """Aubin-Mabuchi energy of u relative to u0,
    (1/(n+1)) sum_i int (u - u0) w_u^{n-i} w_0^i in log coordinates."""
    if (u.polytope, u.k) != (u0.polytope, u0.k):
        raise ValueError("potentials must share polytope and exponent")
    dim = u.polytope.dim
    spec = spec or QuadratureSpec.default(dim)
    pts, wts = gauss_grid(spec)
    j_u = jets(u, pts)
    j_0 = jets(u0, pts)
    diff = j_u.value - j_0.value
    dens = _mixed_densities(j_u, j_0, dim)
    total = sum(float(wts @ (diff * d)) for d in dens)
    return total / (dim + 1)


def l_functional(u: ToricPotential, spec: QuadratureSpec | None = None) -> float:
    """-log of the total anticanonical mass of u (additive constant relative
    to the compact-manifold normalization, harmless in every tested use)."""
    spec = spec or QuadratureSpec.default(u.polytope.dim)
    pts, wts = gauss_grid(spec)
    z = float(wts @ np.exp(-u.value(pts)))
    return -np.log(z)


def ding_functional(u: ToricPotential, u0: ToricPotential,
                    spec: QuadratureSpec | None = None) -> float:
    """-E/(-K)^n + L, the continuum functional under the reference u0."""
    degree = factorial(u.polytope.dim) * float(lattice.volume(u.polytope))
    return (-monge_ampere_energy(u, u0, spec) / degree
            + l_functional(u, spec))


def det_energy(H: DiagonalHermitian, H0: DiagonalHermitian) -> float:
    """Quantized energy -(1/(k N_k)) log det(H relative to H0)."""
    logdet = float(np.sum(np.log(H.array)) - np.sum(np.log(H0.array)))
    return -logdet / (H.k * H.n_sections)


def balancing_energy(H: DiagonalHermitian,
                     spec: QuadratureSpec | None = None,
                     refs=None) -> float:
    """Scaled gap between the continuum energy of fs(H) and the quantized
    energy; bounded along product rays, asymptotically linear otherwise with
    rate proportional to the Chow weight."""
    u0, H0 = refs if refs is not None else reference(H.polytope, H.k)
    degree = factorial(H.polytope.dim) * float(lattice.volume(H.polytope))
    e = monge_ampere_energy(fs(H), u0, spec)
    ek = det_energy(H, H0)
    n = H.polytope.dim
    return (degree / factorial(n)) * H.k ** (n + 1) * (e / degree - ek)


@dataclass(frozen=True)
class FunctionalValues:
    """One evaluation of the full functional suite at a metric H."""

    e: float
    l: float
    d: float
    ek: float
    zk: float
    dk: float
    spec: QuadratureSpec

    def decomposition_residual(self, polytope: LatticePolytope, k: int) -> float:
        """dk - d - (n!/(k^{n+1} (-K)^n)) zk; zero by construction up to
        float rounding."""
        n = polytope.dim
        degree = factorial(n) * float(lattice.volume(polytope))
        return self.dk - self.d - factorial(n) / (k ** (n + 1) * degree) * self.zk


def functional_suite(H: DiagonalHermitian,
                     spec: QuadratureSpec | None = None,
                     refs=None) -> FunctionalValues:
    """Evaluate E, L, D (continuum) and E^k, Z_k, D^k (quantized) at H."""
    P, k = H.polytope, H.k
    n = P.dim
    spec = spec or QuadratureSpec.default(n)
    u0, H0 = refs if refs is not None else reference(P, k)
    u = fs(H)
    degree = factorial(n) * float(lattice.volume(P))
    e = monge_ampere_energy(u, u0, spec)
    l = l_functional(u, spec)
    d = -e / degree + l
    ek = det_energy(H, H0)
    zk = (degree / factorial(n)) * k ** (n + 1) * (e / degree - ek)
    dk = -ek + l
    return FunctionalValues(e=e, l=l, d=d, ek=ek, zk=zk, dk=dk, spec=spec)


@dataclass(frozen=True)
class MMatrix:
    """Diagonal overlap matrix driving the quantized Ding gradient."""

    diagonal: np.ndarray
    trace_free: np.ndarray
    k: int
    n_sections: int

    @property
    def trace(self) -> float:
        return float(self.diagonal.sum())

    @property
    def residual_inf(self) -> float:
        """sup-norm of the trace-free part, the balanced-metric residual."""
        return float(np.abs(self.trace_free).max())


def m_matrix(H: DiagonalHermitian, spec: QuadratureSpec | None = None) -> MMatrix:
    """M_bb = (k^n / N_k) hilb(fs(H))_b / h_b and its trace-free part.

    tr M = k^n holds exactly for the shared-grid quadrature; M vanishes
    trace-free exactly at fixed points of hilb o fs.
    """
    n = H.polytope.dim
    kn = float(H.k) ** n
    refreshed = hilb(fs(H), spec)
    diag = (kn / H.n_sections) * refreshed.array / H.array
    trace_free = diag - kn / H.n_sections
    return MMatrix(diag, trace_free, H.k, H.n_sections)


def ding_derivative(H: DiagonalHermitian, weights,
                    spec: QuadratureSpec | None = None) -> float:
    """Geodesic derivative of the quantized Ding functional at H in the
    direction of a diagonal generator: (1/k^{n+1}) tr(A Mbar(H))."""
    w = np.asarray(
        [float(x) for x in (weights.weights if hasattr(weights, "weights") else weights)],
        dtype=float,
    )
    m = m_matrix(H, spec)
    if w.shape[0] != m.n_sections:
        raise ValueError("generator does not match the section basis")
    n = H.polytope.dim
    return float(w @ m.trace_free) / H.k ** (n + 1)


def to_json_dict(H: DiagonalHermitian) -> dict:
    keys = ["(" + ",".join(str(c) for c in b) + ")" for b in H.basis]
    return {
        "polytope": H.polytope.name,
        "k": H.k,
        "h": {key: float(v) for key, v in zip(keys, H.entries)},
    }


def from_json_dict(data: dict,
                   polytope: LatticePolytope | None = None) -> DiagonalHermitian:
    P = polytope if polytope is not None else lattice.load(str(data["polytope"]))
    k = int(data["k"])
    basis = lattice.lattice_points(P, k)
    entries = []
    hmap = data["h"]
    for b in basis:
        key = "(" + ",".join(str(c) for c in b) + ")"
        if key not in hmap:
            raise KeyError(f"metric file is missing entry for basis point {key}")
        entries.append(float(hmap[key]))
    return DiagonalHermitian(P, k, tuple(entries))


def load(path: str) -> DiagonalHermitian:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json_dict(json.load(fh))


def save(H: DiagonalHermitian, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(H), fh, indent=2)
        fh.write("\n")

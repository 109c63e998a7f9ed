"""Tensor-product Gauss-Legendre quadrature over boxes in R^n.

Integrands in this package decay exponentially, so a box plus a decay-rate
certificate gives a cheap tail estimate: max |f| on each boundary face times
the inverse rate times the face measure.  If the estimate misses the target
tolerance the box auto-expands a few times before giving up.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from math import ceil

import numpy as np

from .errors import TailTolerance

DEFAULT_TAIL_TOL = 1e-9
NODES_PER_UNIT = 8.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Box half-widths per axis, nodes per axis, and the tail target."""

    half_widths: tuple[float, ...]
    nodes: int
    tail_tol: float = DEFAULT_TAIL_TOL

    @property
    def dim(self) -> int:
        return len(self.half_widths)

    @staticmethod
    def default(dim: int, t: float = 0.0, nodes: int | None = None,
                half_width: float | None = None,
                tail_tol: float = DEFAULT_TAIL_TOL) -> "QuadratureSpec":
        """Default spec; the box grows linearly with geodesic time t."""
        half = half_width if half_width is not None else max(40.0, 2.0 * t + 50.0)
        n = nodes if nodes is not None else max(400, ceil(NODES_PER_UNIT * half))
        return QuadratureSpec((float(half),) * dim, int(n), float(tail_tol))

    def expanded(self, factor: float = 1.5) -> "QuadratureSpec":
        half = tuple(h * factor for h in self.half_widths)
        return replace(self, half_widths=half,
                       nodes=max(self.nodes, ceil(NODES_PER_UNIT * max(half))))

    def doubled(self) -> "QuadratureSpec":
        return replace(self, nodes=2 * self.nodes)


@lru_cache(maxsize=64)
def _leggauss(nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return x, w


@lru_cache(maxsize=64)
def gauss_grid(spec: QuadratureSpec):
    """Flattened tensor grid: points (M, dim) and weights (M,)."""
    axes, wts = [], []
    for h in spec.half_widths:
        x, w = _leggauss(spec.nodes)
        axes.append(x * h)
        wts.append(w * h)
    if spec.dim == 1:
        return axes[0][:, None], wts[0]
    X1, X2 = np.meshgrid(axes[0], axes[1], indexing="ij")
    W = np.outer(wts[0], wts[1])
    return np.stack([X1.ravel(), X2.ravel()], axis=1), W.ravel()


def tail_estimate(values: np.ndarray, spec: QuadratureSpec, decay_rate: float) -> float:
    """Boundary-face maxima of |f| divided by the decay rate.

    The rate is the caller's certificate for exponential decay outward from
    the box; an estimate, not a rigorous bound.
    """
    if decay_rate <= 0:
        raise ValueError("decay rate must be positive")
    n = spec.nodes
    absv = np.abs(values)
    if spec.dim == 1:
        return float(absv[0] + absv[-1]) / decay_rate
    grid = absv.reshape(n, n)
    cross = 2.0 * max(spec.half_widths)
    faces = (grid[0, :].max() + grid[-1, :].max()
             + grid[:, 0].max() + grid[:, -1].max())
    return float(faces) * cross / decay_rate


def integrate(fn, spec: QuadratureSpec, decay_rate: float,
              max_expansions: int = 3):
    """Integrate a vectorized integrand, expanding the box until the tail
    estimate meets the spec tolerance.

    Returns (value, tail_estimate, spec_used); raises TailTolerance when the
    target stays out of reach after ``max_expansions`` growth steps.
    """
    current = spec
    for _ in range(max_expansions + 1):
        pts, wts = gauss_grid(current)
        vals = np.asarray(fn(pts), dtype=float)
        tail = tail_estimate(vals, current, decay_rate)
        if tail <= current.tail_tol:
            return float(wts @ vals), tail, current
        current = current.expanded()
    raise TailTolerance(
        f"tail estimate {tail:.3e} above tolerance {spec.tail_tol:.1e} "
        f"after {max_expansions} box expansions (final spec {current})"
    )

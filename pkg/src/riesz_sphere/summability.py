"""Riesz means and the maximal / square-function operators built on them.

The ``*_table`` functions act on a raw projection array ``Y`` of shape
(K+1, ...) whose row k holds Y_k(f, .) at any set of points; they serve both
grid decompositions and zonal coefficient tables. The remaining functions
wrap them for :class:`DegreeDecomposition` inputs.

Conventions: E_0^alpha f = Y_0 f; sup-type operators range over
n = 0..n_max (E_*) or n = 1..n_max (M); the square function sums
n = 1..n_max.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _accel
from .sphere import antipode, as_coords, spherical_distance
from .zonal import multiplier_matrix, riesz_kernel

log = logging.getLogger(__name__)

HL_RADII = 24


def _apply(W, Y):
    Y = np.asarray(Y, dtype=np.float64)
    K1 = Y.shape[0]
    flat = Y.reshape(K1, -1)
    return (W[:, :K1] @ flat).reshape((W.shape[0],) + Y.shape[1:])


def riesz_means_table(Y, N, alpha, n_max):
    """E_n^alpha for n = 0..n_max, shape (n_max+1,) + Y.shape[1:]."""
    K = Y.shape[0] - 1
    if n_max > K:
        raise ValueError(f"n_max={n_max} exceeds the decomposition degree K={K}")
    return _apply(multiplier_matrix(N, n_max, alpha, K), Y)


def maximal_table(Y, N, alpha, n_max):
    """(sup_n |E_n^alpha|, argmax n)."""
    E = np.abs(riesz_means_table(Y, N, alpha, n_max))
    return E.max(axis=0), E.argmax(axis=0)


def square_function_table(Y, N, alpha, n_max):
    """G^alpha = (sum_{n=1}^{n_max} (1/n) |E_n^{alpha+1} - E_n^alpha|^2)^{1/2}."""
    K = Y.shape[0] - 1
    D = multiplier_matrix(N, n_max, alpha + 1.0, K) - multiplier_matrix(N, n_max, alpha, K)
    diff = _apply(D[1:], Y)
    inv_n = (1.0 / np.arange(1, n_max + 1)).reshape((n_max,) + (1,) * (diff.ndim - 1))
    return np.sqrt(np.sum(inv_n * diff**2, axis=0))


def averaged_maximal_table(Y, N, alpha, n_max):
    """(sup_{1<=n<=n_max} ((1/n) sum_{k=1}^n |E_k^alpha|^2)^{1/2}, argmax n)."""
    E = riesz_means_table(Y, N, alpha, n_max)[1:]
    n = np.arange(1, n_max + 1).reshape((n_max,) + (1,) * (E.ndim - 1))
    rms = np.sqrt(np.cumsum(E**2, axis=0) / n)
    return rms.max(axis=0), rms.argmax(axis=0) + 1


@dataclass(frozen=True, eq=False)
class RieszMeanSeries:
    alpha: float
    values: np.ndarray  # (n_max+1, m)


@dataclass(frozen=True, eq=False)
class MaximalField:
    op: str
    values: np.ndarray
    argmax: Optional[np.ndarray] = None
    n_max: Optional[int] = None
    radii: Optional[np.ndarray] = None


def riesz_mean_series(dec, alpha, n_max):
    return RieszMeanSeries(alpha, riesz_means_table(dec.projections, dec.N, alpha, n_max))


def riesz_mean(dec, n, alpha, x):
    """E_n^alpha f at evaluation point ``x`` (an index into ``dec.points``)."""
    if n > dec.K:
        raise ValueError(f"n={n} exceeds the decomposition degree K={dec.K}")
    if alpha < 0:
        raise ValueError("Riesz order must be nonnegative")
    w = multiplier_matrix(dec.N, n, alpha, dec.K)[n]
    return float(w @ dec.projections[:, x])


def riesz_mean_kernel(f, n, alpha, x):
    """E_n^alpha f(x) as the quadrature of Theta^alpha(<x, y>, n) f(y)."""
    from .transform import _check_budget

    _check_budget(f.grid, n)
    t = np.clip(f.grid.nodes @ as_coords(x), -1.0, 1.0)
    theta = riesz_kernel(f.grid.dimension, n, alpha, t)
    return float(np.dot(theta * f.grid.weights, f.values))


def maximal_riesz(dec, alpha, n_max):
    if alpha < 0:
        raise ValueError("Riesz order must be nonnegative")
    vals, arg = maximal_table(dec.projections, dec.N, alpha, n_max)
    return MaximalField("E*", vals, arg, n_max)


def square_function_G(dec, alpha, n_max):
    if alpha <= -0.5:
        raise ValueError("G^alpha needs alpha > -1/2")
    return MaximalField("G", square_function_table(dec.projections, dec.N, alpha, n_max), None, n_max)


def averaged_maximal_M(dec, alpha, n_max):
    if alpha <= -0.5:
        raise ValueError("M^alpha needs alpha > -1/2")
    vals, arg = averaged_maximal_table(dec.projections, dec.N, alpha, n_max)
    return MaximalField("M", vals, arg, n_max)


def default_radii(grid, count=HL_RADII):
    """Geometric ladder from twice the grid spacing up to pi."""
    return np.geomspace(min(2.0 * grid.spacing, math.pi), math.pi, count)


def hardy_littlewood(f, radii=None, points=None):
    """sup over ``radii`` of the average of |f| over caps B(x, r).

    Averages use the discrete cap weight, so constants are reproduced
    exactly. Evaluated at ``points`` (default: every grid node); argmax holds
    the index of the maximizing radius.
    """
    grid = f.grid
    radii = default_radii(grid) if radii is None else np.asarray(radii, dtype=np.float64)
    if radii.size == 0:
        raise ValueError("radius set must be nonempty")
    if np.any(radii <= 0) or np.any(radii > math.pi):
        raise ValueError("radii must lie in (0, pi]")
    pts = grid.nodes if points is None else np.atleast_2d(as_coords(points))
    dist = spherical_distance(pts, grid.nodes)
    sv, sw = _accel.cap_sums(dist, np.abs(f.values), grid.weights, radii)
    empty = sw <= 0
    if np.any(empty):
        bad = np.unique(radii[np.any(empty, axis=0)])
        warnings.warn(
            f"{bad.size} radii gave caps with no grid node at some points and were skipped; "
            f"smallest radius {bad.min():.3g} vs grid spacing {grid.spacing:.3g}",
            RuntimeWarning,
            stacklevel=2,
        )
    with np.errstate(invalid="ignore", divide="ignore"):
        avg = np.where(empty, -np.inf, sv / np.where(empty, 1.0, sw))
    return MaximalField("f*", avg.max(axis=1), avg.argmax(axis=1), None, radii)


def hardy_littlewood_pair(f, points, radii=None):
    """f*(x) + f*(antipode(x)) at ``points``."""
    pts = np.atleast_2d(as_coords(points))
    both = hardy_littlewood(f, radii, np.vstack([pts, antipode(pts)])).values
    m = pts.shape[0]
    return both[:m] + both[m:]

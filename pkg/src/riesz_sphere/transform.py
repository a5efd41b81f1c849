"""Degree projections Y_k(f, .) of functions on S^N.

Two routes:

* kernel quadrature on a :class:`SphereGrid`, Y_k(f, x) = sum_j w_j Z_k(<x, y_j>) f(y_j),
  valid for any grid-sampled function;
* the Funk-Hecke transform for zonal functions f(y) = g(<y, pole>), whose
  projections are mu_k Z_k(<x, pole>) with a one-dimensional coefficient mu_k.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special

from . import _accel
from .errors import QuadratureBudgetError, QuadratureConvergenceError
from .sphere import SphereGrid, SpherePoint, _omega, as_coords, check_dim, cosines
from .zonal import gegenbauer_param, normalized_gegenbauer, zonal_scale


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).ravel()
        if v.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True, eq=False)
class DegreeDecomposition:
    """Rows k = 0..K hold Y_k(f, .) sampled at ``points``.

    ``node_index`` maps each evaluation point to its grid node when the points
    are grid nodes (the default: all of them).
    """

    N: int
    K: int
    grid: SphereGrid
    points: np.ndarray
    projections: np.ndarray
    node_index: Optional[np.ndarray] = None

    def reconstruct(self):
        return self.projections.sum(axis=0)

    def row_norms_sq(self):
        """Squared L2(grid) norms of the rows; needs all grid nodes."""
        if self.points.shape[0] != self.grid.size:
            raise ValueError("row norms need a decomposition over every grid node")
        return self.grid.integrate(self.projections**2)


def _check_budget(grid, K):
    if K > grid.degree_budget:
        raise QuadratureBudgetError(
            f"degree {K} exceeds the grid budget {grid.degree_budget} "
            f"(n_polar={grid.n_polar}); use n_polar >= {K + 1}"
        )


def project_many(grid, values, K, points=None, check=True):
    """Kernel-quadrature projections for a batch of functions.

    values: (F, M) samples on ``grid``; points: (m, N+1), default all nodes.
    Returns (F, K+1, m).
    """
    if check:
        _check_budget(grid, K)
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    pts = grid.nodes if points is None else np.atleast_2d(as_coords(points))
    cos = cosines(pts, grid.nodes)
    weighted = (values * grid.weights).T
    raw = _accel.kernel_project(cos, weighted, gegenbauer_param(grid.dimension), K)
    raw *= zonal_scale(grid.dimension, K)[:, None, None]
    return np.moveaxis(raw, 2, 0)


def project_degree(f, k, x):
    """Y_k(f, x) for a single degree and point."""
    _check_budget(f.grid, k)
    pts = np.atleast_2d(as_coords(x))
    cos = cosines(pts, f.grid.nodes)[0]
    zk = zonal_scale(f.grid.dimension, k)[k] * normalized_gegenbauer(f.grid.dimension, k, cos)[k]
    return float(np.dot(zk * f.grid.weights, f.values))


def decompose(f, K, points=None):
    """All projections Y_0..Y_K of ``f``.

    ``points`` may be None (every grid node), an integer index array of grid
    nodes, or an (m, N+1) coordinate array.
    """
    grid = f.grid
    node_index = None
    if points is None:
        node_index = np.arange(grid.size)
        pts = grid.nodes
    else:
        arr = np.asarray(points)
        if arr.ndim == 1 and np.issubdtype(arr.dtype, np.integer):
            node_index = arr
            pts = grid.nodes[arr]
        else:
            pts = np.atleast_2d(as_coords(points))
    rows = project_many(grid, f.values[None, :], K, pts)[0]
    return DegreeDecomposition(grid.dimension, K, grid, np.array(pts), rows, node_index)


def lp_norm(f, p):
    """(sum_j w_j |f_j|^p)^{1/p}; p = inf gives the max."""
    vals = np.abs(f.values)
    if p == math.inf:
        return float(vals.max())
    if p < 1:
        raise ValueError("p must be >= 1")
    return float(np.dot(f.grid.weights, vals**p) ** (1.0 / p))


# ---------------------------------------------------------------------------
# zonal functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ZonalProfile:
    """f(y) = g(<y, pole>) on S^N.

    For the singular family g(t) = (1 - t + eps)^{-s}, ``exponent`` = s and
    ``eps`` are kept so exact rules can be used.
    """

    N: int
    g: Callable
    pole: SpherePoint = None
    name: str = "custom"
    params: dict = field(default_factory=dict)
    exponent: Optional[float] = None
    eps: float = 0.0

    def __post_init__(self):
        check_dim(self.N)
        if self.pole is None:
            object.__setattr__(self, "pole", SpherePoint.pole(self.N))
        elif self.pole.dim != self.N:
            raise ValueError("pole lives on a different sphere")

    def __call__(self, t):
        return self.g(np.asarray(t, dtype=np.float64))

    @property
    def is_singular(self):
        return self.exponent is not None and self.exponent > 0 and self.eps == 0.0

    def in_lp(self, p):
        """L_p(S^N) membership: bounded profiles always, (1-t)^{-s} iff 2sp < N."""
        if not self.is_singular:
            return True
        return 2.0 * self.exponent * p < self.N

    def regularized(self, eps):
        if self.exponent is None:
            return self
        return singular_profile(self.exponent, eps, self.N, self.pole)

    def sample(self, grid, eps=None):
        """Grid samples; singular profiles get eps ~ (grid spacing)^2 / 2 unless given."""
        if grid.dimension != self.N:
            raise ValueError("grid and profile live on different spheres")
        prof = self
        if self.is_singular:
            prof = self.regularized(grid.spacing**2 / 2.0 if eps is None else eps)
        t = np.clip(grid.nodes @ self.pole.coords, -1.0, 1.0)
        return GridFunction(grid, prof(t))


def singular_profile(s, eps=0.0, N=2, pole=None):
    if s <= 0:
        raise ValueError("singular exponent must be positive")
    if eps < 0:
        raise ValueError("eps must be nonnegative")

    def g(t, s=s, eps=eps):
        return (1.0 - t + eps) ** (-s)

    return ZonalProfile(N, g, pole, "singular", {"s": s, "eps": eps}, exponent=s, eps=eps)


def constant_profile(c=1.0, N=2, pole=None):
    return ZonalProfile(N, lambda t: np.full_like(t, c, dtype=np.float64), pole, "constant", {"c": c})


def exp_profile(kappa=1.0, N=2, pole=None):
    return ZonalProfile(N, lambda t: np.exp(kappa * t), pole, "exp", {"kappa": kappa})


def gegenbauer_profile(m, N=2, pole=None):
    """g = P_m, the normalized Gegenbauer polynomial of degree m (a harmonic)."""
    lam = gegenbauer_param(N)
    return ZonalProfile(
        N, lambda t: _accel.gegenbauer_table(lam, m, t)[m], pole, "gegenbauer", {"m": m}
    )


def cap_profile(radius, N=2, pole=None):
    """Indicator of the cap of angular radius ``radius`` around the pole."""
    c = math.cos(radius)
    return ZonalProfile(N, lambda t: (t > c).astype(np.float64), pole, "cap", {"radius": radius})


PROFILES = {
    "singular": (singular_profile, ("s", "eps")),
    "constant": (constant_profile, ("c",)),
    "exp": (exp_profile, ("kappa",)),
    "gegenbauer": (gegenbauer_profile, ("m",)),
    "cap": (cap_profile, ("radius",)),
}


def parse_profile(spec, N):
    """Build a profile from ``name`` or ``name:key=value,key=value``."""
    name, _, rest = spec.partition(":")
    name = name.strip()
    if name not in PROFILES:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}")
    factory, keys = PROFILES[name]
    kwargs = {}
    for item in filter(None, (p.strip() for p in re.split(r"[,;]", rest))):
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in keys:
            raise ValueError(f"bad parameter {item!r} for profile {name!r} (keys: {keys})")
        kwargs[key] = int(val) if key == "m" else float(val)
    return factory(N=N, **kwargs)


@dataclass(frozen=True, eq=False)
class ZonalCoefficients:
    N: int
    K: int
    mu: np.ndarray

    def projections(self, t):
        """Y_k(f, x) = mu_k Z_k(t) at cosines t = <x, pole>, shape (K+1,) + t.shape."""
        t = np.asarray(t, dtype=np.float64)
        scale = (self.mu * zonal_scale(self.N, self.K)).reshape((self.K + 1,) + (1,) * t.ndim)
        return scale * normalized_gegenbauer(self.N, self.K, t)

    def evaluate(self, t):
        """The band-limited reconstruction sum_k mu_k Z_k(t)."""
        coef = self.mu * zonal_scale(self.N, self.K)
        return _accel.clenshaw(coef, gegenbauer_param(self.N), np.asarray(t, dtype=np.float64))

    def degree_norms(self):
        """||Y_k f||_2 = |mu_k| sqrt(Z_k(1))."""
        return np.abs(self.mu) * np.sqrt(zonal_scale(self.N, self.K))


def zonal_quadrature(N, n):
    """Nodes t and weights w with sum w h(t) = integral over S^N of h(<x, e>).

    Gauss-Jacobi for (1 - t^2)^{(N-2)/2} scaled by omega_{N-1}; exact for
    polynomial h of degree <= 2n - 1.
    """
    a = (N - 2) / 2.0
    if a == 0.0:
        t, w = special.roots_legendre(n)
    else:
        t, w = special.roots_jacobi(n, a, a)
    return t, w * _omega(N - 1)


def zonal_lp_norm(values, weights, p):
    vals = np.abs(values)
    if p == math.inf:
        return float(vals.max(axis=-1)) if vals.ndim == 1 else vals.max(axis=-1)
    return np.dot(vals**p, weights) ** (1.0 / p)


def _mu_singular_exact(z, K):
    N, s = z.N, z.exponent
    a = (N - 2) / 2.0 - s
    if a <= -1.0:
        raise ValueError(f"profile (1-t)^-{s} is not integrable on S^{N} (needs 2s < N)")
    t, w = special.roots_jacobi(K // 2 + 2, a, (N - 2) / 2.0)
    P = normalized_gegenbauer(N, K, t)
    return _omega(N - 1) * (P @ w)


def _graded_rule(level, K):
    # Composite Gauss-Legendre in theta, geometrically graded toward theta = 0.
    q = 12 + 8 * level
    sigma = 0.2
    theta0 = 0.5
    n_geo = 14 * (level + 1)
    n_uni = max(4, math.ceil((K + 8) / 6)) * (level + 1)
    inner = theta0 * sigma ** np.arange(n_geo, 0, -1)
    breaks = np.concatenate([[0.0], inner, np.linspace(theta0, math.pi, n_uni + 1)])
    x, w = special.roots_legendre(q)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    nodes = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    weights = (0.5 * (hi - lo) * w).ravel()
    return nodes, weights


def _mu_graded(z, K, tol, max_level):
    N = z.N
    prev = None
    change = math.inf
    for level in range(max_level + 1):
        th, w = _graded_rule(level, K)
        t = np.cos(th)
        base = w * np.sin(th) ** (N - 1) * _omega(N - 1)
        if z.exponent is not None:
            # 1 - cos(theta) loses everything near the pole; use 2 sin^2(theta/2).
            gv = (2.0 * np.sin(0.5 * th) ** 2 + z.eps) ** (-z.exponent)
        else:
            gv = z(t)
        P = normalized_gegenbauer(N, K, t)
        mu = P @ (gv * base)
        scale = max(float(np.dot(np.abs(gv), base)), np.finfo(float).tiny)
        if prev is not None:
            change = float(np.max(np.abs(mu - prev))) / scale
            if change <= tol:
                return mu
        prev = mu
    raise QuadratureConvergenceError(
        f"graded Funk-Hecke quadrature stalled at relative change {change:.3e} (tol {tol:.1e})",
        change,
    )


def funk_hecke_coefficients(z, K, method="auto", tol=1e-11, max_level=5):
    """mu_0..mu_K with Y_k(f, x) = mu_k Z_k(<x, pole>).

    mu_k = omega_{N-1} int_{-1}^{1} g(t) P_k(t) (1 - t^2)^{(N-2)/2} dt.
    ``method``: "jacobi" (exact, singular profiles with eps = 0 only),
    "graded", or "auto".
    """
    if method == "auto":
        method = "jacobi" if z.is_singular else "graded"
    if method == "jacobi":
        if not z.is_singular:
            raise ValueError("the exact Jacobi route needs an unregularized singular profile")
        mu = _mu_singular_exact(z, K)
    elif method == "graded":
        mu = _mu_graded(z, K, tol, max_level)
    else:
        raise ValueError(f"unknown method {method!r}")
    mu.setflags(write=False)
    return ZonalCoefficients(z.N, K, mu)


def funk_hecke_coefficient(z, k, **kwargs):
    return float(funk_hecke_coefficients(z, k, **kwargs).mu[k])

"""Degree-indexed spectral data on S^N.

Harmonic dimensions a_k, Laplace-Beltrami eigenvalues lambda_k = k(k+N-1),
Gegenbauer polynomials, zonal harmonics Z_k, Riesz multipliers
(1 - lambda_k / lambda_n)^alpha, the Riesz kernel and the Beta function.

Zonal harmonics are normalized through the addition theorem,

    Z_k(t) = (a_k / omega_N) * C_k^{(N-1)/2}(t) / C_k^{(N-1)/2}(1),

so that Y_k(f, x) = integral of Z_k(<x, y>) f(y) over the sphere.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import _accel
from .errors import UnsupportedDimensionError
from .sphere import check_dim, surface_area

K_LIMIT = 512


def gegenbauer_param(N):
    return (N - 1) / 2.0


def _check_degree(k):
    if int(k) != k or k < 0:
        raise ValueError(f"degree must be a nonnegative integer, got {k}")
    if k > K_LIMIT:
        raise UnsupportedDimensionError(f"degree {k} exceeds the supported maximum {K_LIMIT}")
    return int(k)


def harmonic_dimension(N, k):
    """dim H_k on S^N: C(N+k, N) - C(N+k-2, N), exact integer."""
    N = check_dim(N)
    k = _check_degree(k)
    if k == 0:
        return 1
    return math.comb(N + k, N) - math.comb(N + k - 2, N)


def eigenvalue(N, k):
    N = check_dim(N)
    k = _check_degree(k)
    return k * (k + N - 1)


@dataclass(frozen=True, eq=False)
class DegreeTable:
    N: int
    K_max: int
    a: np.ndarray  # int64
    lam: np.ndarray  # float64

    @property
    def omega(self):
        return surface_area(self.N)


def degree_table(N, K_max):
    N = check_dim(N)
    K_max = _check_degree(K_max)
    a = np.array([harmonic_dimension(N, k) for k in range(K_max + 1)], dtype=np.int64)
    ks = np.arange(K_max + 1)
    lam = (ks * (ks + N - 1)).astype(np.float64)
    a.setflags(write=False)
    lam.setflags(write=False)
    return DegreeTable(N, K_max, a, lam)


def gegenbauer_eval(lambda_param, K, t):
    """C_0^lam(t), ..., C_K^lam(t) by the standard three-term recurrence.

    ``t`` may be a scalar or an array; the result has shape (K+1,) + t.shape.
    """
    if lambda_param <= 0:
        raise ValueError("Gegenbauer parameter must be positive")
    t = np.asarray(t, dtype=np.float64)
    if np.any(np.abs(t) > 1.0):
        raise ValueError("t must lie in [-1, 1]")
    out = np.empty((K + 1,) + t.shape)
    out[0] = 1.0
    if K >= 1:
        out[1] = 2.0 * lambda_param * t
    for k in range(2, K + 1):
        out[k] = (
            2.0 * (k + lambda_param - 1.0) * t * out[k - 1]
            - (k + 2.0 * lambda_param - 2.0) * out[k - 2]
        ) / k
    return out


def normalized_gegenbauer(N, K, t):
    """P_k(t) = C_k(t) / C_k(1) for k <= K, shape (K+1,) + t.shape."""
    return _accel.gegenbauer_table(gegenbauer_param(N), K, t)


def zonal_scale(N, K):
    """a_k / omega_N for k = 0..K, i.e. Z_k(1)."""
    table = degree_table(N, K)
    return table.a.astype(np.float64) / table.omega


def zonal_table(N, K, t):
    """Z_k(t) for k = 0..K, shape (K+1,) + t.shape."""
    t = np.asarray(t, dtype=np.float64)
    scale = zonal_scale(N, K).reshape((K + 1,) + (1,) * t.ndim)
    return scale * normalized_gegenbauer(N, K, t)


@dataclass(frozen=True, eq=False)
class ZonalKernelValue:
    t: float
    values: np.ndarray


def zonal_harmonic(N, K, t):
    N = check_dim(N)
    K = _check_degree(K)
    if not -1.0 <= t <= 1.0:
        raise ValueError("t must lie in [-1, 1]")
    return ZonalKernelValue(float(t), zonal_table(N, K, np.array(t)))


def multiplier_matrix(N, n_max, alpha, K=None):
    """Riesz multipliers as a matrix W[n, k] = w_k(n, alpha), shape (n_max+1, K+1).

    Row 0 selects degree 0 only. For n >= 1 the entries are
    (1 - lambda_k/lambda_n)^alpha for k < n. The k = n entry is 1 when
    alpha == 0 (genuine partial sum) and 0 otherwise; for negative alpha
    (allowed down to -1/2 for the square-function machinery) that amounts to
    summing over lambda_k < lambda_n only. Columns past n are zero.
    """
    K = n_max if K is None else K
    if alpha <= -0.5:
        raise ValueError("alpha must exceed -1/2")
    ks = np.arange(K + 1, dtype=np.float64)
    lam_k = ks * (ks + N - 1)
    W = np.zeros((n_max + 1, K + 1))
    W[0, 0] = 1.0
    for n in range(1, n_max + 1):
        lam_n = n * (n + N - 1.0)
        m = min(n, K + 1)
        base = 1.0 - lam_k[:m] / lam_n
        W[n, :m] = base**alpha if alpha != 0 else 1.0
        if n <= K:
            W[n, n] = 1.0 if alpha == 0 else 0.0
    return W


@dataclass(frozen=True, eq=False)
class RieszWeights:
    N: int
    n: int
    alpha: float
    w: np.ndarray


def riesz_weights(N, n, alpha):
    N = check_dim(N)
    if n < 1:
        raise ValueError("riesz_weights needs n >= 1; the n = 0 mean is Y_0")
    _check_degree(n)
    if alpha < 0:
        raise ValueError(f"Riesz order must be nonnegative, got {alpha}")
    w = multiplier_matrix(N, n, alpha)[n].copy()
    w.setflags(write=False)
    return RieszWeights(N, n, float(alpha), w)


def riesz_kernel(N, n, alpha, t):
    """Theta^alpha(t, n) = sum_{k<=n} w_k Z_k(t), by Clenshaw summation.

    ``t`` may be a scalar or an array.
    """
    N = check_dim(N)
    if n == 0:
        coef = np.array([1.0])
    else:
        coef = riesz_weights(N, n, alpha).w
    coef = coef * zonal_scale(N, coef.size - 1)
    t_arr = np.asarray(t, dtype=np.float64)
    out = _accel.clenshaw(coef, gegenbauer_param(N), t_arr)
    return float(out) if t_arr.ndim == 0 else out


def beta_function(x, y):
    """B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y) via log-Gamma."""
    if x <= 0 or y <= 0:
        raise ValueError(f"Beta function arguments must be positive, got ({x}, {y})")
    return math.exp(special.gammaln(x) + special.gammaln(y) - special.gammaln(x + y))


def weight_difference_sum(N, n, beta):
    """n * sum_{k<n} |w_k - w_{k+1}|^2 for Riesz weights of order beta."""
    w = multiplier_matrix(N, n, beta)[n]
    return n * float(np.sum(np.diff(w) ** 2))


def square_multiplier(N, k, alpha, n_max):
    """Sum_{n=1}^{n_max} (1/n) (w_k(n, alpha+1) - w_k(n, alpha))^2.

    ||G^alpha f||_2^2 = sum_k square_multiplier(k) ||Y_k f||_2^2.
    """
    W0 = multiplier_matrix(N, n_max, alpha, K=k)[:, k]
    W1 = multiplier_matrix(N, n_max, alpha + 1.0, K=k)[:, k]
    n = np.arange(1, n_max + 1)
    return float(np.sum((W1[1:] - W0[1:]) ** 2 / n))

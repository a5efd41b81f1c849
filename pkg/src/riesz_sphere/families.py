"""Seeded random test functions.

Band-limited functions are built from zonal harmonics at random poles, so
their exact degree components are known in closed form:

    f = sum_{k<=K} sum_i c_{k,i} Z_k(<x, p_i>) / sqrt(n_poles * Z_k(1)),
    c_{k,i} ~ N(0, (1+k)^{-2}),

which gives E ||Y_k f||_2^2 = (1+k)^{-2}.
"""

from dataclasses import dataclass

import numpy as np

from . import _accel
from .sphere import as_coords, check_dim, uniform_coords
from .transform import ZonalCoefficients, funk_hecke_coefficients, singular_profile
from .zonal import gegenbauer_param, normalized_gegenbauer, zonal_scale

DEFAULT_POLES = 24


@dataclass(frozen=True, eq=False)
class BandLimitedFunction:
    N: int
    K: int
    poles: np.ndarray  # (n_poles, N+1)
    coef: np.ndarray  # (K+1, n_poles), multiplies P_k(<x, p_i>)

    def evaluate(self, points):
        pts = np.atleast_2d(as_coords(points))
        lam = gegenbauer_param(self.N)
        cos = np.clip(pts @ self.poles.T, -1.0, 1.0)
        out = np.zeros(pts.shape[0])
        for i in range(self.poles.shape[0]):
            out += _accel.clenshaw(self.coef[:, i], lam, cos[:, i])
        return out

    def components(self, points):
        """Exact Y_k(f, .) at ``points``, shape (K+1, m)."""
        pts = np.atleast_2d(as_coords(points))
        cos = np.clip(pts @ self.poles.T, -1.0, 1.0)
        P = normalized_gegenbauer(self.N, self.K, cos)  # (K+1, m, n_poles)
        return np.einsum("kmi,ki->km", P, self.coef)


def random_bandlimited(N, K, seed, n_poles=DEFAULT_POLES, decay=1.0, degrees=None):
    """Random band-limited function with (1+k)^{-decay} spectral scaling.

    ``degrees`` restricts the support to a subset of 0..K.
    """
    N = check_dim(N)
    rng = np.random.default_rng(seed)
    poles = uniform_coords(N, n_poles, int(rng.integers(2**63)))
    ks = np.arange(K + 1)
    c = rng.standard_normal((K + 1, n_poles)) * ((1.0 + ks) ** -decay)[:, None]
    zk1 = zonal_scale(N, K)
    coef = c * (zk1 / np.sqrt(n_poles * zk1))[:, None]  # Z_k = zk1 * P_k
    if degrees is not None:
        mask = np.zeros(K + 1, dtype=bool)
        mask[list(degrees)] = True
        coef[~mask] = 0.0
    return BandLimitedFunction(N, K, poles, coef)


def random_zonal(N, K, seed, decay=1.0):
    """Random zonal band-limited function with ||Y_k f||_2 ~ N(0, (1+k)^{-2 decay})."""
    rng = np.random.default_rng(seed)
    ks = np.arange(K + 1)
    b = rng.standard_normal(K + 1) * (1.0 + ks) ** -decay
    return ZonalCoefficients(N, K, b / np.sqrt(zonal_scale(N, K)))


def singular_exponent_for(N, p, margin=0.02):
    """Exponent s just inside L_p: 2 s p < N with s = N/(2p) - margin."""
    return N / (2.0 * p) - margin


def zonal_family(N, K, seed, family="mixed", p=2.0):
    """One member of the zonal test family used for operator-norm estimates.

    ``bandlimited``: :func:`random_zonal`; ``singular``: truncated
    (1-t)^{-s} with s just inside L_p; ``mixed``: a random combination.
    """
    rng = np.random.default_rng(seed)
    if family == "bandlimited":
        return random_zonal(N, K, rng.integers(2**63))
    sing = funk_hecke_coefficients(singular_profile(singular_exponent_for(N, p), 0.0, N), K)
    mu_s = sing.mu / np.linalg.norm(sing.degree_norms())
    if family == "singular":
        return ZonalCoefficients(N, K, mu_s)
    if family != "mixed":
        raise ValueError(f"unknown family {family!r}")
    smooth = random_zonal(N, K, rng.integers(2**63))
    mu_b = smooth.mu / max(np.linalg.norm(smooth.degree_norms()), 1e-300)
    a, b = rng.standard_normal(2)
    return ZonalCoefficients(N, K, a * mu_b + b * mu_s)

"""Hot loops, each with a numba path and a pure-numpy path.

The numba path is used when numba imports and ``RIESZ_SPHERE_JIT`` is not
set to ``0``. ``RIESZ_SPHERE_THREADS`` caps numba's worker count (0 = auto).
Both paths are always importable as ``<name>_numpy`` / ``<name>_numba`` so
tests and the benchmark can compare them; the bare names dispatch.

All kernels work with the *normalized* Gegenbauer polynomials
P_k = C_k^lam / C_k^lam(1), which satisfy |P_k| <= 1 on [-1, 1] and obey

    (k + 2 lam - 1) P_k = 2 (k + lam - 1) t P_{k-1} - (k - 1) P_{k-2}.
"""

import os

import numpy as np

_FALSY = {"0", "false", "no", "off"}

JIT_REQUESTED = os.environ.get("RIESZ_SPHERE_JIT", "1").strip().lower() not in _FALSY

try:
    import numba
    from numba import njit, prange

    if "NUMBA_THREADING_LAYER" not in os.environ:
        # The bundled TBB is often too old; skip it instead of warning.
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency here
    HAVE_NUMBA = False

USE_JIT = JIT_REQUESTED and HAVE_NUMBA


def thread_cap():
    """Worker cap from ``RIESZ_SPHERE_THREADS``; 0 means no cap."""
    raw = os.environ.get("RIESZ_SPHERE_THREADS", "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"RIESZ_SPHERE_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise ValueError("RIESZ_SPHERE_THREADS must be >= 0")
    return value


def apply_thread_cap():
    if not HAVE_NUMBA:
        return
    cap = thread_cap()
    if cap > 0:
        numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def recurrence_coefficients(lam, K):
    """A_k, B_k with P_k = A_k t P_{k-1} - B_k P_{k-2} (entries 0, 1 unused)."""
    k = np.arange(K + 1, dtype=np.float64)
    den = k + 2.0 * lam - 1.0
    den[0] = 1.0
    A = 2.0 * (k + lam - 1.0) / den
    B = (k - 1.0) / den
    return A, B


def gegenbauer_table_numpy(lam, K, t):
    t = np.asarray(t, dtype=np.float64)
    A, B = recurrence_coefficients(lam, K)
    out = np.empty((K + 1,) + t.shape)
    out[0] = 1.0
    if K >= 1:
        out[1] = t
    for k in range(2, K + 1):
        out[k] = A[k] * t * out[k - 1] - B[k] * out[k - 2]
    return out


def clenshaw_numpy(coef, lam, t):
    coef = np.asarray(coef, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    K = coef.shape[0] - 1
    A, B = recurrence_coefficients(lam, K + 2)
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for k in range(K, -1, -1):
        b0 = coef[k] + A[k + 1] * t * b1 - B[k + 2] * b2
        b2 = b1
        b1 = b0
    return b1


def kernel_project_numpy(cosines, weighted, lam, K, chunk=256):
    """Sum_j P_k(cosines[i, j]) * weighted[j, f] for k = 0..K.

    cosines: (n_eval, M); weighted: (M, F). Returns (K + 1, n_eval, F).
    """
    cosines = np.asarray(cosines, dtype=np.float64)
    weighted = np.asarray(weighted, dtype=np.float64)
    n_eval = cosines.shape[0]
    A, B = recurrence_coefficients(lam, K)
    out = np.empty((K + 1, n_eval, weighted.shape[1]))
    for lo in range(0, n_eval, chunk):
        c = cosines[lo : lo + chunk]
        p_prev = np.ones_like(c)
        out[0, lo : lo + chunk] = p_prev @ weighted
        if K == 0:
            continue
        p_cur = c.copy()
        out[1, lo : lo + chunk] = p_cur @ weighted
        for k in range(2, K + 1):
            p_next = A[k] * c * p_cur
            p_next -= B[k] * p_prev
            out[k, lo : lo + chunk] = p_next @ weighted
            p_prev, p_cur = p_cur, p_next
    return out


def cap_sums_numpy(dist, values, weights, radii):
    """Weighted sums of ``values`` and of ``weights`` over caps dist < r.

    dist: (n_eval, M). Radii >= pi take the whole sphere. Returns two
    (n_eval, R) arrays.
    """
    dist = np.asarray(dist, dtype=np.float64)
    radii = np.asarray(radii, dtype=np.float64)
    order = np.argsort(dist, axis=1, kind="stable")
    d_sorted = np.take_along_axis(dist, order, axis=1)
    cum_v = np.cumsum(values[order] * weights[order], axis=1)
    cum_w = np.cumsum(weights[order], axis=1)
    n_eval, M = dist.shape
    sv = np.zeros((n_eval, radii.size))
    sw = np.zeros((n_eval, radii.size))
    for i in range(n_eval):
        counts = np.searchsorted(d_sorted[i], radii, side="left")
        counts[radii >= np.pi] = M
        hit = counts > 0
        sv[i, hit] = cum_v[i, counts[hit] - 1]
        sw[i, hit] = cum_w[i, counts[hit] - 1]
    return sv, sw


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _gegenbauer_table_nb(A, B, K, t):
        M = t.shape[0]
        out = np.empty((K + 1, M))
        for j in range(M):
            out[0, j] = 1.0
        if K >= 1:
            for j in range(M):
                out[1, j] = t[j]
        for k in range(2, K + 1):
            a = A[k]
            b = B[k]
            for j in range(M):
                out[k, j] = a * t[j] * out[k - 1, j] - b * out[k - 2, j]
        return out

    @njit(cache=True)
    def _clenshaw_nb(coef, A, B, t):
        K = coef.shape[0] - 1
        M = t.shape[0]
        b1 = np.zeros(M)
        b2 = np.zeros(M)
        for k in range(K, -1, -1):
            a = A[k + 1]
            b = B[k + 2]
            c = coef[k]
            for j in range(M):
                b0 = c + a * t[j] * b1[j] - b * b2[j]
                b2[j] = b1[j]
                b1[j] = b0
        return b1

    @njit(cache=True, parallel=True)
    def _kernel_project_nb(cosines, weighted, A, B, K):
        n_eval, M = cosines.shape
        F = weighted.shape[1]
        out = np.zeros((K + 1, n_eval, F))
        for i in prange(n_eval):
            acc = np.zeros((K + 1, F))
            for j in range(M):
                c = cosines[i, j]
                for f in range(F):
                    acc[0, f] += weighted[j, f]
                if K >= 1:
                    p_prev = 1.0
                    p_cur = c
                    for f in range(F):
                        acc[1, f] += c * weighted[j, f]
                    for k in range(2, K + 1):
                        p_next = A[k] * c * p_cur - B[k] * p_prev
                        for f in range(F):
                            acc[k, f] += p_next * weighted[j, f]
                        p_prev = p_cur
                        p_cur = p_next
            for k in range(K + 1):
                for f in range(F):
                    out[k, i, f] = acc[k, f]
        return out

    @njit(cache=True, parallel=True)
    def _cap_sums_nb(dist, values, weights, radii):
        n_eval, M = dist.shape
        R = radii.shape[0]
        sv = np.zeros((n_eval, R))
        sw = np.zeros((n_eval, R))
        for i in prange(n_eval):
            order = np.argsort(dist[i], kind="mergesort")
            d = dist[i][order]
            cv = np.cumsum(values[order] * weights[order])
            cw = np.cumsum(weights[order])
            for r in range(R):
                if radii[r] >= np.pi:
                    count = M
                else:
                    count = np.searchsorted(d, radii[r])
                if count > 0:
                    sv[i, r] = cv[count - 1]
                    sw[i, r] = cw[count - 1]
        return sv, sw


def _contig(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def gegenbauer_table_numba(lam, K, t):
    t = np.asarray(t, dtype=np.float64)
    A, B = recurrence_coefficients(lam, K)
    out = _gegenbauer_table_nb(A, B, int(K), _contig(t.ravel()))
    return out.reshape((K + 1,) + t.shape)


def clenshaw_numba(coef, lam, t):
    t = np.asarray(t, dtype=np.float64)
    coef = _contig(coef)
    A, B = recurrence_coefficients(lam, coef.shape[0] + 1)
    out = _clenshaw_nb(coef, A, B, _contig(t.ravel()))
    return out.reshape(t.shape)


def kernel_project_numba(cosines, weighted, lam, K):
    A, B = recurrence_coefficients(lam, K)
    return _kernel_project_nb(_contig(cosines), _contig(weighted), A, B, int(K))


def cap_sums_numba(dist, values, weights, radii):
    return _cap_sums_nb(_contig(dist), _contig(values), _contig(weights), _contig(radii))


# Batch width above which the BLAS path overtakes the fused loop (see benchmarks/).
KERNEL_PROJECT_NUMBA_MAX_F = 8

if USE_JIT:
    apply_thread_cap()
    gegenbauer_table = gegenbauer_table_numba
    clenshaw = clenshaw_numba
    cap_sums = cap_sums_numba

    def kernel_project(cosines, weighted, lam, K):
        # BLAS wins once several functions share the pass over the kernel.
        if np.shape(weighted)[1] > KERNEL_PROJECT_NUMBA_MAX_F:
            return kernel_project_numpy(cosines, weighted, lam, K)
        return kernel_project_numba(cosines, weighted, lam, K)

else:
    gegenbauer_table = gegenbauer_table_numpy
    clenshaw = clenshaw_numpy
    kernel_project = kernel_project_numpy
    cap_sums = cap_sums_numpy

BACKEND = "numba" if USE_JIT else "numpy"

"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--out bench.csv]

Each row reports the best-of-``repeat`` wall time for one kernel and size,
plus the max abs difference between the two backends. Compilation happens
in a warm-up call and is not timed.
"""

import argparse
import csv
import sys
import time

import numpy as np

from riesz_sphere import _accel
from riesz_sphere.sphere import build_grid, spherical_distance
from riesz_sphere.summability import default_radii


def best_of(fn, repeat):
    fn()
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    rng = np.random.default_rng(0)
    for K in (64, 256):
        t = rng.uniform(-1, 1, 20000)
        yield "gegenbauer_table", f"K={K},m=20000", (0.5, K, t)
        yield "clenshaw", f"K={K},m=20000", (rng.standard_normal(K + 1), 0.5, t)
    for n_polar, F in ((17, 1), (33, 1), (33, 8), (33, 32), (65, 4)):
        g = build_grid(2, n_polar)
        cos = np.clip(g.nodes @ g.nodes.T, -1, 1)
        w = g.weights[:, None] * rng.standard_normal((g.size, F))
        yield "kernel_project", f"M={g.size},K={n_polar - 1},F={F}", (cos, w, 0.5, n_polar - 1)
    for n_polar in (33, 65):
        g = build_grid(2, n_polar)
        d = spherical_distance(g.nodes, g.nodes)
        v = np.abs(rng.standard_normal(g.size))
        yield "cap_sums", f"M={g.size},R=24", (d, v, g.weights, default_radii(g))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        print("numba is not importable; nothing to compare", file=sys.stderr)
        return 1

    rows = []
    for name, size, call_args in cases():
        f_np = getattr(_accel, f"{name}_numpy")
        f_nb = getattr(_accel, f"{name}_numba")
        t_np, r_np = best_of(lambda: f_np(*call_args), args.repeat)
        t_nb, r_nb = best_of(lambda: f_nb(*call_args), args.repeat)
        if isinstance(r_np, tuple):
            diff = max(float(np.max(np.abs(a - b))) for a, b in zip(r_np, r_nb))
        else:
            diff = float(np.max(np.abs(r_np - r_nb)))
        rows.append([name, size, f"{t_np:.6g}", f"{t_nb:.6g}", f"{t_np / t_nb:.3g}", f"{diff:.3g}"])

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["# threads", _accel.numba.get_num_threads()])
    w.writerow(["kernel", "size", "numpy_s", "numba_s", "speedup", "max_abs_diff"])
    w.writerows(rows)
    if fh is not sys.stdout:
        fh.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())

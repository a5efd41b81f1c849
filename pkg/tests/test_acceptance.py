"""Acceptance suite: one test per numbered criterion, each printing a
pass/fail line (collected again in the terminal summary).

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import time

import numpy as np
from scipy import integrate

from riesz_sphere.errors import InequalityViolation
from riesz_sphere.experiments import (
    ExperimentConfig,
    audit_inequalities,
    cond_line,
    operator_norm_trials,
    threshold_map,
)
from riesz_sphere.families import random_bandlimited
from riesz_sphere.sphere import SpherePoint, grid_for_degree, surface_area, uniform_coords
from riesz_sphere.summability import riesz_mean_kernel, riesz_means_table
from riesz_sphere.transform import GridFunction, decompose, project_many
from riesz_sphere.zonal import beta_function, riesz_kernel, zonal_table

SEED = 20240601


def test_criterion_1_quadrature_orthogonality(acceptance):
    t0 = time.perf_counter()
    N, K = 2, 64
    grid = grid_for_degree(N, K)
    weight_err = abs(grid.weights.sum() / surface_area(N) - 1.0)

    pole = SpherePoint.pole(N).coords
    Z = zonal_table(N, K, np.clip(grid.nodes @ pole, -1, 1))
    integrals = Z @ grid.weights
    delta = np.zeros(K + 1)
    delta[0] = 1.0
    orth_err = float(np.max(np.abs(integrals - delta)))

    xy = uniform_coords(N, 6, SEED)
    repro_err = 0.0
    for x, y in zip(xy[:3], xy[3:]):
        Zx = zonal_table(N, K, np.clip(grid.nodes @ x, -1, 1))
        Zy = zonal_table(N, K, np.clip(grid.nodes @ y, -1, 1))
        lhs = (Zx * Zy) @ grid.weights
        rhs = zonal_table(N, K, np.array(np.clip(x @ y, -1, 1)))
        repro_err = max(repro_err, float(np.max(np.abs(lhs - rhs))))
    elapsed = time.perf_counter() - t0

    ok = weight_err <= 1e-10 and orth_err <= 1e-9 and repro_err <= 1e-8 and elapsed < 30
    acceptance(1, ok, f"weight rel err {weight_err:.2e}, orthogonality {orth_err:.2e}, "
                      f"reproducing {repro_err:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_2_parseval(acceptance):
    N, K = 2, 32
    grid = grid_for_degree(N, K)
    rng = np.random.default_rng(SEED)
    fns = [random_bandlimited(N, K, int(rng.integers(2**63))) for _ in range(100)]
    values = np.array([f.evaluate(grid.nodes) for f in fns])
    Y = project_many(grid, values, K)  # (F, K+1, M)
    total = grid.integrate(Y**2).sum(axis=1)
    norm2 = grid.integrate(values**2)
    worst = float(np.max(np.abs(total - norm2) / norm2))
    ok = worst <= 1e-8
    acceptance(2, ok, f"max relative Parseval defect {worst:.2e} over 100 functions")
    assert ok


def test_criterion_3_route_equivalence(acceptance):
    N, K = 2, 32
    grid = grid_for_degree(N, K)
    rng = np.random.default_rng(SEED + 3)
    points = uniform_coords(N, 4, SEED + 3)
    worst = 0.0
    for _ in range(20):
        fn = random_bandlimited(N, K, int(rng.integers(2**63)))
        f = GridFunction(grid, fn.evaluate(grid.nodes))
        norm = math.sqrt(grid.integrate(f.values**2))
        dec = decompose(f, K, points)
        for alpha in (0.0, 0.5, 1.0):
            E = riesz_means_table(dec.projections, N, alpha, K)
            for n in range(K + 1):
                for i, x in enumerate(points):
                    dev = abs(riesz_mean_kernel(f, n, alpha, x) - E[n, i]) / norm
                    worst = max(worst, dev)
    ok = worst <= 1e-8
    acceptance(3, ok, f"max |kernel - multiplier| / ||f||_2 = {worst:.2e}")
    assert ok


def test_criterion_4_kernel_mass(acceptance):
    worst = 0.0
    for N in (2, 3):
        grid = grid_for_degree(N, 64)
        t = np.clip(grid.nodes @ SpherePoint.pole(N).coords, -1, 1)
        for n in (1, 4, 16, 64):
            for alpha in (0.0, 0.5, (N - 1) / 2.0, 2.0):
                mass = float(riesz_kernel(N, n, alpha, t) @ grid.weights)
                worst = max(worst, abs(mass - 1.0))
    ok = worst <= 1e-9
    acceptance(4, ok, f"max |mass - 1| = {worst:.2e}")
    assert ok


def _audit(cfg, alphas):
    try:
        return audit_inequalities(cfg, alphas=alphas, n_points=200), None
    except InequalityViolation as exc:
        return exc.report, exc.witness


def test_criterion_5_m_chain(acceptance):
    cfg = ExperimentConfig(n_max=32, degree_max=64, trials=50, seed=SEED)
    report, witness = _audit(cfg, (-0.25, 0.0, 0.5))
    chain = [a for a in report.audits if a["name"].startswith("M-chain")]
    violations = [a for a in chain if not a["passed"]]
    margin = min(a["worst_margin"] for a in chain)
    ok = len(chain) == 9 and not violations and witness is None
    acceptance(5, ok, f"{len(violations)} violations in {len(chain)} (alpha, m) checks, "
                      f"worst margin {margin:.2e}")
    assert ok, witness


def test_criterion_6_l1_shape(acceptance):
    # n_max = 23 puts the coarse grid at 24 polar nodes; the refinement has 48.
    cfg = ExperimentConfig(n_max=23, degree_max=46, trials=50, seed=SEED)
    report, witness = _audit(cfg, (1.0,))
    (shape,) = [a for a in report.audits if a["name"].startswith("L1 shape")]
    ok = (
        witness is None
        and (shape["n_polar"], shape["n_polar_refined"]) == (24, 48)
        and math.isfinite(shape["empirical"])
        and math.isfinite(shape["empirical_refined"])
        and shape["relative_change"] < 0.10
    )
    acceptance(6, ok, f"ratio {shape['empirical']:.4f} -> {shape['empirical_refined']:.4f} "
                      f"({100 * shape['relative_change']:.2f}% change)")
    assert ok


def test_criterion_7_t2_stability(acceptance):
    parts, ok = [], True
    for alpha in (0.25, 0.5, 1.0):
        base = operator_norm_trials("maximal", 2.0, alpha, 50, SEED, n_max=128).max()
        doubled = operator_norm_trials("maximal", 2.0, alpha, 50, SEED, n_max=256, degree=128).max()
        growth = doubled / base - 1.0
        ok &= bool(np.isfinite(base)) and growth < 0.05
        parts.append(f"alpha={alpha:g}: {base:.4f}->{doubled:.4f} ({100 * growth:+.2f}%)")
    single = max(operator_norm_trials("riesz", 2.0, a, 50, SEED, n_max=128).max()
                 for a in (0.0, 0.25, 0.5, 1.0))
    ok &= single <= 1.0 + 1e-8
    acceptance(7, ok, "; ".join(parts) + f"; single mean {single:.12f}")
    assert ok


def test_criterion_8_g_bound(acceptance):
    parts, ok = [], True
    for alpha in (0.0, 0.5):
        bound = 3.0 * math.sqrt(0.5 * beta_function(2 * alpha + 1, 2.5))
        base = operator_norm_trials("gsq", 2.0, alpha, 50, SEED, n_max=128).max()
        doubled = operator_norm_trials("gsq", 2.0, alpha, 50, SEED, n_max=256, degree=128).max()
        change = abs(doubled / base - 1.0)
        ok &= base <= bound and doubled <= bound and change < 0.05
        parts.append(f"alpha={alpha:g}: {base:.4f}/{doubled:.4f} <= {bound:.4f} ({100 * change:.2f}%)")
    acceptance(8, ok, "; ".join(parts))
    assert ok


def test_criterion_9_threshold_trend(acceptance):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(degree_max=256, p_grid=(1.25, 1.5, 2.0))
    report = threshold_map(cfg)
    elapsed = time.perf_counter() - t0
    rows = report.summary["per_p"]
    mins = [r["min_alpha_converging"] for r in rows]
    N = cfg.dimension
    found = all(m is not None for m in mins)
    ok = (
        found
        and all(a >= b for a, b in zip(mins, mins[1:]))
        and all(m > cond_line(N, r["p"]) - 0.15 for m, r in zip(mins, rows))
        and report.summary["monotone_in_alpha"]
        and elapsed < 600
    )
    desc = ", ".join(f"p={r['p']:g}: {m} (line {cond_line(N, r['p']):.3f})" for m, r in zip(mins, rows))
    acceptance(9, ok, f"min converging alpha {desc}; {elapsed:.1f}s")
    assert ok


def test_criterion_10_beta(acceptance):
    rng = np.random.default_rng(SEED + 10)
    xy = 0.5 + 3.5 * (1.0 - rng.random((20, 2)))  # (0.5, 4]
    worst = 0.0
    for x, y in xy:
        oracle, _ = integrate.quad(lambda t: 1.0, 0.0, 1.0, weight="alg", wvar=(x - 1.0, y - 1.0),
                                   epsabs=1e-15, epsrel=1e-13, limit=200)
        worst = max(worst, abs(beta_function(x, y) - oracle))
    ok = worst <= 1e-10
    acceptance(10, ok, f"max |B - quad| = {worst:.2e} at 20 points")
    assert ok

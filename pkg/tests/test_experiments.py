import json
import math

import numpy as np
import pytest

from riesz_sphere.errors import InequalityViolation
from riesz_sphere.experiments import (
    CONVERGING,
    DIVERGING,
    STALLING,
    ExperimentConfig,
    audit_inequalities,
    block_edges,
    classify_slope,
    combine_classes,
    cond2_line,
    cond_line,
    convergence_experiment,
    error_slope,
    load_config,
    monotone_in_alpha,
    operator_norm_estimate,
    run_experiment,
    threshold_map,
)
from riesz_sphere.families import singular_exponent_for
from riesz_sphere.transform import gegenbauer_profile, singular_profile
from riesz_sphere.zonal import eigenvalue

SMALL = dict(n_max=8, degree_max=16, trials=3, seed=1, alpha_grid=(0.5, 1.0), p_grid=(1.5, 2.0))


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(p_grid=(2.5,))
    with pytest.raises(ValueError):
        ExperimentConfig(alpha_grid=(-0.1,))
    with pytest.raises(ValueError):
        ExperimentConfig(n_max=200, degree_max=256)
    with pytest.raises(ValueError):
        ExperimentConfig(family="weird")


def test_load_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# comment\ndimension = 3\ndegree_max = 40\nn_max = 20\n"
        "alpha_grid = 0.5, 1.0 1.5\np_grid = 2\nfamily = bandlimited\n"
        "trials = 4\nseed = 9\nout_dir = out  # trailing\n"
    )
    cfg = load_config(path)
    assert cfg.dimension == 3 and cfg.alpha_grid == (0.5, 1.0, 1.5) and cfg.out_dir == "out"
    path.write_text("colour = blue\n")
    with pytest.raises(ValueError, match="unknown key"):
        load_config(path)
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "missing.cfg")


def test_audit_small_passes():
    report = audit_inequalities(ExperimentConfig(**SMALL), alphas=(-0.25, 0.0, 1.0), n_points=50)
    assert report.passed
    names = {a["name"] for a in report.audits}
    assert "M-chain m=3 alpha=-0.25" in names and "L1 shape alpha=1" in names
    for a in report.audits:
        if a["kind"] == "reported" and "empirical" in a:
            assert math.isfinite(a["empirical"])


def test_audit_violation_raises(monkeypatch):
    import riesz_sphere.experiments as ex

    real = ex.averaged_maximal_table

    def inflated(Y, N, alpha, n_max):
        vals, arg = real(Y, N, alpha, n_max)
        return vals * (2.0 if alpha == 0.5 else 1.0), arg

    monkeypatch.setattr(ex, "averaged_maximal_table", inflated)
    with pytest.raises(InequalityViolation) as info:
        audit_inequalities(ExperimentConfig(**SMALL), alphas=(0.5,), n_points=20)
    assert info.value.witness["alpha"] == 0.5
    assert not info.value.report.passed


def test_l1_constant_grows_toward_critical_index():
    cfg = ExperimentConfig(n_max=23, degree_max=46, trials=20, seed=1)
    report = audit_inequalities(cfg, alphas=(0.6, 1.0))
    c = {a["name"]: a["empirical"] for a in report.audits if a["name"].startswith("L1 shape")}
    assert c["L1 shape alpha=0.6"] > c["L1 shape alpha=1"]


def test_operator_norm_examples():
    ident = operator_norm_estimate("identity", 1.5, 0.0, 5, 3, n_max=32)
    assert ident == pytest.approx(1.0, abs=1e-12)
    for alpha in (0.0, 0.5, 2.0):
        assert operator_norm_estimate("riesz", 2.0, alpha, 10, 3, n_max=32) <= 1 + 1e-8
    a = operator_norm_estimate("maximal", 1.25, 0.5, 4, 7, n_max=32)
    b = operator_norm_estimate("maximal", 1.25, 0.5, 4, 7, n_max=32)
    assert a == b and np.isfinite(a)
    with pytest.raises(ValueError):
        operator_norm_estimate("maximal", 3.0, 0.5, 4, 7)


def test_classification_helpers():
    assert classify_slope(-0.5) == CONVERGING
    assert classify_slope(0.05) == STALLING
    assert classify_slope(0.3) == DIVERGING
    assert combine_classes([CONVERGING, STALLING]) == STALLING
    assert combine_classes([CONVERGING, DIVERGING]) == DIVERGING
    edges = block_edges(256)
    assert edges[0] == 4 and edges[-1] == 257 and np.all(np.diff(edges) > 0)
    n = np.arange(257, dtype=float)
    slope, _, _ = error_slope(np.maximum(n, 1) ** -1.5, edges)
    assert slope == pytest.approx(-1.5, abs=0.1)  # block maxima sit at block starts
    cells = [{"alpha": 0.1, "classification": STALLING}, {"alpha": 0.2, "classification": CONVERGING},
             {"alpha": 0.3, "classification": STALLING}]
    assert not monotone_in_alpha(cells)


def test_critical_lines():
    assert cond_line(2, 2.0) == 0.0
    assert cond2_line(2, 2.0) <= 0.0
    assert cond_line(3, 1.0) == pytest.approx(1.0)
    assert cond2_line(3, 1.0) == pytest.approx(1.0)


def test_convergence_harmonic_error_formula():
    k = 5
    prof = gegenbauer_profile(k, 2)
    rep = convergence_experiment(prof, [1.0], 2.0, K=64)
    assert rep.tables["convergence_cells"][0]["classification"] == CONVERGING
    row = rep.tables["convergence"][0]
    want = eigenvalue(2, k) / eigenvalue(2, 64) * abs(float(prof(np.cos(row["angle"]))))
    assert row["final_error"] == pytest.approx(want, rel=1e-8, abs=1e-14)


def test_convergence_smooth_profile():
    rep = convergence_experiment(singular_profile(0.4, 0.05, 2), [1.0], 2.0, K=256)
    assert rep.tables["convergence_cells"][0]["classification"] == CONVERGING
    series = {}
    for r in rep.plotdata["error_envelopes"]:
        series.setdefault(r["series"], []).append((r["x"], r["y"]))
    for pts in series.values():
        ys = [y for x, y in pts if x >= 16]
        assert all(b <= a for a, b in zip(ys, ys[1:]))


def test_convergence_above_critical_line():
    p = 4 / 3
    prof = singular_profile(singular_exponent_for(2, p), 0.0, 2)
    assert prof.in_lp(p) and not prof.in_lp(2.0)
    rep = convergence_experiment(prof, [0.75], p, K=256)
    assert rep.tables["convergence_cells"][0]["classification"] == CONVERGING


def test_convergence_rejects_pole():
    with pytest.raises(ValueError):
        convergence_experiment(singular_profile(0.4, 0.0, 2), [1.0], 2.0, eval_angles=[0.0, 1.0], K=32)


def test_threshold_map_small():
    cfg = ExperimentConfig(degree_max=128, n_max=64, alpha_grid=tuple(0.1 * i for i in range(11)))
    rep = threshold_map(cfg)
    assert rep.summary["monotone_in_alpha"]
    cells = {(c["p"], round(c["alpha"], 6)): c["classification"] for c in rep.tables["threshold_map"]}
    assert cells[(2.0, 0.5)] == CONVERGING
    series = {r["series"] for r in rep.plotdata["threshold_curves"]}
    assert {"cond", "cond2", "min_alpha_converging"} <= series


def test_run_experiment_outputs_reproducible(tmp_path):
    cfg = ExperimentConfig(**SMALL)
    run_experiment(cfg, tmp_path / "a")
    run_experiment(cfg, tmp_path / "b")
    doc = json.loads((tmp_path / "a" / "report.json").read_text())
    assert doc["passed"] and set(doc["experiments"]) == {"audit", "norms", "threshold_map"}
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
    tables = sorted(p.name for p in (tmp_path / "a" / "tables").iterdir())
    assert "threshold_map.csv" in tables and "operator_norms.csv" in tables
    for name in tables:
        assert (tmp_path / "a" / "tables" / name).read_bytes() == (tmp_path / "b" / "tables" / name).read_bytes()
    plot = (tmp_path / "a" / "plotdata" / "threshold_curves.csv").read_text().splitlines()
    assert [l for l in plot if not l.startswith("#")][0] == "x,y,series"
    assert json.loads((tmp_path / "a" / "timing.json").read_text())

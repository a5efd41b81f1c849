"""Batch experiments: inequality audits, operator-norm estimates,
convergence studies and the (p, alpha) convergence map.

Constant-1 inequalities are asserted (violations raise
:class:`InequalityViolation` with a witness); inequalities whose constant is
unspecified are only measured and reported, together with their trend
under grid / truncation refinement.
"""

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InequalityViolation
from .families import random_bandlimited, singular_exponent_for, zonal_family
from .sphere import antipode, build_grid, check_dim, grid_for_degree
from .summability import (
    averaged_maximal_table,
    default_radii,
    hardy_littlewood_pair,
    maximal_table,
    riesz_means_table,
    square_function_table,
)
from .transform import (
    GridFunction,
    ZonalCoefficients,
    funk_hecke_coefficients,
    project_many,
    singular_profile,
    zonal_lp_norm,
    zonal_quadrature,
)
from .zonal import beta_function, multiplier_matrix, square_multiplier, weight_difference_sum

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

CONVERGING = "converging"
STALLING = "stalling"
DIVERGING = "diverging"
SLOPE_THRESHOLD = 0.1

SLACK = 1e-10
AUDIT_MAX_DEGREE = 32
AUDIT_POINTS = 200
EM_BETA = 1.0
DEFAULT_EVAL_ANGLES = tuple(math.pi * np.array([1, 2, 3, 4, 5, 6]) / 6.0)

CONFIG_KEYS = (
    "dimension",
    "degree_max",
    "n_max",
    "alpha_grid",
    "p_grid",
    "family",
    "trials",
    "seed",
    "out_dir",
)
FAMILIES = ("bandlimited", "singular", "mixed")


@dataclass(frozen=True)
class ExperimentConfig:
    dimension: int = 2
    degree_max: int = 256
    n_max: int = 128
    alpha_grid: tuple = tuple(round(0.1 * i, 10) for i in range(11))
    p_grid: tuple = (1.25, 1.5, 2.0)
    family: str = "mixed"
    trials: int = 20
    seed: int = 0
    out_dir: str = "results"

    def __post_init__(self):
        check_dim(self.dimension)
        object.__setattr__(self, "alpha_grid", tuple(float(a) for a in self.alpha_grid))
        object.__setattr__(self, "p_grid", tuple(float(p) for p in self.p_grid))
        if not self.alpha_grid or any(a < 0 for a in self.alpha_grid):
            raise ValueError("alpha_grid must be a nonempty list of nonnegative orders")
        if not self.p_grid or any(not 1.0 <= p <= 2.0 for p in self.p_grid):
            raise ValueError("p_grid values must lie in [1, 2]")
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if self.n_max < 1 or self.trials < 1:
            raise ValueError("n_max and trials must be positive")
        if 2 * self.n_max > self.degree_max:
            raise ValueError("degree_max must be at least 2 * n_max (norm trend doubles n_max)")
        if self.degree_max > 512:
            raise ValueError("degree_max is capped at 512")


def _parse_list(raw):
    return tuple(float(v) for v in raw.replace(",", " ").split())


def load_config(path):
    """Read a ``key = value`` config file ('#' starts a comment)."""
    text = Path(path).read_text(encoding="utf-8")
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if key in ("alpha_grid", "p_grid"):
            values[key] = _parse_list(raw)
        elif key in ("family", "out_dir"):
            values[key] = raw
        else:
            values[key] = int(raw)
    return ExperimentConfig(**values)


def config_dict(cfg):
    d = asdict(cfg)
    d["alpha_grid"] = list(d["alpha_grid"])
    d["p_grid"] = list(d["p_grid"])
    return d


@dataclass
class ExperimentReport:
    """Tables of result rows, audit outcomes and plot series.

    ``runtimes`` is kept out of :meth:`to_dict` so the serialized report is
    reproducible bit for bit.
    """

    name: str
    config: dict
    tables: dict = field(default_factory=dict)
    audits: list = field(default_factory=list)
    plotdata: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    runtimes: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(a["passed"] for a in self.audits if a["kind"] == "asserted")

    def to_dict(self):
        return {
            "name": self.name,
            "config": self.config,
            "summary": self.summary,
            "audits": self.audits,
            "tables": {k: len(v) for k, v in self.tables.items()},
        }


def _py(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _fmt(v):
    v = _py(v)
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def write_csv(path, rows, header_lines=()):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = list(dict.fromkeys(k for row in rows for k in row))
    with path.open("w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(cols)
        for row in rows:
            writer.writerow([_fmt(row[c]) if c in row else "" for c in cols])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    v = _py(obj)
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def _audit(name, kind, passed, **fields):
    return {"name": name, "kind": kind, "passed": bool(passed), **fields}


# ---------------------------------------------------------------------------
# audit_inequalities
# ---------------------------------------------------------------------------


def _hl_ratio_constant(fns, values_on, grid, points, es, radii):
    """max over functions/points of E_* f / (f* + f* o antipode)."""
    worst, where = 0.0, None
    for i, fn in enumerate(fns):
        gf = GridFunction(grid, values_on(fn, grid))
        den = hardy_littlewood_pair(gf, points, radii)
        ratio = es[i] / np.maximum(den, np.finfo(float).tiny)
        j = int(np.argmax(ratio))
        if ratio[j] > worst:
            worst, where = float(ratio[j]), (i, j)
    return worst, where


def audit_inequalities(cfg, alphas=None, n_points=AUDIT_POINTS):
    """Evaluate every audited inequality on the random band-limited family.

    The grid carries degree K = min(n_max, 32); sup/sum truncations use
    n_max = K. Asserted inequalities: the M-chain for m = 1, 2, 3,
    M <= E_*, and L2 contraction of single means. Reported constants:
    the L1-shape ratio (two grid resolutions), the E_*^{alpha+beta} / M^alpha
    ratio and weight-difference sum, G, M and E_* L2 norms.
    """
    t0 = time.perf_counter()
    N = cfg.dimension
    K = min(cfg.n_max, AUDIT_MAX_DEGREE)
    n_max = K
    alphas = cfg.alpha_grid if alphas is None else tuple(float(a) for a in alphas)
    rng = np.random.default_rng(cfg.seed)
    grid = grid_for_degree(N, K)
    fine = build_grid(N, 2 * grid.n_polar)

    fns = [None] + [random_bandlimited(N, K, int(rng.integers(2**63))) for _ in range(cfg.trials)]
    names = ["constant"] + [f"bandlimited[{i}]" for i in range(cfg.trials)]

    def values_on(fn, g):
        return np.ones(g.size) if fn is None else fn.evaluate(g.nodes)

    values = np.array([values_on(fn, grid) for fn in fns])
    Y = project_many(grid, values, K)  # (F, K+1, M)
    Y = np.moveaxis(Y, 0, 1)  # (K+1, F, M)
    norms2 = np.sqrt(grid.integrate(values**2))
    pick = np.sort(rng.choice(grid.size, size=min(n_points, grid.size), replace=False))
    Yp = Y[:, :, pick]

    report = ExperimentReport("audit", config_dict(cfg))
    rows = []
    failures = []

    def l2(field_all):
        return np.sqrt(grid.integrate(field_all**2))

    for alpha in alphas:
        if alpha <= -0.5:
            raise ValueError("audited orders must exceed -1/2")
        M = {}
        G = {}
        for j in range(4):
            M[j] = averaged_maximal_table(Yp, N, alpha + j, n_max)[0]
        for j in range(3):
            G[j] = square_function_table(Yp, N, alpha + j, n_max)
        es_p = maximal_table(Yp, N, alpha, n_max)[0]

        for m in (1, 2, 3):
            rhs = M[m] + sum(G[j] for j in range(m))
            gap = rhs - M[0]
            i, j = np.unravel_index(np.argmin(gap), gap.shape)
            ok = gap[i, j] >= -SLACK
            witness = {
                "function": names[i],
                "node": int(pick[j]),
                "alpha": alpha,
                "m": m,
                "lhs": float(M[0][i, j]),
                "rhs": float(rhs[i, j]),
            }
            report.audits.append(
                _audit(f"M-chain m={m} alpha={alpha:g}", "asserted", ok,
                       worst_margin=float(gap[i, j]), witness=witness)
            )
            if not ok:
                failures.append(witness)

        gap = es_p - M[0]
        i, j = np.unravel_index(np.argmin(gap), gap.shape)
        ok = gap[i, j] >= -SLACK
        witness = {"function": names[i], "node": int(pick[j]), "alpha": alpha,
                   "lhs": float(M[0][i, j]), "rhs": float(es_p[i, j])}
        report.audits.append(
            _audit(f"M<=E* alpha={alpha:g}", "asserted", ok, worst_margin=float(gap[i, j]), witness=witness)
        )
        if not ok:
            failures.append(witness)

        # L2 norms over the whole grid.
        G_all = square_function_table(Y, N, alpha, n_max)
        M_all = averaged_maximal_table(Y, N, alpha, n_max)[0]
        g_ratio = l2(G_all) / norms2
        m_ratio = l2(M_all) / norms2
        nz = norms2 > 0
        mult = max(square_multiplier(N, k, alpha, n_max) for k in range(K + 1))
        report.audits.append(
            _audit(f"G-bound alpha={alpha:g}", "reported", True,
                   empirical=float(np.max(g_ratio[nz])),
                   exact_operator_norm=math.sqrt(mult),
                   reference_constant=math.sqrt(0.5 * beta_function(2 * alpha + 1, 2.5)),
                   witness={"function": names[int(np.argmax(np.where(nz, g_ratio, -1)))]})
        )
        report.audits.append(
            _audit(f"M-norm alpha={alpha:g}", "reported", True, empirical=float(np.max(m_ratio[nz])),
                   witness={"function": names[int(np.argmax(np.where(nz, m_ratio, -1)))]})
        )

        if alpha >= 0:
            E = riesz_means_table(Y, N, alpha, n_max)  # (n+1, F, M)
            contraction = np.sqrt(grid.integrate(E**2)) / norms2  # (n+1, F)
            n_i, f_i = np.unravel_index(np.argmax(contraction), contraction.shape)
            worst = float(contraction[n_i, f_i])
            ok = worst <= 1.0 + SLACK
            witness = {"function": names[f_i], "n": int(n_i), "alpha": alpha, "ratio": worst}
            report.audits.append(
                _audit(f"L2 contraction alpha={alpha:g}", "asserted", ok,
                       worst_margin=1.0 - worst, witness=witness)
            )
            if not ok:
                failures.append(witness)

            es_all = np.abs(E).max(axis=0)
            es_half = np.abs(E[: n_max // 2 + 1]).max(axis=0)
            t2 = l2(es_all) / norms2
            t2_half = l2(es_half) / norms2
            report.audits.append(
                _audit(f"T2 norm alpha={alpha:g}", "reported", True,
                       empirical=float(t2.max()), empirical_half_n=float(t2_half.max()),
                       n_max=n_max, witness={"function": names[int(np.argmax(t2))]})
            )

        # E_*^{alpha+beta} <= c M^alpha (constant unspecified).
        es_b = maximal_table(Yp, N, alpha + EM_BETA, n_max)[0]
        ratio = es_b / np.maximum(M[0], np.finfo(float).tiny)
        i, j = np.unravel_index(np.argmax(ratio), ratio.shape)
        report.audits.append(
            _audit(f"EM ratio alpha={alpha:g} beta={EM_BETA:g}", "reported", True,
                   empirical=float(ratio[i, j]),
                   weight_difference_sum=weight_difference_sum(N, n_max, EM_BETA),
                   weight_difference_sum_half_n=weight_difference_sum(N, n_max // 2, EM_BETA),
                   reference_constant=0.5 * beta_function(2 * EM_BETA - 1, 1.5),
                   asymptotic_constant=2 * EM_BETA**2 * beta_function(2 * EM_BETA - 1, 1.5),
                   witness={"function": names[i], "node": int(pick[j])})
        )

        if alpha > (N - 1) / 2.0:
            radii = default_radii(grid)
            pts = grid.nodes[pick]
            c_coarse, w_c = _hl_ratio_constant(fns, values_on, grid, pts, es_p, radii)
            c_fine, _ = _hl_ratio_constant(fns, values_on, fine, pts, es_p, radii)
            report.audits.append(
                _audit(f"L1 shape alpha={alpha:g}", "reported", bool(np.isfinite(c_coarse)),
                       empirical=c_coarse, empirical_refined=c_fine,
                       relative_change=abs(c_fine / c_coarse - 1.0) if c_coarse else math.inf,
                       n_polar=grid.n_polar, n_polar_refined=fine.n_polar,
                       witness={"function": names[w_c[0]], "node": int(pick[w_c[1]])} if w_c else {})
            )

        for m in (1, 2, 3):
            rhs = M[m] + sum(G[j] for j in range(m))
            rows.append({"alpha": alpha, "m": m, "min_margin": float(np.min(rhs - M[0])),
                         "mean_M": float(np.mean(M[0])), "mean_rhs": float(np.mean(rhs))})

    report.tables["audit_mchain"] = rows
    report.tables["audit_summary"] = [
        {k: v for k, v in a.items() if k not in ("witness",)} for a in report.audits
    ]
    report.summary = {
        "asserted_passed": report.passed,
        "grid_n_polar": grid.n_polar,
        "degree": K,
        "n_max": n_max,
        "points": int(pick.size),
        "functions": len(fns),
    }
    report.runtimes["audit"] = time.perf_counter() - t0
    if failures:
        err = InequalityViolation(
            f"{len(failures)} constant-1 inequality violation(s); first: {failures[0]}", failures[0]
        )
        err.report = report
        raise err
    return report


# ---------------------------------------------------------------------------
# operator norms (zonal route)
# ---------------------------------------------------------------------------

OPERATORS = ("identity", "riesz", "maximal", "gsq", "avgmax")


def _apply_operator(op, Y, N, alpha, n_max):
    if op == "identity":
        return Y.sum(axis=0)
    if op == "riesz":
        return riesz_means_table(Y, N, alpha, n_max)[n_max]
    if op == "maximal":
        return maximal_table(Y, N, alpha, n_max)[0]
    if op == "gsq":
        return square_function_table(Y, N, alpha, n_max)
    if op == "avgmax":
        return averaged_maximal_table(Y, N, alpha, n_max)[0]
    raise ValueError(f"unknown operator {op!r}; choose from {OPERATORS}")


def operator_norm_trials(op, p, alpha, trials, seed, N=2, n_max=128, degree=None,
                         family="mixed", n_quad=None):
    """Ratios ||op f||_p / ||f||_p over the seeded zonal family.

    Test functions are zonal, f(y) = g(<y, e>), band-limited to ``degree``
    (default n_max); norms use Gauss-Jacobi quadrature in t = <y, e>.
    """
    if not 1.0 <= p <= 2.0:
        raise ValueError("p must lie in [1, 2]")
    degree = n_max if degree is None else degree
    K = max(degree, n_max)
    n_quad = max(2 * K + 32, 256) if n_quad is None else n_quad
    t, w = zonal_quadrature(N, n_quad)
    rng = np.random.default_rng(seed)
    out = np.empty(trials)
    for i in range(trials):
        fam = zonal_family(N, degree, int(rng.integers(2**63)), family, p)
        mu = np.zeros(K + 1)
        mu[: degree + 1] = fam.mu
        Y = ZonalCoefficients(N, K, mu).projections(t)
        f = Y.sum(axis=0)
        out[i] = zonal_lp_norm(_apply_operator(op, Y, N, alpha, n_max), w, p) / zonal_lp_norm(f, w, p)
    return out


def operator_norm_estimate(op, p, alpha, trials, seed, **kwargs):
    """max over trials of ||op f||_p / ||f||_p (see :func:`operator_norm_trials`)."""
    return float(np.max(operator_norm_trials(op, p, alpha, trials, seed, **kwargs)))


def norm_study(cfg):
    """E_*, G and M norms at n_max and 2 n_max for every (p, alpha)."""
    t0 = time.perf_counter()
    report = ExperimentReport("norms", config_dict(cfg))
    rows = []
    for op in ("riesz", "maximal", "gsq", "avgmax"):
        for p in cfg.p_grid:
            for alpha in cfg.alpha_grid:
                base = operator_norm_estimate(op, p, alpha, cfg.trials, cfg.seed, N=cfg.dimension,
                                              n_max=cfg.n_max, family=cfg.family)
                doubled = operator_norm_estimate(op, p, alpha, cfg.trials, cfg.seed, N=cfg.dimension,
                                                 n_max=2 * cfg.n_max, degree=cfg.n_max, family=cfg.family)
                rows.append({"op": op, "p": p, "alpha": alpha, "n_max": cfg.n_max,
                             "norm": base, "norm_doubled": doubled,
                             "relative_growth": doubled / base - 1.0})
    report.tables["operator_norms"] = rows
    report.summary = {"rows": len(rows)}
    report.runtimes["norms"] = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# convergence studies
# ---------------------------------------------------------------------------


def classify_slope(slope):
    if slope < -SLOPE_THRESHOLD:
        return CONVERGING
    if slope > SLOPE_THRESHOLD:
        return DIVERGING
    return STALLING


def block_edges(K, start=4):
    """Block boundaries round(2^{j/2}) from ``start`` up to K + 1."""
    j = np.arange(2 * math.log2(start), 2 * math.log2(K + 1) + 1e-9)
    edges = np.unique(np.round(2.0 ** (j / 2.0)).astype(int))
    edges = edges[(edges >= start) & (edges <= K + 1)]
    if edges[-1] != K + 1:
        edges = np.append(edges, K + 1)
    return edges


def error_slope(errors, edges):
    """Least-squares slope of log(block max error) vs log(block centre).

    Uses the top half of the blocks. ``errors[n]`` is the error of the n-th
    mean. Returns (slope, block centres, block maxima).
    """
    lo, hi = edges[:-1], edges[1:]
    env = np.array([errors[a:b].max() for a, b in zip(lo, hi)])
    mid = np.sqrt(lo * (hi - 1.0))
    h = len(env) // 2
    tiny = np.finfo(float).tiny
    slope = np.polyfit(np.log(mid[h:]), np.log(np.maximum(env[h:], tiny)), 1)[0]
    return float(slope), mid, env


def combine_classes(classes):
    """Cell class: converging only if every point converges."""
    if all(c == CONVERGING for c in classes):
        return CONVERGING
    if any(c == DIVERGING for c in classes):
        return DIVERGING
    return STALLING


def convergence_experiment(profile, alpha_grid, p, eval_angles=DEFAULT_EVAL_ANGLES, K=256,
                           coefficients=None):
    """Pointwise errors |E_n^alpha f(x) - f(x)| along n = 0..K for a zonal f.

    Evaluation points sit at spherical distance ``eval_angles`` from the pole
    (the pole itself is excluded; the antipode pi is allowed). Coefficients
    come from the Funk-Hecke route.
    """
    t0 = time.perf_counter()
    N = profile.N
    angles = np.asarray(eval_angles, dtype=np.float64)
    if np.any(angles <= 1e-6) or np.any(angles > math.pi):
        raise ValueError("evaluation angles must lie in (0, pi]; the pole is excluded")
    coeffs = funk_hecke_coefficients(profile, K) if coefficients is None else coefficients
    t = np.cos(angles)
    Y = coeffs.projections(t)  # (K+1, P)
    exact = profile(t)
    edges = block_edges(K)
    report = ExperimentReport(
        "convergence",
        {"profile": profile.name, "params": profile.params, "p": p, "K": K,
         "alpha_grid": list(map(float, alpha_grid)), "eval_angles": angles.tolist()},
    )
    rows, series, cells = [], [], []
    for alpha in alpha_grid:
        E = riesz_means_table(Y, N, alpha, K)
        err = np.abs(E - exact)
        classes = []
        for i, gam in enumerate(angles):
            slope, mid, env = error_slope(err[:, i], edges)
            cls = classify_slope(slope)
            classes.append(cls)
            rows.append({"alpha": float(alpha), "angle": float(gam), "slope": slope,
                         "final_error": float(err[K, i]), "classification": cls})
            for x, y in zip(mid, env):
                series.append({"x": float(x), "y": float(y), "series": f"alpha={alpha:g},angle={gam:.6g}"})
        cells.append({"alpha": float(alpha), "classification": combine_classes(classes)})
    report.tables["convergence"] = rows
    report.tables["convergence_cells"] = cells
    report.plotdata["error_envelopes"] = series
    report.summary = {
        "in_lp": profile.in_lp(p),
        "min_alpha_converging": min_converging(cells),
        "monotone_in_alpha": monotone_in_alpha(cells),
    }
    report.runtimes["convergence"] = time.perf_counter() - t0
    return report


def min_converging(cells):
    conv = [c["alpha"] for c in cells if c["classification"] == CONVERGING]
    return min(conv) if conv else None


def monotone_in_alpha(cells):
    seen = False
    for c in sorted(cells, key=lambda c: c["alpha"]):
        if c["classification"] == CONVERGING:
            seen = True
        elif seen:
            return False
    return True


def cond_line(N, p):
    """Sufficiency boundary alpha = (N-1)(1/p - 1/2)."""
    return (N - 1) * (1.0 / p - 0.5)


def cond2_line(N, p):
    """Divergence-region boundary alpha = N(1/p - 1/2) - 1/2."""
    return N * (1.0 / p - 0.5) - 0.5


def threshold_map(cfg):
    """Convergence class of the singular family over the (p, alpha) grid.

    For each p the profile (1 - t)^{-s} uses s just inside L_p.
    """
    t0 = time.perf_counter()
    N, K = cfg.dimension, cfg.degree_max
    report = ExperimentReport("threshold_map", config_dict(cfg))
    cells, per_p, point_rows = [], [], []
    for p in cfg.p_grid:
        s = singular_exponent_for(N, p)
        prof = singular_profile(s, 0.0, N)
        sub = convergence_experiment(prof, cfg.alpha_grid, p, K=K)
        for c in sub.tables["convergence_cells"]:
            cells.append({"p": p, "alpha": c["alpha"], "s": s, "classification": c["classification"],
                          "cond": cond_line(N, p), "cond2": cond2_line(N, p)})
        for r in sub.tables["convergence"]:
            point_rows.append({"p": p, **r})
        per_p.append({"p": p, "s": s, "min_alpha_converging": sub.summary["min_alpha_converging"],
                      "cond": cond_line(N, p), "cond2": cond2_line(N, p),
                      "monotone_in_alpha": sub.summary["monotone_in_alpha"]})
    report.tables["threshold_map"] = cells
    report.tables["threshold_points"] = point_rows
    report.tables["threshold_summary"] = per_p
    ps = np.linspace(1.0, 2.0, 41)
    curve = [{"x": float(q), "y": cond_line(N, q), "series": "cond"} for q in ps]
    curve += [{"x": float(q), "y": cond2_line(N, q), "series": "cond2"} for q in ps]
    curve += [{"x": r["p"], "y": r["min_alpha_converging"], "series": "min_alpha_converging"}
              for r in per_p if r["min_alpha_converging"] is not None]
    report.plotdata["threshold_curves"] = curve
    report.summary = {
        "per_p": per_p,
        "monotone_in_alpha": all(r["monotone_in_alpha"] for r in per_p),
    }
    report.runtimes["threshold_map"] = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------


def header_lines(cfg, name):
    return [
        f"riesz_sphere {__version__} {name}",
        "config " + json.dumps(config_dict(cfg), sort_keys=True),
        f"seed {cfg.seed}",
    ]


def write_reports(cfg, reports, out_dir):
    """report.json, tables/*.csv, plotdata/*.csv and timing.json under out_dir."""
    out = Path(out_dir)
    (out / "tables").mkdir(parents=True, exist_ok=True)
    (out / "plotdata").mkdir(parents=True, exist_ok=True)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "config": config_dict(cfg),
        "passed": all(r.passed for r in reports),
        "experiments": {r.name: r.to_dict() for r in reports},
    }
    (out / "report.json").write_text(
        json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for r in reports:
        for name, rows in r.tables.items():
            write_csv(out / "tables" / f"{name}.csv", rows, header_lines(cfg, name))
        for name, rows in r.plotdata.items():
            write_csv(out / "plotdata" / f"{name}.csv", rows, header_lines(cfg, name))
    timing = {name: secs for r in reports for name, secs in r.runtimes.items()}
    (out / "timing.json").write_text(json.dumps(timing, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


def run_experiment(cfg, out_dir=None):
    """Audit, norm study and threshold map; writes outputs and returns the reports.

    Raises :class:`InequalityViolation` after writing the outputs if an
    asserted inequality failed.
    """
    violation = None
    try:
        audit = audit_inequalities(cfg)
    except InequalityViolation as exc:
        violation, audit = exc, exc.report
    reports = [audit, norm_study(cfg), threshold_map(cfg)]
    write_reports(cfg, reports, cfg.out_dir if out_dir is None else out_dir)
    if violation is not None:
        raise violation
    return reports

"""Command-line entry point: ``riesz-sphere <subcommand> ...``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

import argparse
import csv
import datetime
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InequalityViolation, RieszSphereError
from .experiments import config_dict, load_config, run_experiment
from .sphere import build_grid, write_grid
from .summability import (
    averaged_maximal_M,
    hardy_littlewood,
    maximal_riesz,
    riesz_mean_series,
    square_function_G,
)
from .transform import GridFunction, decompose, funk_hecke_coefficients, parse_profile
from .zonal import riesz_kernel

log = logging.getLogger("riesz_sphere")

OPS = ("riesz", "maximal", "hl", "gsq", "avgmax")


def fmt(v):
    if v is None or v == "":
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def _header(command, params, seed=None):
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return [
        f"riesz_sphere {__version__} {command}",
        f"generated {stamp}",
        "config " + json.dumps(params, sort_keys=True),
        f"seed {'none' if seed is None else seed}",
    ]


def _emit(out, header, meta, columns, rows):
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    for key, val in meta:
        buf.write(f"# {key}={val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def cmd_kernel(args):
    t = np.linspace(-1.0, 1.0, args.points)
    vals = riesz_kernel(args.dim, args.n, args.alpha, t)
    params = {"dim": args.dim, "n": args.n, "alpha": args.alpha, "points": args.points}
    _emit(args.out, _header("kernel", params),
          [("N", args.dim), ("n", args.n), ("alpha", fmt(args.alpha))],
          ["t", "value"], zip(t, vals))
    return 0


def _read_samples(path, grid):
    values = np.full(grid.size, np.nan)
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(line for line in fh if not line.lstrip().startswith("#")):
            if not row or not row[0].strip():
                continue
            try:
                idx = int(row[0])
            except ValueError:
                continue  # column header
            if not 0 <= idx < grid.size:
                raise ValueError(f"node index {idx} out of range for a {grid.size}-node grid")
            values[idx] = float(row[1])
    missing = int(np.isnan(values).sum())
    if missing:
        raise ValueError(f"{missing} grid nodes have no sample in {path}")
    return GridFunction(grid, values)


def cmd_transform(args):
    params = {"dim": args.dim, "degree": args.degree}
    if args.profile:
        params.update(profile=args.profile, method=args.method)
        prof = parse_profile(args.profile, args.dim)
        coeffs = funk_hecke_coefficients(prof, args.degree, method=args.method)
        rows = zip(range(args.degree + 1), coeffs.mu, coeffs.degree_norms())
    else:
        n_polar = args.grid_res or args.degree + 1
        params.update(samples=str(args.samples), grid_res=n_polar)
        grid = build_grid(args.dim, n_polar)
        dec = decompose(_read_samples(args.samples, grid), args.degree)
        norms = np.sqrt(np.maximum(dec.row_norms_sq(), 0.0))
        rows = ((k, None, norms[k]) for k in range(args.degree + 1))
    _emit(args.out, _header("transform", params), [("N", args.dim), ("K", args.degree)],
          ["k", "coefficient", "l2_norm"], rows)
    return 0


def cmd_operators(args):
    prof = parse_profile(args.profile, args.dim)
    n_polar = args.grid_res or args.n_max + 1
    grid = build_grid(args.dim, n_polar)
    f = prof.sample(grid)
    params = {"dim": args.dim, "alpha": args.alpha, "n_max": args.n_max, "op": args.op,
              "profile": args.profile, "grid_res": n_polar}
    argmax = None
    if args.op == "hl":
        field = hardy_littlewood(f)
        values, argmax = field.values, field.argmax
    else:
        dec = decompose(f, args.n_max)
        if args.op == "riesz":
            values = riesz_mean_series(dec, args.alpha, args.n_max).values[args.n_max]
        elif args.op == "maximal":
            field = maximal_riesz(dec, args.alpha, args.n_max)
            values, argmax = field.values, field.argmax
        elif args.op == "gsq":
            values = square_function_G(dec, args.alpha, args.n_max).values
        else:
            field = averaged_maximal_M(dec, args.alpha, args.n_max)
            values, argmax = field.values, field.argmax
    rows = ((i, values[i], None if argmax is None else argmax[i]) for i in range(grid.size))
    _emit(args.out, _header("operators", params),
          [("N", args.dim), ("op", args.op), ("alpha", fmt(args.alpha)), ("n_max", args.n_max)],
          ["node", "value", "argmax_n"], rows)
    return 0


def cmd_grid(args):
    grid = build_grid(args.dim, args.grid_res)
    if args.out in (None, "-"):
        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            p = Path(tmp) / "grid.txt"
            write_grid(grid, p)
            sys.stdout.write(p.read_text(encoding="ascii"))
    else:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        write_grid(grid, args.out)
    return 0


def cmd_experiment_run(args):
    cfg = load_config(args.config)
    out_dir = args.out_dir or cfg.out_dir
    log.info("running experiments with %s", json.dumps(config_dict(cfg), sort_keys=True))
    try:
        reports = run_experiment(cfg, out_dir)
    except InequalityViolation as exc:
        print(f"riesz-sphere: inequality audit failed: {exc}", file=sys.stderr)
        return 1
    for r in reports:
        log.info("%s: %s", r.name, json.dumps(r.summary, sort_keys=True, default=str))
    print(f"wrote {out_dir}/report.json")
    return 0


def _nonneg_float(text):
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser():
    parser = argparse.ArgumentParser(
        prog="riesz-sphere",
        description="Riesz means of Fourier-Laplace series on S^N.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="{kernel,transform,operators,grid,experiment}")
    sub.required = True

    p = sub.add_parser("kernel", help="dump the Riesz kernel Theta^alpha(t, n) as CSV")
    p.add_argument("--dim", type=int, default=2, help="sphere dimension N (2..6)")
    p.add_argument("--n", type=int, required=True, help="summation index n")
    p.add_argument("--alpha", type=_nonneg_float, default=0.0)
    p.add_argument("--points", type=int, default=201, help="number of t values in [-1, 1]")
    p.add_argument("--out", default="-", help="output file (default stdout)")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("transform", help="per-degree coefficients and norms")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--degree", "-K", type=int, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--profile", help="zonal profile, e.g. 'singular:s=0.4,eps=0'")
    src.add_argument("--samples", help="CSV of (node index, value) on the --grid-res grid")
    p.add_argument("--grid-res", type=int, default=None, help="n_polar of the sample grid")
    p.add_argument("--method", choices=("auto", "jacobi", "graded"), default="auto")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("operators", help="evaluate an operator at every grid node")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--op", choices=OPS, default="maximal")
    p.add_argument("--profile", default="exp:kappa=1")
    p.add_argument("--grid-res", type=int, default=None, help="n_polar (default n_max + 1)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_operators)

    p = sub.add_parser("grid", help="write a quadrature grid in the text format")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--grid-res", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("experiment", help="batch experiments from a config file")
    esub = p.add_subparsers(dest="action", metavar="{run}")
    esub.required = True
    r = esub.add_parser("run", help="run audit, norm study and threshold map")
    r.add_argument("config", help="key = value config file")
    r.add_argument("--out-dir", default=None, help="override out_dir from the config")
    r.set_defaults(func=cmd_experiment_run)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"riesz-sphere: file not found: {exc.filename}", file=sys.stderr)
        return 1
    except (RieszSphereError, ValueError, OSError) as exc:
        print(f"riesz-sphere: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Exit codes: 0 success, 1 runtime or numerical failure, 2 usage, config or
input error. Data goes to stdout or files; messages go to stderr.
"""

import argparse
import json
import os
import sys

import numpy as np

from .central import certified_balls, knn_local_radii, proxy_mask, q_hat_mask, s_hat_mask
from .config import ConfigError, load_config, parse_config
from .conformal import ConformalScorer, ConformalConfig
from .experiments import ExperimentError, run_experiment
from .geometry import as_point, half_mass_radius, majority_rank
from .grid import GridSpec
from .io import ParseError, fmt, ingest_csv, report_json, write_balls_csv, write_mask_csv, write_report


class UsageError(ValueError):
    pass


def parse_coords(text):
    try:
        return as_point([float(t) for t in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"--z: {exc}") from None


def parse_grid_arg(text):
    """``lo:hi:count`` per axis, axes separated by commas."""
    axes = []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 3:
            raise UsageError(f"--grid: axis {part!r} is not lo:hi:count")
        try:
            axes.append((float(bits[0]), float(bits[1]), int(bits[2])))
        except ValueError:
            raise UsageError(f"--grid: axis {part!r} is not lo:hi:count") from None
    try:
        return GridSpec.from_axes(axes)
    except ValueError as exc:
        raise UsageError(f"--grid: {exc}") from None


def _alpha(value):
    try:
        return ConformalConfig(value).alpha
    except ValueError as exc:
        raise UsageError(f"--alpha: {exc}") from None


def _load(args):
    data = ingest_csv(args.data)
    return data


def _check_dim(z, data):
    if z.size != data.shape[1]:
        raise UsageError(f"--z has {z.size} coordinates but the data has dimension {data.shape[1]}")


def _check_grid(grid, data):
    if grid is None:
        raise UsageError("--grid is required")
    if grid.dim != data.shape[1]:
        raise UsageError(f"--grid has dimension {grid.dim} but the data has dimension {data.shape[1]}")


def cmd_score(args, out):
    data = _load(args)
    z = parse_coords(args.z)
    _check_dim(z, data)
    print(f"radius={fmt(half_mass_radius(z, data))}", file=out)
    print(f"k={majority_rank(data.shape[0]).k}", file=out)


def _print_pvalue(scorer, z, alpha, out):
    p = scorer.p_value(z)
    print(f"p_value={p.numerator}/{p.denominator}", file=out)
    print(f"p_decimal={fmt(float(p))}", file=out)
    if alpha is not None:
        print(f"member={'true' if bool(scorer.contains(z[None, :], alpha)[0]) else 'false'}", file=out)


def cmd_pvalue(args, out):
    alpha = _alpha(args.alpha) if args.alpha is not None else None
    data = _load(args)
    z = parse_coords(args.z)
    _check_dim(z, data)
    _print_pvalue(ConformalScorer(data), z, alpha, out)


def cmd_region(args, out):
    alpha = _alpha(args.alpha)
    data = _load(args)
    scorer = ConformalScorer(data)
    if args.z is not None:
        z = parse_coords(args.z)
        _check_dim(z, data)
        _print_pvalue(scorer, z, alpha, out)
        return
    grid = parse_grid_arg(args.grid) if args.grid else None
    _check_grid(grid, data)
    if not args.out:
        raise UsageError("--out is required in grid mode")
    nodes = grid.nodes()
    mask = scorer.contains(nodes, alpha)
    write_mask_csv(args.out, nodes, mask)
    print(f"nodes={grid.size}", file=out)
    print(f"members={int(mask.sum())}", file=out)


def cmd_sets(args, out):
    if args.beta is None or args.beta < 0:
        raise UsageError("--beta must be given and nonnegative")
    grid = parse_grid_arg(args.grid) if args.grid else None
    data = _load(args)
    _check_grid(grid, data)
    if not args.out:
        raise UsageError("--out DIR is required")
    n = data.shape[0]
    k = args.k
    if k is not None and not 1 <= k <= n - 1:
        raise UsageError(f"--k must satisfy 1 <= k <= n-1 = {n - 1}")
    nodes = grid.nodes()
    q = q_hat_mask(nodes, data, args.beta)
    s = s_hat_mask(nodes, data, args.beta)
    if n >= 2:
        radii = knn_local_radii(data, k)
        p = proxy_mask(nodes, data, args.beta, radii=radii)
        centers, rad = certified_balls(data, args.beta, radii=radii)
    else:
        p = np.zeros(grid.size, dtype=bool)
        centers, rad = np.empty((0, data.shape[1])), np.empty(0)
    os.makedirs(args.out, exist_ok=True)
    write_mask_csv(os.path.join(args.out, "q_hat.csv"), nodes, q)
    write_mask_csv(os.path.join(args.out, "s_hat.csv"), nodes, s)
    write_mask_csv(os.path.join(args.out, "proxy.csv"), nodes, p)
    write_balls_csv(os.path.join(args.out, "balls.csv"), centers, rad)
    print(f"q_hat_members={int(q.sum())}", file=out)
    print(f"s_hat_members={int(s.sum())}", file=out)
    print(f"proxy_members={int(p.sum())}", file=out)
    print(f"certified_balls={rad.size}", file=out)


def cmd_experiment(args, out):
    if args.seed is not None or args.workers is not None:
        with open(args.config, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("<file>", f"invalid JSON: {exc.msg}") from None
        if args.seed is not None:
            doc["seed"] = args.seed
        if args.workers is not None:
            doc["workers"] = args.workers
        cfg = parse_config(doc)
    else:
        cfg = load_config(args.config)
    out_dir = args.out or cfg.out
    report = run_experiment(cfg)
    if out_dir:
        json_path, csv_path = write_report(out_dir, report)
        print(f"report={json_path}", file=out)
        print(f"series={csv_path}", file=out)
    else:
        print(report_json(report), file=out)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="halfmass",
        description="Robust conformal prediction with the half-mass radius score.",
        epilog="Negative values need the = form, e.g. --z=-1,2 --grid=-4:4:200,-4:4:200",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="half-mass radius of a point")
    p.add_argument("--data", required=True)
    p.add_argument("--z", required=True, help="comma-separated coordinates")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("pvalue", help="conformal p-value of a point")
    p.add_argument("--data", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--alpha", type=float)
    p.set_defaults(func=cmd_pvalue)

    p = sub.add_parser("region", help="conformal region membership at a point or over a grid")
    p.add_argument("--data", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--z")
    p.add_argument("--grid", help="lo:hi:count per axis, comma separated")
    p.add_argument("--out", help="mask CSV path (grid mode)")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("sets", help="Q_hat, S_hat and proxy masks over a grid")
    p.add_argument("--data", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--k", type=int, help="local rank of the proxy (default floor(n/2))")
    p.add_argument("--grid")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_sets)

    p = sub.add_parser("experiment", help="run a JSON-configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory for report.json and report_series.csv")
    p.add_argument("--seed", type=int, help="seed, overriding the config")
    p.add_argument("--workers", type=int, help="worker processes, overriding the config")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args, out)
    except (UsageError, ConfigError, ParseError) as exc:
        print(f"halfmass {args.command}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"halfmass {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ExperimentError, ValueError, ArithmeticError, OSError) as exc:
        print(f"halfmass {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

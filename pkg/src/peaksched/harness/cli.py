"""Command-line interface.

Subcommands:

* ``run``     one algorithm on one trace, printed cost breakdown
* ``compare`` the full algorithm table on one trace (CSV + stdout)
* ``sweep``   one experiment axis: lambda, peak, ramp, or capacity
* ``synth``   write synthetic price/demand CSVs
* ``verify``  the theorem verification suite (non-zero exit on failure)

Configuration comes from an optional flat ``key = value`` file given with
``--config``; command-line flags override file values.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import PeakSchedError
from .experiment import (
    ExperimentConfig,
    SWEEP_AXES,
    config_from_sources,
    parse_config_text,
    run_experiment,
    run_sweep,
)
from .traces import synth_trace, write_trace_csv
from .verify import (
    default_beta_grid,
    default_lambda_grid,
    default_sigma_grid,
    verify_theorems,
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out-dir")
    parser.add_argument("--price-csv")
    parser.add_argument("--demand-csv")
    parser.add_argument("--days", type=int, help="synthetic trace length in days")
    parser.add_argument("--peak-level", type=float)
    parser.add_argument("--base-level", type=float)
    parser.add_argument("--noise", type=float)
    parser.add_argument("--algorithms", help="comma-separated algorithm names")
    parser.add_argument("--lambdas", help="comma-separated trust values in (0, 1]")
    parser.add_argument("--predictors", help="comma-separated predictor names")
    parser.add_argument("--sigma-hat", type=float, help="scalar predicted premium mass")
    parser.add_argument("--sigma1", type=float, help="price noise std-dev for the gaussian predictor")
    parser.add_argument("--sigma2", type=float, help="demand noise std-dev for the gaussian predictor")
    parser.add_argument("--peak-multiplier", type=float)
    parser.add_argument("--capacity-ratio", type=float)
    parser.add_argument("--ramp-ratio", type=float)


_CONFIG_KEYS = (
    "seed", "out_dir", "price_csv", "demand_csv", "days", "peak_level", "base_level",
    "noise", "algorithms", "lambdas", "predictors", "sigma_hat", "sigma1", "sigma2",
    "peak_multiplier", "capacity_ratio", "ramp_ratio",
)


def _config_from_args(args: argparse.Namespace, **extra) -> ExperimentConfig:
    file_values = {}
    if args.config:
        file_values = parse_config_text(Path(args.config).read_text())
    overrides = {key: getattr(args, key, None) for key in _CONFIG_KEYS}
    overrides.update(extra)
    return config_from_sources(file_values, overrides)


def _cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(
        args,
        algorithms=(args.algorithm,),
        lambdas=(args.lam,) if args.lam is not None else None,
        predictors=(args.predictor,) if args.predictor else None,
    )
    result = run_experiment(config, write=args.out_dir is not None)
    if result.manifest["errors"]:
        for key, message in result.manifest["errors"].items():
            print(f"error [{key}]: {message}", file=sys.stderr)
        return 1
    for row in result.rows:
        print(
            f"{row['algorithm']} lambda={row['lambda']} predictor={row['predictor']}: "
            f"total={row['total_cost']:.6f} opt={row['opt_cost']:.6f} "
            f"ratio={row['empirical_cr']:.6f} saving={row['cost_reduction']:.4%}"
        )
    if result.report_path:
        print(f"report: {result.report_path}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = run_experiment(config, write=True)
    header = f"{'algorithm':<18}{'lambda':>8}{'predictor':>12}{'ratio':>10}{'saving':>10}"
    print(header)
    for row in result.rows:
        lam = "" if row["lambda"] is None else f"{row['lambda']:.2f}"
        print(
            f"{row['algorithm']:<18}{lam:>8}{row['predictor']:>12}"
            f"{row['empirical_cr']:>10.4f}{row['cost_reduction']:>10.4f}"
        )
    for key, message in result.manifest["errors"].items():
        print(f"error [{key}]: {message}", file=sys.stderr)
    print(f"report: {result.report_path}")
    return 1 if result.manifest["errors"] else 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    values = None
    if args.values:
        values = tuple(float(part) for part in args.values.split(","))
    result = run_sweep(config, axis=args.axis, values=values, write=True)
    print(f"{len(result.rows)} rows -> {result.report_path}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    trace = synth_trace(
        days=args.days if args.days is not None else 30,
        seed=args.seed if args.seed is not None else 0,
        peak_level=args.peak_level if args.peak_level is not None else 12.0,
        base_level=args.base_level if args.base_level is not None else 2.0,
        noise=args.noise if args.noise is not None else 1.0,
    )
    out_dir = Path(args.out_dir or "out")
    out_dir.mkdir(parents=True, exist_ok=True)
    price_file = out_dir / "prices.csv"
    demand_file = out_dir / "demands.csv"
    write_trace_csv(trace, price_file, demand_file, start=args.start)
    print(f"{len(trace)} slots -> {price_file}, {demand_file}")
    return 0


def _subsample(grid: tuple[float, ...], resolution: int) -> tuple[float, ...]:
    if resolution >= len(grid):
        return grid
    idx = [round(i * (len(grid) - 1) / (resolution - 1)) for i in range(resolution)]
    return tuple(grid[i] for i in idx)


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.grid_resolution < 5:
        print("error: --grid-resolution must be at least 5", file=sys.stderr)
        return 2
    if args.full:
        lambdas, betas, sigmas = None, None, None
    else:
        n = args.grid_resolution
        lambdas = _subsample(default_lambda_grid(), n)
        betas = _subsample(default_beta_grid(), n)
        sigmas = _subsample(default_sigma_grid(), max(n, 10))
    report = verify_theorems(
        lambdas=lambdas, betas=betas, sigmas=sigmas, empirical_slots=args.slots
    )
    print(report.format())
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "verification.txt").write_text(report.format() + "\n")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peaksched",
        description="Peak-aware generation scheduling: algorithms, experiments, verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one algorithm on one trace")
    _add_config_flags(p_run)
    p_run.add_argument("--algorithm", required=True)
    p_run.add_argument("--lambda", dest="lam", type=float)
    p_run.add_argument("--predictor")
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="compare the configured algorithm table")
    _add_config_flags(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    p_sweep = sub.add_parser("sweep", help="sweep one experiment axis")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=sorted(SWEEP_AXES))
    p_sweep.add_argument("--values", help="comma-separated axis values")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_synth = sub.add_parser("synth", help="write synthetic trace CSVs")
    _add_config_flags(p_synth)
    p_synth.add_argument("--start", default="2018-04-01T00:00", help="first hourly timestamp")
    p_synth.set_defaults(func=_cmd_synth)

    p_verify = sub.add_parser("verify", help="run the theorem verification suite")
    p_verify.add_argument("--grid-resolution", type=int, default=9, help="points per parameter axis (>= 5)")
    p_verify.add_argument("--full", action="store_true", help="use the full acceptance-scale grids")
    p_verify.add_argument("--slots", type=int, default=4000, help="slots in constructed worst-case instances")
    p_verify.add_argument("--out-dir")
    p_verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PeakSchedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

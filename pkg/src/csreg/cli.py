"""Command line interface.

One executable with eight subcommands covering simulation, fitting,
estimation, population oracles, Monte Carlo tables, and bandwidth
selection.  Exit codes: 0 success, 2 validation error, 3 estimation
failure.  Scalar results go to standard output as JSON, tabular data to
CSV files; every run is reproducible from its flags and --seed.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

import numpy as np

from . import io
from .errors import (
    AllExcludedError,
    AllFailedError,
    BracketError,
    NoCrossingError,
    QuadratureError,
    SingularInformationError,
)
from .estimators import (
    DEFAULT_EPS,
    DEFAULT_INTERVAL,
    GridReport,
    attach_intercept,
    estimate,
)
from .isotonic import log_likelihood, mle_fixed_beta
from .kernels import KernelConfig, bandwidth
from .model import Sample, TruncationSpec, simulate, simulation_model
from .montecarlo import (
    DEFAULT_C_GRID,
    METHODS,
    BootstrapConfig,
    MCConfig,
    bootstrap_bandwidth,
    mc_mse_curve,
    run_montecarlo,
)
from .oracles import (
    fisher_parametric,
    fisher_semiparametric,
    identifiability_integral,
    intercept_variance,
    population_score1,
    score1_asymptotic_variance,
)
from .scores import CrossingResult, psi1, psi2, psi3

_ESTIMATION_ERRORS = (
    NoCrossingError,
    BracketError,
    AllExcludedError,
    AllFailedError,
    SingularInformationError,
    QuadratureError,
)


class _UsageError(Exception):
    pass


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise _UsageError(msg)


def _interval_type(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("interval must be lo,hi")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return lo, hi


def _grid_type(text: str):
    try:
        return tuple(float(p) for p in text.split(",") if p)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_sample(path: str) -> Sample:
    if path.endswith(".json"):
        return io.read_sample_json(path)
    return io.read_sample_csv(path)


def _progress(total: int):
    step = max(1, total // 10)

    def cb(done: int) -> None:
        if done % step == 0 or done == total:
            print(f"replication {done}/{total}", file=sys.stderr)

    return cb


def _validate_eps(eps: float, allow_zero: bool = False) -> None:
    lo_ok = eps >= 0.0 if allow_zero else eps > 0.0
    _check(lo_ok and eps < 0.5, "eps must lie in (0, 0.5)" if not allow_zero else "eps must lie in [0, 0.5)")


def _validate_interval(interval) -> None:
    _check(interval[0] < interval[1], "interval must satisfy lo < hi")


def _diagnostics_dict(diag) -> Optional[dict]:
    if isinstance(diag, CrossingResult):
        return {
            "type": "crossing",
            "bracket": [diag.bracket[0], diag.bracket[1]],
            "evaluations": diag.evaluations,
            "crossings": diag.crossings,
            "solver": diag.method,
        }
    if isinstance(diag, GridReport):
        return {
            "type": "grid",
            "best_index": diag.best_index,
            "n_ties": diag.n_ties,
            "grid": diag.grid.tolist(),
            "values": diag.values.tolist(),
        }
    return None


def _cmd_simulate(args) -> int:
    _check(args.n >= 1, "--n must be at least 1")
    _check(args.seed >= 0, "--seed must be nonnegative")
    model = simulation_model(args.beta0)
    sample = simulate(model, args.n, args.seed)
    if args.out.endswith(".json"):
        io.write_sample_json(args.out, sample)
    else:
        io.write_sample_csv(args.out, sample)
    return 0


def _cmd_mle(args) -> int:
    sample = _read_sample(args.input)
    beta = np.array([args.beta])
    dist = mle_fixed_beta(sample, beta)
    if args.out:
        io.write_step_csv(args.out, dist)
    print(
        io.dump_json(
            {
                "n": sample.n,
                "beta": args.beta,
                "knots": int(dist.knots.size),
                "total_mass": dist.total_mass,
                "log_likelihood": log_likelihood(sample, beta),
            }
        )
    )
    return 0


def _estimation_sample(args) -> Sample:
    if args.input:
        return _read_sample(args.input)
    _check(args.n is not None, "provide --input or --n with --seed")
    _check(args.n >= 1, "--n must be at least 1")
    _check(args.seed >= 0, "--seed must be nonnegative")
    return simulate(simulation_model(), args.n, args.seed)


def _cmd_estimate(args) -> int:
    _validate_eps(args.eps)
    _validate_interval(args.interval)
    _check(args.c > 0.0, "--c must be positive")
    _check(args.c_alpha > 0.0, "--c-alpha must be positive")
    _check(args.grid_points >= 1, "--grid-points must be at least 1")
    sample = _estimation_sample(args)
    trunc = TruncationSpec(args.eps)
    result = estimate(
        sample,
        args.method,
        args.interval,
        trunc,
        c=args.c,
        grid_points=args.grid_points,
    )
    if not args.no_intercept:
        result = attach_intercept(sample, result, args.c_alpha)
    print(
        io.dump_json(
            {
                "method": result.method,
                "beta_hat": result.beta_hat,
                "alpha_hat": result.alpha_hat,
                "eps": result.eps,
                "h_beta": result.h_beta,
                "h_alpha": result.h_alpha,
                "n": sample.n,
                "diagnostics": _diagnostics_dict(result.diagnostics),
            }
        )
    )
    return 0


def _cmd_score_curve(args) -> int:
    _validate_eps(args.eps)
    _validate_interval(args.interval)
    _check(args.points >= 2, "--points must be at least 2")
    _check(args.c > 0.0, "--c must be positive")
    sample = _read_sample(args.input)
    trunc = TruncationSpec(args.eps)
    grid = np.linspace(args.interval[0], args.interval[1], args.points)
    if args.score == "psi1":
        evaluate = lambda b: psi1(sample, np.array([b]), trunc)
    elif args.score == "psi2":
        cfg = KernelConfig(bandwidth(sample.n, args.c, 7))
        evaluate = lambda b: psi2(sample, np.array([b]), trunc, cfg)
    else:
        cfg = KernelConfig(bandwidth(sample.n, args.c, 5))
        evaluate = lambda b: psi3(sample, np.array([b]), trunc, cfg)
    results = [evaluate(float(b)) for b in grid]
    io.write_score_curve_csv(
        args.out,
        grid,
        [r.value[0] for r in results],
        args.score,
        [r.n_used for r in results],
        [r.n_excluded for r in results],
    )
    return 0


def _cmd_oracle(args) -> int:
    needs_beta = args.quantity in ("popscore", "ident")
    _check(not needs_beta or args.beta is not None, f"--beta is required for {args.quantity}")
    if args.eps is None:
        eps = 0.0 if args.quantity in ("ip", "i") else DEFAULT_EPS
    else:
        eps = args.eps
    _validate_eps(eps, allow_zero=True)
    model = simulation_model()
    if args.quantity == "ip":
        report = fisher_parametric(model, eps)
    elif args.quantity in ("i", "ieps"):
        report = fisher_semiparametric(model, eps)
    elif args.quantity == "score1var":
        report = score1_asymptotic_variance(model, eps)
    elif args.quantity == "interceptvar":
        report = intercept_variance(model, eps, efficient=not args.simple)
    elif args.quantity == "popscore":
        report = population_score1(model, args.beta, eps)
    else:
        report = identifiability_integral(model, args.beta, eps)
    print(
        io.dump_json(
            {
                "quantity": args.quantity,
                "value": report.value,
                "eps": report.eps,
                "tol": report.quadrature_tol,
            }
        )
    )
    return 0


def _cmd_mc_table(args) -> int:
    _validate_eps(args.eps)
    _validate_interval(args.interval)
    _check(args.n >= 10, "--n must be at least 10")
    _check(args.reps >= 1, "--reps must be at least 1")
    _check(args.jobs >= 1, "--jobs must be at least 1")
    methods = tuple(m for m in args.methods.split(",") if m)
    _check(all(m in METHODS for m in methods), f"methods must be among {','.join(METHODS)}")
    _check(len(methods) > 0, "at least one method is required")
    cfg = MCConfig(
        n=args.n,
        n_reps=args.reps,
        methods=frozenset(methods),
        eps=args.eps,
        c_beta=args.c,
        c_alpha=args.c_alpha,
        master_seed=args.seed,
        parallelism=args.jobs,
        interval=args.interval,
        grid_points=args.grid_points,
    )
    table = run_montecarlo(simulation_model(), cfg, progress=_progress(args.reps))
    io.write_mc_table_csv(args.out, table)
    return 0


def _cmd_mse_curve(args) -> int:
    _validate_eps(args.eps)
    _validate_interval(args.interval)
    _check(args.n >= 10, "--n must be at least 10")
    _check(args.reps >= 1, "--reps must be at least 1")
    _check(args.jobs >= 1, "--jobs must be at least 1")
    _check(all(c > 0 for c in args.c_grid), "--c-grid entries must be positive")
    curve = mc_mse_curve(
        simulation_model(),
        args.n,
        args.reps,
        args.c_grid,
        TruncationSpec(args.eps),
        master_seed=args.seed,
        interval=args.interval,
        parallelism=args.jobs,
        progress=_progress(args.reps),
    )
    io.write_mse_curve_csv(args.out, curve, "montecarlo")
    return 0


def _cmd_bootstrap_bw(args) -> int:
    _validate_eps(args.eps)
    _validate_interval(args.interval)
    _check(args.B >= 1, "--B must be at least 1")
    _check(args.jobs >= 1, "--jobs must be at least 1")
    sample = _read_sample(args.input)
    bcfg = BootstrapConfig(c_grid=args.c_grid, c0=args.c0, B=args.B, seed=args.seed)
    result = bootstrap_bandwidth(
        sample,
        bcfg,
        TruncationSpec(args.eps),
        interval=args.interval,
        parallelism=args.jobs,
        progress=_progress(args.B),
    )
    if args.out:
        io.write_mse_curve_csv(args.out, result.mse_curve, "bootstrap")
    print(io.dump_json({"c_opt": result.c_opt, "B": args.B, "c0": args.c0, "n": sample.n}))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csreg",
        description="Current status linear regression: simulation, estimation, and analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a sample from the bundled uniform-design model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--beta0", type=float, default=0.5)
    p.add_argument("--out", required=True, help=".csv or .json output path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("mle", help="fixed-slope shape-constrained fit, exported as knot,value CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_mle)

    p = sub.add_parser("estimate", help="fit the slope (and intercept) by one method")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--input", default=None)
    p.add_argument("--n", type=int, default=None, help="simulate instead of reading --input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--c-alpha", dest="c_alpha", type=float, default=0.75)
    p.add_argument("--interval", type=_interval_type, default=DEFAULT_INTERVAL)
    p.add_argument("--grid-points", dest="grid_points", type=int, default=100)
    p.add_argument("--no-intercept", action="store_true")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("score-curve", help="tabulate one score function over a slope grid")
    p.add_argument("--input", required=True)
    p.add_argument("--score", choices=("psi1", "psi2", "psi3"), required=True)
    p.add_argument("--interval", type=_interval_type, default=DEFAULT_INTERVAL)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_score_curve)

    p = sub.add_parser("oracle", help="population quantities of the bundled model")
    p.add_argument(
        "--quantity",
        choices=("ip", "i", "ieps", "score1var", "interceptvar", "popscore", "ident"),
        required=True,
    )
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--simple", action="store_true", help="interceptvar: use the simple-score variance")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("mc-table", help="replicated estimation table (mean, n*variance, failures)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--c-alpha", dest="c_alpha", type=float, default=0.75)
    p.add_argument("--interval", type=_interval_type, default=DEFAULT_INTERVAL)
    p.add_argument("--grid-points", dest="grid_points", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mc_table)

    p = sub.add_parser("mse-curve", help="Monte Carlo MSE of the plug-in slope per bandwidth constant")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--c-grid", dest="c_grid", type=_grid_type, default=DEFAULT_C_GRID)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--interval", type=_interval_type, default=DEFAULT_INTERVAL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mse_curve)

    p = sub.add_parser("bootstrap-bw", help="bootstrap bandwidth selection for the plug-in slope")
    p.add_argument("--input", required=True)
    p.add_argument("--c-grid", dest="c_grid", type=_grid_type, default=DEFAULT_C_GRID)
    p.add_argument("--c0", type=float, default=0.25)
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--interval", type=_interval_type, default=DEFAULT_INTERVAL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bootstrap_bw)

    return parser


def dispatch(argv) -> int:
    """Run one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _ESTIMATION_ERRORS as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

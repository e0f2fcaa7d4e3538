"""Command-line interface: stats, solve, sweep, gen-instance.

Exit codes: 0 success, 2 I/O or parse error, 3 degenerate market,
4 solver non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .analysis import DEFAULT_ALPHAS, run_sweep
from .baselines import ideal_point, max_gain_portfolio, min_variance_portfolio, reference_point
from .instances import random_returns, returns_to_csv
from .market import CsvFormatError, estimate_model, load_returns
from .objectives import AreaProblem, area, objective_pair
from .report import OUTPUT_FORMATS, plot_data_csv, solve_report, stats_report, sweep_report
from .solver import (
    STATUS_CONVERGED,
    STATUS_DEGENERATE,
    ConvergenceError,
    DegenerateMarketError,
    SolverConfig,
    solve,
    starting_point,
)

__all__ = ["RunConfig", "main", "run"]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_NO_CONVERGENCE = 4


@dataclass(frozen=True)
class RunConfig:
    """Parsed options of one stats/solve/sweep invocation."""

    input_path: str
    date_column: bool = False
    reference_kind: str = "nadir"
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    tau_override: float | None = None
    stat_tol: float = 1e-5
    max_iter: int = 200_000
    output_format: str = "table"
    plot_data_path: str | None = None
    figure_path: str | None = None
    seed: int | None = None


def _parse_alphas(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse alpha list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("alpha list is empty")
    for a in values:
        if not 0.0 <= a <= 1.0:
            raise argparse.ArgumentTypeError(f"alpha {a} outside [0, 1]")
    return values


def _add_market_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--input", required=True, help="returns CSV path")
    sub.add_argument("--date-column", action="store_true",
                     help="first column holds dates; drop it")
    sub.add_argument("--reference", choices=("nadir", "worst"), default="nadir")
    sub.add_argument("--format", choices=OUTPUT_FORMATS, default="table")


def _add_solver_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--tau", type=float, default=None,
                     help="override the automatic stepsize min(0.1, 1.9/L)")
    sub.add_argument("--stat-tol", type=float, default=1e-5,
                     help="stop when one step moves less than this (infinity norm)")
    sub.add_argument("--max-iter", type=int, default=200_000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rectport",
        description="Select the portfolio maximizing the dominance-rectangle "
                    "area in the risk-gain plane.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    stats = commands.add_parser("stats", help="reference and ideal values of a market")
    _add_market_options(stats)

    solve_cmd = commands.add_parser("solve", help="compute the area-maximizing portfolio")
    _add_market_options(solve_cmd)
    _add_solver_options(solve_cmd)

    sweep = commands.add_parser("sweep", help="area method vs gain-floor scalarization sweep")
    _add_market_options(sweep)
    _add_solver_options(sweep)
    sweep.add_argument("--alphas", type=_parse_alphas,
                       default=DEFAULT_ALPHAS,
                       help="comma-separated gain-floor fractions in [0, 1]")
    sweep.add_argument("--plot-data", default=None,
                       help="write plot-ready (series, risk, gain) CSV here")
    sweep.add_argument("--figure", default=None,
                       help="render the sweep figure to this image file")

    gen = commands.add_parser("gen-instance", help="write a seeded synthetic returns CSV")
    gen.add_argument("--n", type=int, required=True, help="number of assets (>= 2)")
    gen.add_argument("--periods", type=int, default=120)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--output", required=True, help="destination CSV path")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        input_path=args.input,
        date_column=args.date_column,
        reference_kind=args.reference,
        alphas=tuple(getattr(args, "alphas", DEFAULT_ALPHAS)),
        tau_override=getattr(args, "tau", None),
        stat_tol=getattr(args, "stat_tol", 1e-5),
        max_iter=getattr(args, "max_iter", 200_000),
        output_format=args.format,
        plot_data_path=getattr(args, "plot_data", None),
        figure_path=getattr(args, "figure", None),
    )


def _load(config: RunConfig):
    returns = load_returns(config.input_path, date_column=config.date_column)
    return returns, estimate_model(returns)


def cmd_stats(config: RunConfig, out=None) -> int:
    out = out or sys.stdout
    returns, model = _load(config)
    x_mv = min_variance_portfolio(model)
    x_mg = max_gain_portfolio(model)
    ref = reference_point(model, config.reference_kind, x_min_var=x_mv, x_max_gain=x_mg)
    ideal = ideal_point(model, x_mv)
    out.write(stats_report(model.n, returns.n_periods, ref, ideal, config.output_format))
    return EXIT_OK


def cmd_solve(config: RunConfig, out=None) -> int:
    out = out or sys.stdout
    _, model = _load(config)
    x_mv = min_variance_portfolio(model)
    x_mg = max_gain_portfolio(model)
    ref = reference_point(model, config.reference_kind, x_min_var=x_mv, x_max_gain=x_mg)
    problem = AreaProblem(model=model, ref=ref)
    x0 = starting_point(problem)
    start_pair = objective_pair(model, x0)
    start_area = area(problem, x0)
    solver_config = SolverConfig(
        tau=config.tau_override,
        stat_tol=config.stat_tol,
        max_iter=config.max_iter,
    )
    result = solve(problem, solver_config, x0=x0)
    if result.status == STATUS_DEGENERATE:
        raise DegenerateMarketError("no portfolio with positive area exists")
    out.write(solve_report(model.labels(), result, start_pair, start_area, config.output_format))
    if result.status != STATUS_CONVERGED:
        print(
            f"warning: stopped after {result.iterations} iterations with residual "
            f"{result.stationarity_residual:.3e} above tolerance {config.stat_tol:.0e}",
            file=sys.stderr,
        )
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_sweep(config: RunConfig, out=None) -> int:
    out = out or sys.stdout
    _, model = _load(config)
    solver_config = SolverConfig(
        tau=config.tau_override,
        stat_tol=config.stat_tol,
        max_iter=config.max_iter,
    )
    frontier, _ = run_sweep(
        model,
        kind=config.reference_kind,
        alphas=config.alphas,
        solver_config=solver_config,
    )
    if frontier.degenerate:
        raise DegenerateMarketError("degenerate market: every portfolio has zero area")
    out.write(sweep_report(frontier, config.output_format))
    if config.plot_data_path:
        Path(config.plot_data_path).write_text(plot_data_csv(frontier), encoding="utf-8")
    if config.figure_path:
        from .figures import render_sweep_figure

        render_sweep_figure(config.figure_path, frontier,
                            title=Path(config.input_path).stem)
    return EXIT_OK


def cmd_gen_instance(n: int, periods: int, seed: int, output: str) -> int:
    returns = random_returns(n, periods=periods, seed=seed)
    Path(output).write_text(returns_to_csv(returns), encoding="utf-8")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen-instance":
            if args.n < 2:
                parser.error(f"--n must be at least 2, got {args.n}")
            if args.periods < 2:
                parser.error(f"--periods must be at least 2, got {args.periods}")
            return cmd_gen_instance(args.n, args.periods, args.seed, args.output)
        if getattr(args, "stat_tol", 1.0) <= 0.0:
            parser.error(f"--stat-tol must be positive, got {args.stat_tol}")
        if getattr(args, "tau", None) is not None and args.tau <= 0.0:
            parser.error(f"--tau must be positive, got {args.tau}")
        if getattr(args, "max_iter", 1) < 1:
            parser.error(f"--max-iter must be at least 1, got {args.max_iter}")
        config = _config_from_args(args)
        if args.command == "stats":
            return cmd_stats(config)
        if args.command == "solve":
            return cmd_solve(config)
        return cmd_sweep(config)
    except (CsvFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateMarketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

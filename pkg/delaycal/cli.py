"""
delaycal command line.

    python -m delaycal simulate --config configs/traj1_fixed.json --out out/sim
    python -m delaycal montecarlo --config configs/traj2_fixed.json --out out/mc --workers 4
    python -m delaycal identifiability --tau -1 --tau-prime -2 --out out/ident
    python -m delaycal report out/mc

Exit codes: 0 success, 1 runtime or numerical failure, 2 usage or config error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from delaycal.config import get_settings
from delaycal.consistency.service import excess_over_bound
from delaycal.errors import DelayCalError
from delaycal.export.csv_writer import (
    CONFIG_FILE,
    PER_STEP_FILE,
    PER_TRIAL_FILE,
    SUMMARY_FILE,
    TOTALS_FILE,
    TRACES_FILE,
    read_batch_dir,
    write_batch_summary_csv,
    write_batch_totals_csv,
    write_identifiability_csv,
    write_per_step_stats_csv,
    write_per_trial_csv,
    write_trace_csv,
    write_traces_csv,
)
from delaycal.export.svg_plot import Panel, PlotRenderer, Series, batch_panels, trace_panels
from delaycal.identifiability.service import example_pair, output_grid, pair_outputs, verify_pair
from delaycal.montecarlo.loader import dump_config, load_config
from delaycal.montecarlo.schemas import BatchResult, ExperimentConfig
from delaycal.montecarlo.service import aggregate_batch, run_batch, run_trial, trial_measurements
from delaycal.plant.service import write_measurements_csv

logger = logging.getLogger(__name__)

TRACE_FILE = "trace.csv"
MEASUREMENTS_FILE = "measurements.csv"
TRACE_PLOT = "trace_plot.svg"
BATCH_PLOT = "batch_plot.svg"
IDENTIFIABILITY_FILE = "identifiability.csv"
IDENTIFIABILITY_PLOT = "identifiability.svg"
MAX_DIFFERENCE_FILE = "max_difference.txt"


def _experiment_overrides(args: argparse.Namespace) -> List[str]:
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"master_seed={args.seed}")
    if getattr(args, "trials", None) is not None:
        overrides.append(f"n_trials={args.trials}")
    if args.traj is not None:
        overrides.append(f'trajectory="{args.traj}"')
    return overrides


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    return load_config(args.config, _experiment_overrides(args))


def _out_dir(path: Path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _echo_config(config: ExperimentConfig, out: Path) -> None:
    (out / CONFIG_FILE).write_text(dump_config(config))


def cmd_simulate(args: argparse.Namespace) -> int:
    """Single trial: trace CSV, measurement CSV and trace plot."""
    config = _resolve_config(args)
    out = _out_dir(args.out)
    _echo_config(config, out)

    trace = run_trial(config, args.trial)
    write_trace_csv(trace, out / TRACE_FILE)
    write_measurements_csv(trial_measurements(config, args.trial), out / MEASUREMENTS_FILE)
    title = f"{config.trajectory} trial {args.trial}: tau = {trace.tau_true * 1000:.1f} ms"
    PlotRenderer().write(title, trace_panels(trace), out / TRACE_PLOT)

    if trace.diverged:
        logger.warning(f"Trial diverged after {trace.steps_completed} steps: {trace.divergence_reason}")
    print(f"{trace.steps_completed} steps written to {out / TRACE_FILE}")
    return 0


def write_batch_outputs(result: BatchResult, out: Path, include_traces: bool = True) -> None:
    """Every batch artifact: config echo, tables and plot."""
    _echo_config(result.config, out)
    write_per_trial_csv(result.trials, out / PER_TRIAL_FILE)
    if include_traces:
        write_traces_csv(result.traces, out / TRACES_FILE)
    write_per_step_stats_csv(result.stats, out / PER_STEP_FILE)
    write_batch_summary_csv(result.stats, out / SUMMARY_FILE)
    write_batch_totals_csv(result.stats, out / TOTALS_FILE)
    title = f"{result.config.trajectory}: {result.config.n_trials} trials ({result.config.filter_kind})"
    PlotRenderer().write(title, batch_panels(result.stats), out / BATCH_PLOT)


def _print_summary(result: BatchResult) -> None:
    stats = result.stats
    lo, hi = stats.anees_interval
    last = len(stats.steps)
    print(f"trials: {stats.n_trials} (excluded {stats.n_excluded})")
    if last:
        print(f"ANEES at step {last}: {stats.anees[-1]:.4g} (95% interval [{lo:.4g}, {hi:.4g}])")
        print(f"ANEES / upper bound: {excess_over_bound(stats, last):.4g}")
        print(f"RMS position error at step {last}: {stats.rms_position[-1]:.4g} m")
        if stats.rms_delay_ms is not None:
            print(f"RMS delay error at step {last}: {stats.rms_delay_ms[-1]:.4g} ms")
    print(f"backward-time events: {stats.backward_time_events}")


def cmd_montecarlo(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    out = _out_dir(args.out)
    result = run_batch(config, workers=args.workers)
    write_batch_outputs(result, out)
    _print_summary(result)
    return 0


def cmd_identifiability(args: argparse.Namespace) -> int:
    """Build and verify an indistinguishable pair; write outputs and the max difference."""
    pair = example_pair(args.tau, args.tau_prime, x0=args.x0)
    difference = verify_pair(pair, args.grid_step)

    out = _out_dir(args.out)
    times = output_grid(pair.horizon, args.grid_step)
    y, y_prime = pair_outputs(pair, times)
    write_identifiability_csv(pair, times, y, y_prime, out / IDENTIFIABILITY_FILE)
    (out / MAX_DIFFERENCE_FILE).write_text(f"{difference:.17g}\n")

    grid = times.tolist()
    panels = [
        Panel(
            "Outputs y, y'",
            [
                Series("y", grid, y.tolist()),
                Series("y'", grid, y_prime.tolist(), color="#d62728", dashed=True),
            ],
        ),
        Panel(
            "Controls u, u'",
            [
                Series("u", grid, [pair.u.value_at(t) for t in grid]),
                Series("u'", grid, [pair.u_prime.value_at(t) for t in grid], color="#d62728", dashed=True),
            ],
        ),
    ]
    PlotRenderer().write(f"tau = {args.tau}, tau' = {args.tau_prime}", panels, out / IDENTIFIABILITY_PLOT)
    print(f"max |y - y'| on [0, {pair.horizon}]: {difference:.3e}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    """Recompute tables and plots from a stored batch directory."""
    config, traces = read_batch_dir(args.batch_dir)
    out = _out_dir(args.out if args.out is not None else args.batch_dir)
    result = aggregate_batch(config, traces)
    write_batch_outputs(result, out, include_traces=Path(out) != Path(args.batch_dir))
    _print_summary(result)
    return 0


def _add_experiment_arguments(parser: argparse.ArgumentParser, default_out: str) -> None:
    parser.add_argument("--config", type=Path, default=None, help="experiment config JSON")
    parser.add_argument("--out", type=Path, default=Path(default_out), help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="master seed override")
    parser.add_argument("--traj", choices=["traj1", "traj2"], default=None, help="trajectory preset")
    parser.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override a config field (dotted keys for nested fields; repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delaycal",
        description="Joint state and time-delay estimation experiments",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="run one trial and plot it")
    _add_experiment_arguments(simulate, "out/simulate")
    simulate.add_argument("--trial", type=int, default=0, help="trial index to replay")
    simulate.set_defaults(handler=cmd_simulate)

    montecarlo = commands.add_parser("montecarlo", help="run a Monte Carlo batch")
    _add_experiment_arguments(montecarlo, "out/montecarlo")
    montecarlo.add_argument("--trials", type=int, default=None, help="number of trials")
    montecarlo.add_argument("--workers", type=int, default=None, help="worker processes")
    montecarlo.set_defaults(handler=cmd_montecarlo)

    ident = commands.add_parser("identifiability", help="indistinguishable delay pair demo")
    ident.add_argument("--tau", type=float, required=True, help="delay of the first system [s]")
    ident.add_argument("--tau-prime", type=float, required=True, help="delay of the second system [s]")
    ident.add_argument("--x0", type=float, default=0.0, help="common state at t = 0")
    ident.add_argument("--grid-step", type=float, default=1e-4, help="verification grid step [s]")
    ident.add_argument("--out", type=Path, default=Path("out/identifiability"), help="output directory")
    ident.set_defaults(handler=cmd_identifiability)

    report = commands.add_parser("report", help="rebuild tables and plots from a batch directory")
    report.add_argument("batch_dir", type=Path, help="directory written by montecarlo")
    report.add_argument("--out", type=Path, default=None, help="output directory (default: batch_dir)")
    report.set_defaults(handler=cmd_report)

    return parser


def configure_logging() -> None:
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format=settings.LOG_FORMAT,
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging()
    try:
        return args.handler(args)
    except DelayCalError as exc:
        logger.error(str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:
        logger.exception(f"Unexpected failure: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""
CSV Export

Writers for traces, per-trial summaries and batch statistics, and the
readers `report` uses to rebuild a batch from disk. Floats are written with
17 significant digits so a written batch reads back bit-identical.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from delaycal.consistency.schemas import BatchStats, TrialTrace
from delaycal.consistency.service import summary_table, table_columns
from delaycal.errors import ConfigError, ReportInputError
from delaycal.identifiability.schemas import IndistinguishablePair
from delaycal.montecarlo.loader import validate_config
from delaycal.montecarlo.schemas import ExperimentConfig, TrialSummary

logger = logging.getLogger(__name__)

CONFIG_FILE = "config.json"
PER_TRIAL_FILE = "per_trial.csv"
TRACES_FILE = "traces.csv"
PER_STEP_FILE = "per_step_stats.csv"
SUMMARY_FILE = "batch_summary.csv"
TOTALS_FILE = "batch_totals.csv"
REPORT_INPUTS = (CONFIG_FILE, PER_TRIAL_FILE, TRACES_FILE)

TRACE_COLUMNS = [
    "k", "t_k", "x_hat", "tau_hat", "e_x", "e_tau", "P_xx", "P_xtau", "P_tautau",
    "e_y", "S", "S_state", "nis", "nees", "interval", "backward",
]
PER_TRIAL_COLUMNS = [
    "trial_index", "seed", "tau_true", "x0_true", "final_tau_hat", "diverged",
    "divergence_reason", "backward_time_events", "steps_completed",
]


def fmt(value) -> str:
    """17-significant-digit text for floats; empty for None; labels pass through."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(value) for value in row])
    logger.info(f"Wrote {path}")
    return path


def _trace_rows(trace: TrialTrace) -> List[list]:
    rows = []
    augmented = trace.dim == 2
    for i in range(trace.steps_completed):
        P = trace.P[i]
        rows.append([
            trace.k[i],
            trace.t_k[i],
            trace.x_hat[i],
            trace.tau_hat[i],
            trace.e_x[i, 0],
            trace.e_x[i, 1] if augmented else None,
            P[0, 0],
            P[0, 1] if augmented else None,
            P[1, 1] if augmented else None,
            trace.e_y[i],
            trace.S[i],
            trace.S_state[i],
            trace.nis[i],
            trace.nees[i],
            trace.interval[i],
            bool(trace.backward[i]),
        ])
    return rows


def write_trace_csv(trace: TrialTrace, path: Path) -> Path:
    """One row per completed step of a single trial."""
    return _write_rows(path, TRACE_COLUMNS, _trace_rows(trace))


def write_traces_csv(traces: Sequence[TrialTrace], path: Path) -> Path:
    """All trials in long format, ordered by trial index then step."""
    ordered = sorted(traces, key=lambda t: t.trial_index)
    rows = ([trace.trial_index] + row for trace in ordered for row in _trace_rows(trace))
    return _write_rows(path, ["trial_index"] + TRACE_COLUMNS, rows)


def write_per_trial_csv(trials: Sequence[TrialSummary], path: Path) -> Path:
    rows = (
        [
            trial.trial_index,
            trial.seed,
            trial.tau_true,
            trial.x0_true,
            trial.final_tau_hat,
            trial.diverged,
            trial.divergence_reason,
            trial.backward_time_events,
            trial.steps_completed,
        ]
        for trial in sorted(trials, key=lambda t: t.trial_index)
    )
    return _write_rows(path, PER_TRIAL_COLUMNS, rows)


def write_per_step_stats_csv(stats: BatchStats, path: Path) -> Path:
    header = [
        "step", "rms_position_m", "rms_delay_ms", "anees", "anees_lo", "anees_hi",
        "mean_nis", "nis_lo", "nis_hi", "nis_exceed_frac",
        "containment_position_3sigma", "containment_delay_3sigma",
    ]
    rows = []
    for i, step in enumerate(stats.steps):
        rows.append([
            int(step),
            stats.rms_position[i],
            stats.rms_delay_ms[i] if stats.rms_delay_ms is not None else None,
            stats.anees[i],
            stats.anees_interval[0],
            stats.anees_interval[1],
            stats.mean_nis[i],
            stats.nis_interval[0],
            stats.nis_interval[1],
            stats.nis_exceed_frac[i],
            stats.containment_position[i],
            stats.containment_delay[i] if stats.containment_delay is not None else None,
        ])
    return _write_rows(path, header, rows)


def write_batch_summary_csv(stats: BatchStats, path: Path) -> Path:
    """Table-shaped summary: one row per metric, one column per table step."""
    columns = table_columns(stats)
    rows = ([metric] + values for metric, values in summary_table(stats).items())
    return _write_rows(path, ["metric"] + [str(step) for step in columns], rows)


def write_batch_totals_csv(stats: BatchStats, path: Path) -> Path:
    rows = [
        ["dof", stats.dof],
        ["n_trials", stats.n_trials],
        ["n_excluded", stats.n_excluded],
        ["anees_lo", stats.anees_interval[0]],
        ["anees_hi", stats.anees_interval[1]],
        ["nis_lo", stats.nis_interval[0]],
        ["nis_hi", stats.nis_interval[1]],
        ["apparent_divergence_frac", stats.apparent_divergence_frac],
        ["backward_time_events", stats.backward_time_events],
        ["mean_signed_integration_s", stats.mean_signed_integration],
        ["mean_abs_integration_s", stats.mean_abs_integration],
        ["nominal_elapsed_s", stats.nominal_elapsed],
    ]
    return _write_rows(path, ["metric", "value"], rows)


def write_identifiability_csv(
    pair: IndistinguishablePair,
    times: np.ndarray,
    y: np.ndarray,
    y_prime: np.ndarray,
    path: Path,
) -> Path:
    """Columns t, y, y', u, u' on the verification grid."""
    rows = (
        [t, a, b, pair.u.value_at(t), pair.u_prime.value_at(t)]
        for t, a, b in zip(times.tolist(), y.tolist(), y_prime.tolist())
    )
    return _write_rows(path, ["t", "y", "y_prime", "u", "u_prime"], rows)


def _read_rows(path: Path) -> List[Dict[str, str]]:
    with Path(path).open(newline="") as handle:
        return list(csv.DictReader(handle))


def _check_inputs(batch_dir: Path) -> None:
    batch_dir = Path(batch_dir)
    if not batch_dir.is_dir():
        raise ReportInputError(f"batch directory not found: {batch_dir}")
    present = [name for name in REPORT_INPUTS if (batch_dir / name).is_file()]
    if not present:
        raise ReportInputError(f"{batch_dir} contains no batch outputs")
    for name in REPORT_INPUTS:
        if name not in present:
            raise ReportInputError(f"{batch_dir} is missing {name}")


def read_batch_dir(batch_dir: Path) -> Tuple[ExperimentConfig, List[TrialTrace]]:
    """
    Rebuild the config and every trace of a stored batch.

    Raises:
        ReportInputError: directory empty, or a required file missing or unreadable
    """
    batch_dir = Path(batch_dir)
    _check_inputs(batch_dir)
    try:
        config = validate_config(json.loads((batch_dir / CONFIG_FILE).read_text()))
    except (json.JSONDecodeError, ConfigError) as exc:
        raise ReportInputError(f"{batch_dir / CONFIG_FILE} is not a valid config: {exc}") from exc

    dim = config.dof
    steps: Dict[int, List[Dict[str, str]]] = {}
    for row in _read_rows(batch_dir / TRACES_FILE):
        steps.setdefault(int(row["trial_index"]), []).append(row)

    traces = []
    try:
        for trial in _read_rows(batch_dir / PER_TRIAL_FILE):
            index = int(trial["trial_index"])
            traces.append(_trace_from_rows(trial, steps.get(index, []), dim))
    except (KeyError, ValueError) as exc:
        raise ReportInputError(f"malformed batch files in {batch_dir}: {exc}") from exc

    if len(traces) != config.n_trials:
        raise ReportInputError(
            f"{PER_TRIAL_FILE} holds {len(traces)} trials but config asks for {config.n_trials}"
        )
    logger.info(f"Read {len(traces)} trials from {batch_dir}")
    return config, traces


def _trace_from_rows(trial: Dict[str, str], rows: List[Dict[str, str]], dim: int) -> TrialTrace:
    def column(name: str) -> np.ndarray:
        return np.array([float(row[name]) for row in rows], dtype=float)

    if dim == 2:
        e_x = np.column_stack([column("e_x"), column("e_tau")]) if rows else np.empty((0, 2))
        P = np.array(
            [
                [[float(r["P_xx"]), float(r["P_xtau"])], [float(r["P_xtau"]), float(r["P_tautau"])]]
                for r in rows
            ],
            dtype=float,
        ).reshape(-1, 2, 2)
    else:
        e_x = column("e_x").reshape(-1, 1)
        P = column("P_xx").reshape(-1, 1, 1)

    return TrialTrace(
        trial_index=int(trial["trial_index"]),
        seed=int(trial["seed"]),
        tau_true=float(trial["tau_true"]),
        x0_true=float(trial["x0_true"]),
        k=np.array([int(row["k"]) for row in rows], dtype=int),
        t_k=column("t_k"),
        x_hat=column("x_hat"),
        tau_hat=column("tau_hat"),
        e_x=e_x,
        e_y=column("e_y"),
        S=column("S"),
        S_state=column("S_state"),
        P=P,
        nis=column("nis"),
        nees=column("nees"),
        interval=column("interval"),
        backward=np.array([row["backward"] == "1" for row in rows], dtype=bool),
        diverged=trial["diverged"] == "1",
        divergence_reason=trial["divergence_reason"] or None,
    )

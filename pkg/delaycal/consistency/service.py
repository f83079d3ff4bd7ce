"""
Consistency Service

NIS/NEES/ANEES, per-step RMS errors, 3-sigma containment and the derived
batch statistics. All reductions over trials use compensated summation so
results do not depend on the order trials finished in.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from delaycal.consistency.chi2 import chi2_anees_interval, chi2_quantile
from delaycal.consistency.schemas import BatchStats, TrialTrace
from delaycal.errors import ArgumentError, NumericalFailureError

logger = logging.getLogger(__name__)

TABLE_STEPS = (20, 40, 60, 80, 100)
_COMPONENTS = {"position": 0, "delay": 1}


def nis(e_y: float, S: float) -> float:
    """Normalized innovation squared e_y^2 / S."""
    if not S > 0.0:
        raise NumericalFailureError(f"innovation variance must be positive (S={S})")
    return e_y * e_y / S


def nees(e_x, P) -> float:
    """Normalized estimation error squared e_x^T P^-1 e_x."""
    e = np.atleast_1d(np.asarray(e_x, dtype=float))
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if not abs(np.linalg.det(P)) > 1e-300:
        raise NumericalFailureError("covariance is singular; NEES undefined")
    return float(e @ np.linalg.solve(P, e))


def _valid(traces: Sequence[TrialTrace]) -> List[TrialTrace]:
    return sorted((t for t in traces if not t.diverged), key=lambda t: t.trial_index)


def _component_index(traces: Sequence[TrialTrace], component: str) -> int:
    if component not in _COMPONENTS:
        raise ArgumentError(f"unknown component '{component}' (choose position or delay)")
    index = _COMPONENTS[component]
    if traces and index >= traces[0].dim:
        raise ArgumentError(f"component '{component}' not estimated by this filter")
    return index


def _column(traces: Sequence[TrialTrace], step: int, getter) -> List[float]:
    if step < 1:
        raise ArgumentError("steps are numbered from 1")
    return [float(getter(trace)[step - 1]) for trace in traces]


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values) if values else float("nan")


def anees(traces: Sequence[TrialTrace], step: int) -> Tuple[float, int]:
    """
    Average NEES at a step over non-diverged trials.

    Steps whose NEES is undefined (NaN, singular covariance) are left out of
    the average.

    Returns:
        (ANEES, number of excluded diverged trials)
    """
    valid = _valid(traces)
    defined = [value for value in _column(valid, step, lambda t: t.nees) if math.isfinite(value)]
    return _mean(defined), len(traces) - len(valid)


def rms_per_step(traces: Sequence[TrialTrace], field: str) -> np.ndarray:
    """Root mean square of the position or delay error at each step."""
    valid = _valid(traces)
    index = _component_index(valid, field)
    if not valid:
        return np.array([])
    n_steps = min(t.steps_completed for t in valid)
    squares = np.stack([t.e_x[:n_steps, index] ** 2 for t in valid])
    return np.array([math.sqrt(_mean(column)) for column in squares.T.tolist()])


def containment_3sigma(traces: Sequence[TrialTrace], step: int, component: str) -> float:
    """Fraction of trials with |e| <= 3 sqrt(P_ii) at the step (closed bound)."""
    if step < 1:
        raise ArgumentError("steps are numbered from 1")
    valid = _valid(traces)
    index = _component_index(valid, component)
    if not valid:
        return float("nan")
    inside = sum(
        1
        for t in valid
        if abs(t.e_x[step - 1, index]) <= 3.0 * math.sqrt(max(t.P[step - 1, index, index], 0.0))
    )
    return inside / len(valid)


def nis_exceed_fraction(traces: Sequence[TrialTrace], step: int, confidence: float = 0.95) -> float:
    """Fraction of trials whose NIS exceeds the one-dof quantile at the step."""
    valid = _valid(traces)
    if not valid:
        return float("nan")
    threshold = chi2_quantile(confidence, 1)
    return sum(1 for value in _column(valid, step, lambda t: t.nis) if value > threshold) / len(valid)


def shows_apparent_divergence(trace: TrialTrace, window: int = 20) -> bool:
    """
    True when the delay estimate has settled yet excludes the truth.

    Settled: the range of tau_hat over the final window is within the final
    3-sigma delay bound. Biased: the final delay error lies outside it.
    """
    if trace.diverged or trace.dim < 2 or trace.steps_completed < window:
        return False
    bound = 3.0 * math.sqrt(max(trace.P[-1, 1, 1], 0.0))
    recent = trace.tau_hat[-window:]
    settled = float(np.max(recent) - np.min(recent)) <= bound
    return settled and abs(float(trace.e_x[-1, 1])) > bound


def compute_batch_stats(
    traces: Sequence[TrialTrace],
    meas_period: float,
    confidence: float = 0.95,
    window: int = 20,
) -> BatchStats:
    """
    Aggregate a batch of traces.

    Args:
        traces: one trace per trial (any order)
        meas_period: nominal time between measurements [s]
        confidence: two-sided confidence for the ANEES/NIS intervals
        window: final-window length for the apparent divergence test
    """
    traces = sorted(traces, key=lambda t: t.trial_index)
    valid = _valid(traces)
    n_excluded = len(traces) - len(valid)
    if n_excluded:
        logger.warning(f"{n_excluded} of {len(traces)} trials diverged and are excluded")

    dof = traces[0].dim if traces else 2
    n_steps = min((t.steps_completed for t in valid), default=0)
    steps = np.arange(1, n_steps + 1)
    n_used = max(len(valid), 1)

    def per_step(fn) -> np.ndarray:
        return np.array([fn(step) for step in steps], dtype=float)

    has_delay = dof >= 2
    integration_signed = [math.fsum(t.interval.tolist()) for t in valid]
    integration_abs = [math.fsum(np.abs(t.interval).tolist()) for t in valid]

    return BatchStats(
        steps=steps,
        dof=dof,
        n_trials=len(traces),
        n_excluded=n_excluded,
        rms_position=rms_per_step(valid, "position")[:n_steps] if valid else np.array([]),
        rms_delay_ms=(1000.0 * rms_per_step(valid, "delay")[:n_steps] if valid else np.array([]))
        if has_delay
        else None,
        anees=per_step(lambda s: anees(valid, s)[0]),
        anees_interval=chi2_anees_interval(dof, n_used, confidence),
        mean_nis=per_step(lambda s: _mean(_column(valid, s, lambda t: t.nis))),
        nis_interval=chi2_anees_interval(1, n_used, confidence),
        nis_exceed_frac=per_step(lambda s: nis_exceed_fraction(valid, s, confidence)),
        containment_position=per_step(lambda s: containment_3sigma(valid, s, "position")),
        containment_delay=per_step(lambda s: containment_3sigma(valid, s, "delay")) if has_delay else None,
        apparent_divergence_frac=(
            sum(1 for t in valid if shows_apparent_divergence(t, window)) / len(valid) if valid else float("nan")
        ),
        backward_time_events=sum(t.backward_time_events for t in traces),
        mean_signed_integration=_mean(integration_signed),
        mean_abs_integration=_mean(integration_abs),
        nominal_elapsed=n_steps * meas_period,
    )


def summary_table(stats: BatchStats, steps: Sequence[int] = TABLE_STEPS) -> Dict[str, List[float]]:
    """Rows of metric values at the table steps (only steps that were run)."""
    columns = [s for s in steps if s <= len(stats.steps)]
    rows: Dict[str, List[float]] = {
        "rms_position_m": [float(stats.rms_position[s - 1]) for s in columns],
    }
    if stats.rms_delay_ms is not None:
        rows["rms_delay_ms"] = [float(stats.rms_delay_ms[s - 1]) for s in columns]
    rows["anees"] = [float(stats.anees[s - 1]) for s in columns]
    rows["mean_nis"] = [float(stats.mean_nis[s - 1]) for s in columns]
    rows["nis_exceed_frac"] = [float(stats.nis_exceed_frac[s - 1]) for s in columns]
    rows["containment_position_3sigma"] = [float(stats.containment_position[s - 1]) for s in columns]
    if stats.containment_delay is not None:
        rows["containment_delay_3sigma"] = [float(stats.containment_delay[s - 1]) for s in columns]
    return rows


def table_columns(stats: BatchStats, steps: Sequence[int] = TABLE_STEPS) -> List[int]:
    return [s for s in steps if s <= len(stats.steps)]


def excess_over_bound(stats: BatchStats, step: int) -> Optional[float]:
    """ANEES at the step divided by the upper interval bound."""
    if step > len(stats.steps):
        return None
    return float(stats.anees[step - 1]) / stats.anees_interval[1]

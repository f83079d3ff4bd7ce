"""
Monte Carlo Service

Runs single trials and whole batches. Each trial draws, in order: the delay
(standard normal scaled by the sampled std, ignored in fixed mode), the true
initial position offset, then one measurement noise draw per step. Numerical
failures inside a trial are recorded as divergence, never raised. A singular
covariance leaves that step's NEES undefined (NaN) and the trial continues.
"""

import logging
import math
from functools import partial
from multiprocessing import Pool
from typing import Iterable, List, Optional

import numpy as np

from delaycal.config import resolve_worker_count
from delaycal.consistency.schemas import TrialTrace
from delaycal.consistency.service import compute_batch_stats, nees, nis
from delaycal.errors import CoverageError, DivergenceError, NumericalFailureError
from delaycal.filter_core.baseline import baseline_step_known_delay
from delaycal.filter_core.ekf import step
from delaycal.filter_core.schemas import FilterState, ScalarFilterState
from delaycal.montecarlo.schemas import BatchResult, ExperimentConfig, SampledDelay, TrialSummary
from delaycal.montecarlo.seeding import derive_trial_seed, trial_rng
from delaycal.plant.schemas import MeasurementRecord
from delaycal.plant.service import control_stream, measure

logger = logging.getLogger(__name__)

_TRIAL_FAILURES = (CoverageError, NumericalFailureError, DivergenceError)


def draw_trial_inputs(config: ExperimentConfig, seed: int):
    """
    Random inputs of one trial.

    Returns:
        (tau_true, x0_true, noise draws of length horizon_steps)
    """
    rng = trial_rng(seed)
    z_tau = rng.standard_normal()
    if isinstance(config.delay_mode, SampledDelay):
        tau_true = z_tau * config.delay_mode.std
    else:
        tau_true = config.delay_mode.value
    x0_true = config.x_hat0 + math.sqrt(config.P0[0][0]) * rng.standard_normal()
    noise = config.meas_noise_std * rng.standard_normal(config.horizon_steps)
    return float(tau_true), float(x0_true), noise


def _setup_trial(config: ExperimentConfig, trial_index: int):
    seed = derive_trial_seed(config.master_seed, trial_index)
    tau_true, x0_true, noise = draw_trial_inputs(config, seed)
    truth = config.trajectory_model().shifted_to(0.0, x0_true)
    return seed, tau_true, x0_true, truth, config.plant_config(tau_true), noise


def run_trial(config: ExperimentConfig, trial_index: int) -> TrialTrace:
    """
    Run one filter over horizon_steps measurements.

    Deterministic given (config, trial_index). A trial that fails keeps the
    steps completed before the failure and is marked diverged.
    """
    seed, tau_true, x0_true, truth, plant, noise = _setup_trial(config, trial_index)
    noise_model = config.noise_model()
    controls = control_stream(
        truth,
        config.control_rate,
        config.horizon + config.control_margin,
        start=-config.control_margin,
    )

    augmented = config.filter_kind == "augmented"
    if augmented:
        state = FilterState.initial(config.x_hat0, config.tau_hat0, config.P0)
    else:
        state = ScalarFilterState(x_hat=config.x_hat0, P=config.P0[0][0])

    fields = ("k", "t_k", "x_hat", "tau_hat", "e_x", "e_y", "S", "S_state", "P", "nis", "nees", "interval", "backward")
    rows = {name: [] for name in fields}
    diverged = False
    reason: Optional[str] = None

    for k in range(1, config.horizon_steps + 1):
        meas = measure(truth, plant, k, float(noise[k - 1]))
        try:
            if augmented:
                state, report = step(
                    state,
                    meas,
                    controls,
                    noise_model,
                    time_shift=config.time_shift,
                    joseph_form=config.joseph_form,
                )
                tau_hat = state.tau_hat
                P = state.P
            else:
                state, report = baseline_step_known_delay(
                    state, meas, controls, tau_true, noise_model, joseph_form=config.joseph_form
                )
                tau_hat = tau_true
                P = state.P_matrix

            t_ref = meas.t_k + tau_hat if config.error_reference == "estimate_time" else meas.t_k
            position_error = state.x_hat - float(truth.position(t_ref))
            e_x = np.array([position_error, tau_hat - tau_true]) if augmented else np.array([position_error])
            if not np.all(np.isfinite(e_x)) or np.max(np.abs(e_x)) > config.divergence_cap:
                raise DivergenceError(f"error exceeds divergence cap {config.divergence_cap}")
            step_nis = nis(report.e_y, report.S)
        except _TRIAL_FAILURES as exc:
            diverged = True
            reason = f"{type(exc).__name__}: {exc}"
            logger.debug(f"Trial {trial_index} diverged at step {k}: {reason}")
            break

        try:
            step_nees = nees(e_x, P)
        except NumericalFailureError as exc:
            logger.debug(f"Trial {trial_index} step {k}: {exc}")
            step_nees = float("nan")

        rows["k"].append(k)
        rows["t_k"].append(meas.t_k)
        rows["x_hat"].append(state.x_hat)
        rows["tau_hat"].append(tau_hat)
        rows["e_x"].append(e_x)
        rows["e_y"].append(report.e_y)
        rows["S"].append(report.S)
        rows["S_state"].append(report.S_state)
        rows["P"].append(np.array(P, dtype=float))
        rows["nis"].append(step_nis)
        rows["nees"].append(step_nees)
        rows["interval"].append(report.interval)
        rows["backward"].append(report.backward_time_flag)

    dim = 2 if augmented else 1
    return TrialTrace(
        trial_index=trial_index,
        seed=seed,
        tau_true=tau_true,
        x0_true=x0_true,
        k=np.array(rows["k"], dtype=int),
        t_k=np.array(rows["t_k"], dtype=float),
        x_hat=np.array(rows["x_hat"], dtype=float),
        tau_hat=np.array(rows["tau_hat"], dtype=float),
        e_x=np.array(rows["e_x"], dtype=float).reshape(-1, dim),
        e_y=np.array(rows["e_y"], dtype=float),
        S=np.array(rows["S"], dtype=float),
        S_state=np.array(rows["S_state"], dtype=float),
        P=np.array(rows["P"], dtype=float).reshape(-1, dim, dim),
        nis=np.array(rows["nis"], dtype=float),
        nees=np.array(rows["nees"], dtype=float),
        interval=np.array(rows["interval"], dtype=float),
        backward=np.array(rows["backward"], dtype=bool),
        diverged=diverged,
        divergence_reason=reason,
    )


def aggregate_batch(config: ExperimentConfig, traces: Iterable[TrialTrace]) -> BatchResult:
    """Build a BatchResult from traces given in any order."""
    ordered = sorted(traces, key=lambda trace: trace.trial_index)
    stats = compute_batch_stats(
        ordered,
        meas_period=config.meas_period,
        window=config.apparent_divergence_window,
    )
    return BatchResult(
        config=config,
        trials=[TrialSummary.from_trace(trace) for trace in ordered],
        stats=stats,
        traces=ordered,
    )


def run_batch(config: ExperimentConfig, workers: Optional[int] = None) -> BatchResult:
    """
    Run n_trials trials and aggregate them.

    Args:
        config: validated experiment configuration
        workers: requested worker processes (capped by DELAYCAL_THREADS)

    Returns:
        BatchResult; identical for every worker count
    """
    n_workers = min(resolve_worker_count(workers), config.n_trials)
    logger.info(
        f"Running {config.n_trials} trials on {config.trajectory} "
        f"({config.filter_kind}, {config.delay_mode.kind} delay) with {n_workers} worker(s)"
    )

    task = partial(run_trial, config)
    indices = range(config.n_trials)
    if n_workers == 1:
        traces: List[TrialTrace] = [task(i) for i in indices]
    else:
        chunksize = max(1, config.n_trials // (4 * n_workers))
        with Pool(processes=n_workers) as pool:
            traces = pool.map(task, indices, chunksize=chunksize)

    result = aggregate_batch(config, traces)
    if result.n_diverged:
        logger.warning(f"{result.n_diverged} of {config.n_trials} trials diverged")
    logger.info(f"Batch finished: {result.stats.backward_time_events} backward-time events")
    return result


def trial_measurements(config: ExperimentConfig, trial_index: int) -> List[MeasurementRecord]:
    """The measurement stream run_trial feeds the filter for this trial."""
    _, _, _, truth, plant, noise = _setup_trial(config, trial_index)
    return [measure(truth, plant, k, float(noise[k - 1])) for k in range(1, config.horizon_steps + 1)]

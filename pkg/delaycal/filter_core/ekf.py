"""
Augmented-State Hybrid EKF

State [x, tau]^T. The mean is integrated in continuous time from the
sampled reference-sensor controls (zero-order hold), the covariance grows as
P_dot = Q, and each measurement y_k = x(t_k + tau) + v_k is applied after
propagating to t_k + tau_hat_{k-1}, linearized with H_k = [1, u(t_k + tau_hat_{k-1})].

Propagation that would run backwards in time integrates the mean backwards
with the same held controls and still adds Qx*|dt| process noise, so the
covariance never shrinks during a time update.
"""

import logging
from dataclasses import replace
from typing import Literal, Tuple

import numpy as np

from delaycal.errors import DivergenceError, NumericalFailureError
from delaycal.filter_core.schemas import FilterState, NoiseModel, UpdateReport
from delaycal.plant.schemas import ControlStream, MeasurementRecord

logger = logging.getLogger(__name__)

TimeShiftMode = Literal["naive", "reset"]

_IDENTITY = np.eye(2)


def propagate(
    state: FilterState,
    controls: ControlStream,
    t_target: float,
    noise: NoiseModel,
) -> FilterState:
    """
    Time update from state.integrated_to to t_target.

    Args:
        state: current filter state
        controls: sampled control stream covering the signed interval
        t_target: time to propagate to [s]
        noise: process/measurement noise model

    Returns:
        Propagated state; last_interval < 0 marks a backwards propagation

    Raises:
        CoverageError: controls do not cover the interval
    """
    dt = t_target - state.integrated_to
    if dt == 0.0:
        return replace(state, filter_time=t_target, last_interval=0.0)

    dx = controls.integrate(state.integrated_to, t_target)
    P = state.P + noise.Q * abs(dt)
    if dt < 0.0:
        logger.debug(f"Backwards propagation {state.integrated_to:.6f} -> {t_target:.6f} s")

    return FilterState(
        x_hat=state.x_hat + dx,
        tau_hat=state.tau_hat,
        P=P,
        filter_time=t_target,
        integrated_to=t_target,
        last_interval=dt,
    )


def measurement_jacobian(u_at_predicted_time: float) -> np.ndarray:
    """H_k = [1, u(t_k + tau_hat_{k-1})]."""
    return np.array([1.0, float(u_at_predicted_time)])


def state_innovation_variance(H: np.ndarray, P: np.ndarray) -> float:
    """H P H^T, the state uncertainty projected into measurement space."""
    return float(H @ P @ H)


def innovation_variance(H: np.ndarray, P: np.ndarray, R: float) -> float:
    """S = H P H^T + R."""
    return state_innovation_variance(H, P) + R


def update(
    state: FilterState,
    y_k: float,
    H: np.ndarray,
    noise: NoiseModel,
    joseph_form: bool = False,
) -> Tuple[FilterState, UpdateReport]:
    """
    Measurement update with h(x_hat^-) = x_hat^- (the propagated position).

    Args:
        state: state already propagated to t_k + tau_hat_{k-1}
        y_k: measurement [m]
        H: measurement Jacobian
        noise: noise model supplying R
        joseph_form: use the Joseph covariance update instead of (I - KH)P

    Returns:
        (updated state, UpdateReport)

    Raises:
        NumericalFailureError: S <= 0
        DivergenceError: non-finite result
    """
    P = state.P
    S_state = state_innovation_variance(H, P)
    S = S_state + noise.R
    if not S > 0.0:
        raise NumericalFailureError(f"innovation variance is not positive (S={S})")

    K = (P @ H) / S
    e_y = y_k - state.x_hat
    x_hat = state.x_hat + K[0] * e_y
    tau_hat = state.tau_hat + K[1] * e_y

    I_KH = _IDENTITY - np.outer(K, H)
    if joseph_form:
        P_new = I_KH @ P @ I_KH.T + noise.R * np.outer(K, K)
    else:
        P_new = I_KH @ P
    P_new = (P_new + P_new.T) / 2.0

    delta_tau = tau_hat - state.tau_hat
    updated = replace(
        state,
        x_hat=x_hat,
        tau_hat=tau_hat,
        P=P_new,
        filter_time=state.filter_time + delta_tau,
    )
    if not updated.is_finite():
        raise DivergenceError("filter state became non-finite after update")

    report = UpdateReport(
        e_y=e_y,
        S=S,
        S_state=S_state,
        K=K,
        delta_tau=delta_tau,
        interval=state.last_interval,
        backward_time_flag=state.last_interval < 0.0,
        H=H,
    )
    return updated, report


def step(
    state: FilterState,
    meas: MeasurementRecord,
    controls: ControlStream,
    noise: NoiseModel,
    time_shift: TimeShiftMode = "naive",
    joseph_form: bool = False,
) -> Tuple[FilterState, UpdateReport]:
    """
    One full filter cycle for measurement k.

    Propagates to t_k + tau_hat_{k-1}, linearizes with the control sample
    nearest-not-after that time, and applies the update. Afterwards the
    estimate refers to t_k + tau_hat_k. In "naive" mode the process model
    clock stays at t_k + tau_hat_{k-1}, so the next interval is
    t_{k+1} - t_k + delta_tau and may be negative; "reset" moves the clock
    to t_k + tau_hat_k.
    """
    t_pred = meas.t_k + state.tau_hat
    prior = propagate(state, controls, t_pred, noise)
    H = measurement_jacobian(controls.value_at(t_pred))
    posterior, report = update(prior, meas.y_k, H, noise, joseph_form=joseph_form)
    if time_shift == "reset":
        posterior = replace(posterior, integrated_to=posterior.filter_time)
    return posterior, report

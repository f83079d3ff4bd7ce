"""
Known-Delay Baseline

Linear scalar Kalman filter that is told the true delay. With the delay
known the problem is linear, so this filter is the consistency control for
the augmented EKF.
"""

from typing import Tuple

import numpy as np

from delaycal.errors import DivergenceError, NumericalFailureError
from delaycal.filter_core.schemas import NoiseModel, ScalarFilterState, UpdateReport
from delaycal.plant.schemas import ControlStream, MeasurementRecord


def baseline_step_known_delay(
    state: ScalarFilterState,
    meas: MeasurementRecord,
    controls: ControlStream,
    tau_true: float,
    noise: NoiseModel,
    joseph_form: bool = False,
) -> Tuple[ScalarFilterState, UpdateReport]:
    """
    Propagate to t_k + tau_true and apply a scalar update with H = 1.

    Returns:
        (updated state, UpdateReport with a one-element gain)

    Raises:
        CoverageError: controls do not cover the interval
        NumericalFailureError: S <= 0
        DivergenceError: non-finite result
    """
    t_target = meas.t_k + tau_true
    dt = t_target - state.filter_time
    x_prior = state.x_hat + controls.integrate(state.filter_time, t_target)
    P_prior = state.P + noise.Qx * abs(dt)

    S = P_prior + noise.R
    if not S > 0.0:
        raise NumericalFailureError(f"innovation variance is not positive (S={S})")
    K = P_prior / S
    e_y = meas.y_k - x_prior
    x_post = x_prior + K * e_y
    if joseph_form:
        P_post = (1.0 - K) ** 2 * P_prior + K * K * noise.R
    else:
        P_post = (1.0 - K) * P_prior

    if not (np.isfinite(x_post) and np.isfinite(P_post)):
        raise DivergenceError("baseline state became non-finite after update")

    report = UpdateReport(
        e_y=e_y,
        S=S,
        S_state=P_prior,
        K=np.array([K]),
        delta_tau=0.0,
        interval=dt,
        backward_time_flag=dt < 0.0,
        H=np.array([1.0]),
    )
    return ScalarFilterState(x_hat=x_post, P=P_post, filter_time=t_target), report

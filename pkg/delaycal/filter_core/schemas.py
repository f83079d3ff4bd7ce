"""Filter Schemas

Value types for the augmented [x, tau] hybrid EKF and the known-delay
scalar baseline. Every filter operation takes a state and returns a new one.
"""

from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class NoiseModel(BaseModel):
    """Process noise PSD Qx and measurement variance R."""

    model_config = ConfigDict(frozen=True)

    Qx: float = Field(1.0, ge=0.0, description="Position process noise PSD [m^2/s]")
    R: float = Field(0.0625, gt=0.0, description="Measurement variance [m^2]; must be positive")

    @property
    def Q(self) -> np.ndarray:
        return np.array([[self.Qx, 0.0], [0.0, 0.0]])


@dataclass(frozen=True, eq=False)
class FilterState:
    """
    Augmented filter state.

    filter_time is the time the estimate refers to (t_k + tau_hat_k right
    after an update). integrated_to is the time up to which the process
    model has been integrated; propagation always starts from it.
    last_interval is the signed length of the most recent propagation.
    """

    x_hat: float
    tau_hat: float
    P: np.ndarray
    filter_time: float
    integrated_to: float
    last_interval: float = 0.0

    @classmethod
    def initial(cls, x_hat0: float, tau_hat0: float, P0, t0: float = 0.0) -> "FilterState":
        """x_hat0 is the prior on x(t0); the first step propagates from t0 to t_1 + tau_hat0."""
        return cls(
            x_hat=float(x_hat0),
            tau_hat=float(tau_hat0),
            P=np.array(P0, dtype=float).reshape(2, 2),
            filter_time=float(t0),
            integrated_to=float(t0),
        )

    def is_finite(self) -> bool:
        return bool(
            np.isfinite(self.x_hat)
            and np.isfinite(self.tau_hat)
            and np.all(np.isfinite(self.P))
        )


@dataclass(frozen=True, eq=False)
class ScalarFilterState:
    """Known-delay baseline: position mean, variance and estimate time."""

    x_hat: float
    P: float
    filter_time: float = 0.0

    @property
    def P_matrix(self) -> np.ndarray:
        return np.array([[self.P]])


@dataclass(frozen=True, eq=False)
class UpdateReport:
    """Quantities produced by one measurement update."""

    e_y: float
    S: float
    S_state: float
    K: np.ndarray
    delta_tau: float
    interval: float = 0.0
    backward_time_flag: bool = False
    H: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0]))

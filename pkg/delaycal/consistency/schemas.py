"""Consistency Schemas

Per-trial traces and cross-trial statistics.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class TrialTrace:
    """
    Per-step record of one filter run.

    Arrays share length n = steps completed. e_x has shape (n, dim) and P
    shape (n, dim, dim): dim is 2 for the augmented filter ([x, tau]) and 1
    for the known-delay baseline.
    """

    trial_index: int
    seed: int
    tau_true: float
    x0_true: float
    k: np.ndarray
    t_k: np.ndarray
    x_hat: np.ndarray
    tau_hat: np.ndarray
    e_x: np.ndarray
    e_y: np.ndarray
    S: np.ndarray
    S_state: np.ndarray
    P: np.ndarray
    nis: np.ndarray
    nees: np.ndarray
    interval: np.ndarray
    backward: np.ndarray
    diverged: bool = False
    divergence_reason: Optional[str] = None

    @property
    def dim(self) -> int:
        return int(self.e_x.shape[1]) if self.e_x.ndim == 2 else 1

    @property
    def steps_completed(self) -> int:
        return int(len(self.k))

    @property
    def backward_time_events(self) -> int:
        return int(np.count_nonzero(self.backward))

    @property
    def final_tau_hat(self) -> float:
        return float(self.tau_hat[-1]) if len(self.tau_hat) else float("nan")


@dataclass(frozen=True, eq=False)
class BatchStats:
    """
    Cross-trial statistics, one entry per step (steps 1..n).

    Diverged trials are excluded from every per-step statistic; their count
    is n_excluded. Delay fields are None for the known-delay baseline.
    """

    steps: np.ndarray
    dof: int
    n_trials: int
    n_excluded: int
    rms_position: np.ndarray
    rms_delay_ms: Optional[np.ndarray]
    anees: np.ndarray
    anees_interval: Tuple[float, float]
    mean_nis: np.ndarray
    nis_interval: Tuple[float, float]
    nis_exceed_frac: np.ndarray
    containment_position: np.ndarray
    containment_delay: Optional[np.ndarray]
    apparent_divergence_frac: float
    backward_time_events: int
    mean_signed_integration: float
    mean_abs_integration: float
    nominal_elapsed: float

    @property
    def n_used(self) -> int:
        return self.n_trials - self.n_excluded

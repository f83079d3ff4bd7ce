"""Shared test doubles and trace builders."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from delaycal.consistency.schemas import TrialTrace


@dataclass(frozen=True)
class LinearTrajectory:
    """x(t) = x0 + v t; constant control, exact under zero-order hold."""

    x0: float = 0.0
    v: float = 0.5

    def position(self, t):
        value = self.x0 + self.v * np.asarray(t, dtype=float)
        return float(value) if np.ndim(value) == 0 else value

    def velocity(self, t):
        value = np.full(np.shape(t), self.v, dtype=float)
        return float(value) if np.ndim(value) == 0 else value


def make_trace(
    trial_index: int,
    e_x: np.ndarray,
    P: np.ndarray,
    nis: Optional[np.ndarray] = None,
    tau_hat: Optional[np.ndarray] = None,
    interval: Optional[np.ndarray] = None,
    backward: Optional[np.ndarray] = None,
    diverged: bool = False,
) -> TrialTrace:
    """Synthetic trace; NEES computed from e_x and P."""
    e_x = np.asarray(e_x, dtype=float)
    if e_x.ndim == 1:
        e_x = e_x.reshape(-1, 1)
    n, dim = e_x.shape
    P = np.asarray(P, dtype=float).reshape(n, dim, dim)
    nees = np.array([e_x[i] @ np.linalg.solve(P[i], e_x[i]) for i in range(n)])
    return TrialTrace(
        trial_index=trial_index,
        seed=trial_index,
        tau_true=0.0,
        x0_true=0.0,
        k=np.arange(1, n + 1),
        t_k=np.arange(1, n + 1) / 10.0,
        x_hat=np.zeros(n),
        tau_hat=np.zeros(n) if tau_hat is None else np.asarray(tau_hat, dtype=float),
        e_x=e_x,
        e_y=np.zeros(n),
        S=np.ones(n),
        S_state=np.ones(n),
        P=P,
        nis=np.ones(n) if nis is None else np.asarray(nis, dtype=float),
        nees=nees,
        interval=np.full(n, 0.1) if interval is None else np.asarray(interval, dtype=float),
        backward=np.zeros(n, dtype=bool) if backward is None else np.asarray(backward, dtype=bool),
        diverged=diverged,
        divergence_reason="DivergenceError: synthetic" if diverged else None,
    )

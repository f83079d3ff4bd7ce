"""Monte Carlo Schemas

Experiment configuration (validated from JSON) and batch results.
"""

import math
from dataclasses import dataclass, field
from typing import Annotated, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from delaycal.consistency.schemas import BatchStats, TrialTrace
from delaycal.errors import ConfigError
from delaycal.filter_core.schemas import NoiseModel
from delaycal.plant.schemas import PlantConfig
from delaycal.trajectory.presets import get_trajectory
from delaycal.trajectory.schemas import SinusoidSum


class SampledDelay(BaseModel):
    """Per-trial delay drawn from N(0, std^2), unclamped."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["sampled"] = "sampled"
    std: float = Field(0.05, gt=0.0, description="Delay standard deviation [s]")


class FixedDelay(BaseModel):
    """The same true delay in every trial."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["fixed"] = "fixed"
    value: float = Field(-0.05, description="True delay [s]")


DelayMode = Annotated[Union[SampledDelay, FixedDelay], Field(discriminator="kind")]


class CustomTermSpec(BaseModel):
    amplitude: float
    frequency: float
    phase: float = 0.0


class ExperimentConfig(BaseModel):
    """Full description of a Monte Carlo experiment."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    trajectory: str = Field("traj1", description="Preset id (traj1, traj2) or 'custom'")
    custom_terms: Optional[List[CustomTermSpec]] = None
    n_trials: int = Field(1000, ge=1)
    horizon_steps: int = Field(100, ge=1)
    meas_rate: float = Field(10.0, gt=0.0, description="[Hz]")
    control_rate: float = Field(100.0, gt=0.0, description="[Hz]")
    meas_noise_std: float = Field(0.25, ge=0.0, description="[m]")
    filter_R: Optional[float] = Field(None, gt=0.0, description="Filter measurement variance [m^2]; default meas_noise_std^2")
    Qx: float = Field(1.0, ge=0.0, description="Position process noise PSD [m^2/s]")
    P0: List[List[float]] = Field(default_factory=lambda: [[0.01, 0.0], [0.0, 0.25]])
    x_hat0: float = 0.0
    tau_hat0: float = 0.0
    delay_mode: DelayMode = Field(default_factory=FixedDelay)
    master_seed: int = Field(0, ge=0)
    divergence_cap: float = Field(1e6, gt=0.0, description="[m]")

    filter_kind: Literal["augmented", "known_delay"] = "augmented"
    error_reference: Literal["estimate_time", "measurement_time"] = "estimate_time"
    time_shift: Literal["naive", "reset"] = "naive"
    joseph_form: bool = False
    control_margin: float = Field(10.0, ge=0.0, description="Control coverage beyond [0, horizon] [s]")
    apparent_divergence_window: int = Field(20, ge=2)

    @field_validator("P0")
    @classmethod
    def _psd(cls, value: List[List[float]]) -> List[List[float]]:
        P0 = np.asarray(value, dtype=float)
        if P0.shape != (2, 2):
            raise ValueError("P0 must be 2x2")
        if not np.all(np.isfinite(P0)) or not np.allclose(P0, P0.T, rtol=0.0, atol=1e-15):
            raise ValueError("P0 must be finite and symmetric")
        if np.min(np.linalg.eigvalsh(P0)) < -1e-15:
            raise ValueError("P0 must be positive semi-definite")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> "ExperimentConfig":
        if self.control_rate < self.meas_rate:
            raise ValueError("control_rate must be >= meas_rate")
        if not self.filter_variance > 0.0:
            raise ValueError("filter measurement variance must be positive; set filter_R for a noiseless plant")
        for name in ("x_hat0", "tau_hat0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        try:
            traj = self.trajectory_model()
        except ConfigError as exc:
            raise ValueError(str(exc)) from exc
        if not traj.is_excited:
            raise ValueError(f"trajectory '{self.trajectory}' has constant velocity; delay is unidentifiable")
        return self

    def trajectory_model(self) -> SinusoidSum:
        terms = [term.model_dump() for term in self.custom_terms] if self.custom_terms else None
        return get_trajectory(self.trajectory, terms)

    @property
    def filter_variance(self) -> float:
        return self.filter_R if self.filter_R is not None else self.meas_noise_std**2

    def noise_model(self) -> NoiseModel:
        return NoiseModel(Qx=self.Qx, R=self.filter_variance)

    def plant_config(self, delay: float) -> PlantConfig:
        return PlantConfig(
            delay=delay,
            meas_noise_std=self.meas_noise_std,
            meas_rate=self.meas_rate,
            control_rate=self.control_rate,
        )

    @property
    def meas_period(self) -> float:
        return 1.0 / self.meas_rate

    @property
    def horizon(self) -> float:
        """Time of the last measurement [s]."""
        return self.horizon_steps / self.meas_rate

    @property
    def dof(self) -> int:
        return 2 if self.filter_kind == "augmented" else 1


@dataclass(frozen=True)
class TrialSummary:
    """One row of per_trial.csv."""

    trial_index: int
    seed: int
    tau_true: float
    x0_true: float
    final_tau_hat: float
    diverged: bool
    divergence_reason: Optional[str]
    backward_time_events: int
    steps_completed: int

    @classmethod
    def from_trace(cls, trace: TrialTrace) -> "TrialSummary":
        return cls(
            trial_index=trace.trial_index,
            seed=trace.seed,
            tau_true=trace.tau_true,
            x0_true=trace.x0_true,
            final_tau_hat=trace.final_tau_hat,
            diverged=trace.diverged,
            divergence_reason=trace.divergence_reason,
            backward_time_events=trace.backward_time_events,
            steps_completed=trace.steps_completed,
        )


@dataclass(frozen=True, eq=False)
class BatchResult:
    """Config echo, per-trial summaries (by trial index) and BatchStats."""

    config: ExperimentConfig
    trials: List[TrialSummary]
    stats: BatchStats
    traces: List[TrialTrace] = field(default_factory=list)

    def __post_init__(self):
        if len(self.trials) != self.config.n_trials:
            raise ValueError(
                f"batch holds {len(self.trials)} trials but config asks for {self.config.n_trials}"
            )

    @property
    def n_diverged(self) -> int:
        return sum(1 for trial in self.trials if trial.diverged)

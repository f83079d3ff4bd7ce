"""Trajectory Schemas

Analytic sum-of-sinusoids trajectories with exact derivatives. The position
is the true state x(t); the velocity is the control input u(t) fed to the
filter by the reference sensor.
"""

import math
from typing import List, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

ArrayLike = Union[float, np.ndarray]


class SinusoidTerm(BaseModel):
    """One term A*sin(w*t + phi)."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    amplitude: float = Field(..., description="Amplitude [m]")
    angular_frequency: float = Field(
        ..., alias="frequency", description="Angular frequency [rad/s]"
    )
    phase: float = Field(0.0, description="Phase [rad]")

    @field_validator("amplitude", "angular_frequency", "phase")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("sinusoid term fields must be finite")
        return value

    @property
    def is_excited(self) -> bool:
        return self.amplitude != 0.0 and self.angular_frequency != 0.0


class SinusoidSum(BaseModel):
    """x(t) = offset + sum_i A_i sin(w_i t + phi_i)."""

    model_config = ConfigDict(frozen=True)

    terms: List[SinusoidTerm] = Field(default_factory=list)
    offset: float = Field(0.0, description="Constant position offset [m]")
    name: str = "custom"

    def _coefficients(self):
        amplitude = np.array([term.amplitude for term in self.terms], dtype=float)
        omega = np.array([term.angular_frequency for term in self.terms], dtype=float)
        phase = np.array([term.phase for term in self.terms], dtype=float)
        return amplitude, omega, phase

    def _angles(self, t: ArrayLike):
        amplitude, omega, phase = self._coefficients()
        return amplitude, omega, np.multiply.outer(np.asarray(t, dtype=float), omega) + phase

    def position(self, t: ArrayLike) -> ArrayLike:
        amplitude, _, angle = self._angles(t)
        value = self.offset + np.sum(amplitude * np.sin(angle), axis=-1)
        return float(value) if np.ndim(value) == 0 else value

    def velocity(self, t: ArrayLike) -> ArrayLike:
        amplitude, omega, angle = self._angles(t)
        value = np.sum(amplitude * omega * np.cos(angle), axis=-1)
        return float(value) if np.ndim(value) == 0 else value

    def acceleration(self, t: ArrayLike) -> ArrayLike:
        amplitude, omega, angle = self._angles(t)
        value = -np.sum(amplitude * omega**2 * np.sin(angle), axis=-1)
        return float(value) if np.ndim(value) == 0 else value

    @property
    def acceleration_bound(self) -> float:
        """sum |A w^2|, an upper bound on |acceleration| for all t."""
        return math.fsum(abs(t.amplitude * t.angular_frequency**2) for t in self.terms)

    @property
    def is_excited(self) -> bool:
        """False when velocity is constant and the delay cannot be identified."""
        return any(term.is_excited for term in self.terms)

    def max_abs_acceleration(self, t_start: float, t_end: float, samples: int = 20001) -> float:
        """Dense-grid maximum of |acceleration| over [t_start, t_end]."""
        grid = np.linspace(t_start, t_end, samples)
        return float(np.max(np.abs(self.acceleration(grid))))

    def shifted_to(self, t: float, x: float) -> "SinusoidSum":
        """Copy with the offset changed so that position(t) == x."""
        return self.model_copy(update={"offset": self.offset + (x - self.position(t))})

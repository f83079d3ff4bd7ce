"""Plant Schemas

Ground-truth delay system configuration and its sampled outputs.
"""

import math
from dataclasses import dataclass
from typing import Iterator, Protocol, Union, overload

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from delaycal.errors import CoverageError


class TrajectoryModel(Protocol):
    """Anything with an exact position and velocity (SinusoidSum, test ramps)."""

    def position(self, t): ...

    def velocity(self, t): ...


class PlantConfig(BaseModel):
    """Ground-truth delay system y(t) = x(t + tau) + v."""

    model_config = ConfigDict(frozen=True)

    delay: float = Field(..., description="Signed delay tau [s]; negative = output lags state")
    meas_noise_std: float = Field(0.25, ge=0.0, description="Measurement noise std [m]")
    meas_rate: float = Field(10.0, gt=0.0, description="Measurement rate [Hz]")
    control_rate: float = Field(100.0, gt=0.0, description="Reference-sensor rate [Hz]")

    @model_validator(mode="after")
    def _rates(self) -> "PlantConfig":
        if self.control_rate < self.meas_rate:
            raise ValueError("control_rate must be >= meas_rate")
        if not math.isfinite(self.delay):
            raise ValueError("delay must be finite")
        return self


@dataclass(frozen=True)
class MeasurementRecord:
    """One delayed position measurement, stamped with the nominal clock."""

    k: int
    t_k: float
    y_k: float


@dataclass(frozen=True)
class ControlSample:
    """One reference-sensor sample u_i = velocity(t_i)."""

    t_i: float
    u_i: float


@dataclass(frozen=True, eq=False)
class ControlStream:
    """
    Sampled control signal with zero-order-hold reconstruction.

    Behaves as an ordered sequence of ControlSample. Sample i holds on
    [times[i], times[i+1]); the last sample ends the covered span.
    """

    times: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    @overload
    def __getitem__(self, index: int) -> ControlSample: ...

    @overload
    def __getitem__(self, index: slice) -> "ControlStream": ...

    def __getitem__(self, index: Union[int, slice]):
        if isinstance(index, slice):
            return ControlStream(self.times[index], self.values[index])
        return ControlSample(float(self.times[index]), float(self.values[index]))

    def __iter__(self) -> Iterator[ControlSample]:
        for i in range(len(self)):
            yield self[i]

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])

    def covers(self, a: float, b: float) -> bool:
        lo, hi = (a, b) if a <= b else (b, a)
        return len(self) > 0 and self.start <= lo and hi <= self.end

    def index_at(self, t: float) -> int:
        """Index of the sample nearest-not-after t (first sample if t precedes it)."""
        index = int(np.searchsorted(self.times, t, side="right")) - 1
        return max(index, 0)

    def value_at(self, t: float) -> float:
        return float(self.values[self.index_at(t)])

    def integrate(self, a: float, b: float) -> float:
        """
        Signed ZOH integral of the control from a to b.

        Raises:
            CoverageError: [min(a, b), max(a, b)] not inside the stream span
        """
        if a == b:
            return 0.0
        if not self.covers(a, b):
            raise CoverageError(
                f"control stream [{self.start if len(self) else float('nan')}, "
                f"{self.end if len(self) else float('nan')}] does not cover [{min(a, b)}, {max(a, b)}]"
            )
        if a > b:
            return -self.integrate(b, a)

        i_a = self.index_at(a)
        i_b = self.index_at(b)
        if i_a == i_b:
            return float(self.values[i_a] * (b - a))

        total = self.values[i_a] * (self.times[i_a + 1] - a)
        if i_b > i_a + 1:
            widths = np.diff(self.times[i_a + 1 : i_b + 1])
            total += float(np.dot(self.values[i_a + 1 : i_b], widths))
        total += self.values[i_b] * (b - self.times[i_b])
        return float(total)

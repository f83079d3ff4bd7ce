"""Identifiability Schemas

Intervals, bounded piecewise-constant controls and indistinguishable pairs
for the single-integrator delay system x_dot = u, y(t) = x(t + tau),
u in [-1, 1].
"""

import math
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

CONTROL_BOUND = 1.0
_TIME_TOL = 1e-12


class Interval(BaseModel):
    """Closed interval [lo, hi]."""

    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float

    @model_validator(mode="after")
    def _ordered(self) -> "Interval":
        if not self.lo <= self.hi:
            raise ValueError(f"interval lower bound {self.lo} exceeds upper bound {self.hi}")
        return self

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= value <= self.hi + tol

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo=lo, hi=hi) if lo <= hi else None


class ControlSegment(BaseModel):
    """Constant control value on [t_start, t_end)."""

    model_config = ConfigDict(frozen=True)

    t_start: float
    t_end: float
    value: float = Field(..., ge=-CONTROL_BOUND, le=CONTROL_BOUND)

    @model_validator(mode="after")
    def _ordered(self) -> "ControlSegment":
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise ValueError("segment endpoints must be finite")
        if not self.t_start < self.t_end:
            raise ValueError("segment must have positive duration")
        return self

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def shifted(self, dt: float) -> "ControlSegment":
        return ControlSegment(t_start=self.t_start + dt, t_end=self.t_end + dt, value=self.value)


class BoundedControl(BaseModel):
    """Admissible piecewise-constant control: contiguous segments, |u| <= 1."""

    model_config = ConfigDict(frozen=True)

    segments: List[ControlSegment] = Field(default_factory=list)

    @model_validator(mode="after")
    def _contiguous(self) -> "BoundedControl":
        for prev, nxt in zip(self.segments, self.segments[1:]):
            if abs(nxt.t_start - prev.t_end) > _TIME_TOL:
                raise ValueError(
                    f"segments must be contiguous ({prev.t_end} then {nxt.t_start})"
                )
        return self

    @classmethod
    def constant(cls, value: float, t_start: float, t_end: float) -> "BoundedControl":
        if t_end <= t_start:
            return cls(segments=[])
        return cls(segments=[ControlSegment(t_start=t_start, t_end=t_end, value=value)])

    @property
    def is_empty(self) -> bool:
        return not self.segments

    @property
    def t_start(self) -> float:
        return self.segments[0].t_start

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    def shifted(self, dt: float) -> "BoundedControl":
        return BoundedControl(segments=[segment.shifted(dt) for segment in self.segments])

    def then(self, other: "BoundedControl") -> "BoundedControl":
        """Concatenate two controls sharing an endpoint."""
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        first = other.segments[0]
        if abs(first.t_start - self.t_end) > 1e-9:
            raise ValueError(f"controls do not share an endpoint ({self.t_end} vs {first.t_start})")
        # Snap the join so float round-off in shifted copies never opens a gap
        joined = ControlSegment(t_start=self.t_end, t_end=first.t_end, value=first.value)
        return BoundedControl(segments=[*self.segments, joined, *other.segments[1:]])

    def value_at(self, t: float) -> Optional[float]:
        """Control value at t, or None outside the domain. The final endpoint belongs to the last segment."""
        for segment in self.segments:
            if segment.t_start <= t < segment.t_end:
                return segment.value
        if self.segments and t == self.t_end:
            return self.segments[-1].value
        return None

    def integral(self, a: float, b: float) -> float:
        """Exact integral of the control over [a, b] (a <= b, inside the domain)."""
        total = []
        for segment in self.segments:
            lo, hi = max(a, segment.t_start), min(b, segment.t_end)
            if hi > lo:
                total.append(segment.value * (hi - lo))
        return math.fsum(total)

    def superpose(self, t_start: float, t_end: float, delta: float) -> "BoundedControl":
        """Copy with delta added on [t_start, t_end); result must stay admissible."""
        cuts = sorted(
            {s.t_start for s in self.segments}
            | {s.t_end for s in self.segments}
            | {t for t in (t_start, t_end) if self.t_start < t < self.t_end}
        )
        segments = []
        for lo, hi in zip(cuts, cuts[1:]):
            value = self.value_at(lo)
            if t_start <= lo and hi <= t_end:
                value += delta
            segments.append(ControlSegment(t_start=lo, t_end=hi, value=value))
        return BoundedControl(segments=segments)


class IndistinguishablePair(BaseModel):
    """
    Two delay systems with identical outputs on [0, horizon].

    Both start from the anchor state at their own delay time: x(tau) = anchor
    and x'(tau_prime) = anchor. For the lagging case the anchor is the past
    state x^-1; for the leading case it is the future state x^1.
    """

    model_config = ConfigDict(frozen=True)

    tau: float
    tau_prime: float
    u: BoundedControl
    u_prime: BoundedControl
    x0: float
    anchor: float
    horizon: float

    @property
    def branch(self) -> str:
        return "lagging" if self.tau < 0 else "leading"

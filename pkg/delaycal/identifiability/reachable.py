"""
Time-limited reachable sets of x_dot = u, |u| <= 1.

Both sets are [x0 - T, x0 + T]: the control bound is symmetric, so moving
forward or backward in time reaches the same interval.
"""

import math

from delaycal.errors import ArgumentError
from delaycal.identifiability.schemas import CONTROL_BOUND, Interval


def _check_horizon(T: float) -> None:
    if not math.isfinite(T) or T < 0:
        raise ArgumentError(f"reachability horizon must be finite and >= 0 (got {T})")


def forward_reachable(x0: float, T: float) -> Interval:
    """States reachable from x0 within time T."""
    _check_horizon(T)
    return Interval(lo=x0 - CONTROL_BOUND * T, hi=x0 + CONTROL_BOUND * T)


def backward_reachable(x0: float, T: float) -> Interval:
    """States from which x0 can be reached within time T."""
    _check_horizon(T)
    return Interval(lo=x0 - CONTROL_BOUND * T, hi=x0 + CONTROL_BOUND * T)

"""
Indistinguishable Pair Construction

Builds two delay systems (tau, tau') with identical noiseless outputs on
[0, tau_+] and verifies them by simulation. This is an executable witness
that a delay cannot be identified in a time less than or equal to |tau|.

Lagging branch (tau' <= tau < 0): both systems pass through the anchor
x^-1 at their own delay time; the primed system replays the control of
[tau, 0] shifted onto [tau', tau' - tau] and then holds zero until 0.

Leading branch (0 < tau <= tau'): both share the control on [0, tau], which
fixes the anchor x^1 = x(tau); the primed system holds zero on [tau, tau')
and replays the control of [tau, 2 tau] on [tau', tau' + tau].
"""

import logging
from typing import Optional

import numpy as np

from delaycal.errors import ArgumentError, ConstructionError
from delaycal.identifiability.reachable import backward_reachable, forward_reachable
from delaycal.identifiability.schemas import (
    CONTROL_BOUND,
    BoundedControl,
    ControlSegment,
    IndistinguishablePair,
    Interval,
)

logger = logging.getLogger(__name__)

_DOMAIN_TOL = 1e-9
_ANCHOR_TOL = 1e-12


def _check_domain(control: BoundedControl, t_start: float, t_end: float, name: str) -> None:
    if control.is_empty:
        raise ConstructionError(f"{name} is empty")
    if abs(control.t_start - t_start) > _DOMAIN_TOL or abs(control.t_end - t_end) > _DOMAIN_TOL:
        raise ConstructionError(
            f"{name} must cover [{t_start}, {t_end}] (got [{control.t_start}, {control.t_end}])"
        )


def _check_anchor(anchor: float, region: Interval) -> None:
    if not region.contains(anchor, tol=_ANCHOR_TOL):
        raise ConstructionError(f"anchor {anchor} outside reachable intersection [{region.lo}, {region.hi}]")


def _constant_control(start_state: float, end_state: float, t_start: float, t_end: float) -> BoundedControl:
    value = (end_state - start_state) / (t_end - t_start)
    if abs(value) > CONTROL_BOUND + 1e-15:
        raise ConstructionError(f"constant control {value} is not admissible")
    value = max(-CONTROL_BOUND, min(CONTROL_BOUND, value))
    return BoundedControl.constant(value, t_start, t_end)


def _resolve(
    control: Optional[BoundedControl],
    anchor: Optional[float],
    implied_anchor,
    region: Interval,
    default_control,
):
    """Settle the (control, anchor) pair: derive whichever is missing and check consistency."""
    if control is not None:
        implied = implied_anchor(control)
        if anchor is None:
            anchor = implied
        elif abs(anchor - implied) > _ANCHOR_TOL * max(1.0, abs(anchor)):
            raise ConstructionError(
                f"anchor {anchor} inconsistent with the supplied control (implies {implied})"
            )
    else:
        anchor = region.midpoint if anchor is None else anchor
        _check_anchor(anchor, region)
        control = default_control(anchor)
    _check_anchor(anchor, region)
    return control, anchor


def construct_pair_lagging(
    tau: float,
    tau_prime: float,
    u_past: Optional[BoundedControl] = None,
    u_shared: Optional[BoundedControl] = None,
    x0: float = 0.0,
    anchor: Optional[float] = None,
) -> IndistinguishablePair:
    """
    Build a lagging-delay pair (tau' <= tau < 0).

    Args:
        tau: delay of the unprimed system [s]
        tau_prime: delay of the primed system [s]
        u_past: control on [tau, 0] driving the anchor to x0 (default: constant)
        u_shared: control on [0, tau_+] applied to both (default: zero)
        x0: common state at t = 0
        anchor: x^-1 = x(tau) = x'(tau') (default: midpoint of B and B')

    Raises:
        ArgumentError: delays of the wrong sign or order
        ConstructionError: inconsistent anchor/controls
    """
    if not (tau < 0 and tau_prime <= tau):
        raise ArgumentError(f"lagging pair needs tau' <= tau < 0 (got tau={tau}, tau'={tau_prime})")
    tau_plus = -tau

    region = backward_reachable(x0, tau_plus).intersect(backward_reachable(x0, -tau_prime))
    if u_past is not None:
        _check_domain(u_past, tau, 0.0, "u_past")
    u_past, anchor = _resolve(
        u_past,
        anchor,
        lambda control: x0 - control.integral(tau, 0.0),
        region,
        lambda a: _constant_control(a, x0, tau, 0.0),
    )

    if u_shared is None:
        u_shared = BoundedControl.constant(0.0, 0.0, tau_plus)
    _check_domain(u_shared, 0.0, tau_plus, "u_shared")

    shift = tau_prime - tau
    u_prime = (
        u_past.shifted(shift)
        .then(BoundedControl.constant(0.0, tau_prime - tau, 0.0))
        .then(u_shared)
    )
    pair = IndistinguishablePair(
        tau=tau,
        tau_prime=tau_prime,
        u=u_past.then(u_shared),
        u_prime=u_prime,
        x0=x0,
        anchor=anchor,
        horizon=tau_plus,
    )
    logger.debug(f"Constructed lagging pair tau={tau}, tau'={tau_prime}, anchor={anchor}")
    return pair


def construct_pair_leading(
    tau: float,
    tau_prime: float,
    u_future: Optional[BoundedControl] = None,
    u_shared: Optional[BoundedControl] = None,
    x0: float = 0.0,
    anchor: Optional[float] = None,
) -> IndistinguishablePair:
    """
    Build a leading-delay pair (0 < tau <= tau').

    Args:
        tau: delay of the unprimed system [s]
        tau_prime: delay of the primed system [s]
        u_future: control on [tau, 2 tau] driving x^1 to x^2 (default: zero)
        u_shared: control on [0, tau] applied to both, reaching the anchor (default: constant)
        x0: common state at t = 0
        anchor: x^1 = x(tau) = x'(tau') (default: midpoint of F and F')

    Raises:
        ArgumentError: delays of the wrong sign or order
        ConstructionError: inconsistent anchor/controls
    """
    if not (tau > 0 and tau_prime >= tau):
        raise ArgumentError(f"leading pair needs 0 < tau <= tau' (got tau={tau}, tau'={tau_prime})")

    region = forward_reachable(x0, tau).intersect(forward_reachable(x0, tau_prime))
    if u_shared is not None:
        _check_domain(u_shared, 0.0, tau, "u_shared")
    u_shared, anchor = _resolve(
        u_shared,
        anchor,
        lambda control: x0 + control.integral(0.0, tau),
        region,
        lambda a: _constant_control(x0, a, 0.0, tau),
    )

    if u_future is None:
        u_future = BoundedControl.constant(0.0, tau, 2.0 * tau)
    _check_domain(u_future, tau, 2.0 * tau, "u_future")

    u_prime = (
        u_shared.then(BoundedControl.constant(0.0, tau, tau_prime))
        .then(u_future.shifted(tau_prime - tau))
    )
    pair = IndistinguishablePair(
        tau=tau,
        tau_prime=tau_prime,
        u=u_shared.then(u_future),
        u_prime=u_prime,
        x0=x0,
        anchor=anchor,
        horizon=tau,
    )
    logger.debug(f"Constructed leading pair tau={tau}, tau'={tau_prime}, anchor={anchor}")
    return pair


def construct_pair(tau: float, tau_prime: float, **kwargs) -> IndistinguishablePair:
    """Dispatch on the sign of the delays."""
    if tau == 0 or tau_prime == 0 or (tau > 0) != (tau_prime > 0):
        raise ArgumentError(f"tau and tau' must be nonzero with the same sign (got {tau}, {tau_prime})")
    if abs(tau_prime) < abs(tau):
        raise ArgumentError(f"|tau'| must be >= |tau| (got {tau}, {tau_prime})")
    if tau < 0:
        return construct_pair_lagging(tau, tau_prime, **kwargs)
    return construct_pair_leading(tau, tau_prime, **kwargs)


def example_pair(tau: float, tau_prime: float, x0: float = 0.0) -> IndistinguishablePair:
    """A pair with non-trivial two-level controls, for demos and plots."""
    tau_plus = abs(tau)
    if tau < 0 and tau_prime <= tau:
        mid = tau / 2.0
        u_past = BoundedControl(
            segments=[
                ControlSegment(t_start=tau, t_end=mid, value=0.8),
                ControlSegment(t_start=mid, t_end=0.0, value=-0.3),
            ]
        )
        u_shared = BoundedControl.constant(0.5, 0.0, tau_plus)
        return construct_pair(tau, tau_prime, u_past=u_past, u_shared=u_shared, x0=x0)
    if tau > 0 and tau_prime >= tau:
        mid = 1.5 * tau
        u_future = BoundedControl(
            segments=[
                ControlSegment(t_start=tau, t_end=mid, value=0.6),
                ControlSegment(t_start=mid, t_end=2.0 * tau, value=-0.9),
            ]
        )
        u_shared = BoundedControl.constant(0.5, 0.0, tau)
        return construct_pair(tau, tau_prime, u_future=u_future, u_shared=u_shared, x0=x0)
    return construct_pair(tau, tau_prime)


def state_trajectory(
    control: BoundedControl,
    anchor: float,
    anchor_time: float,
    times: np.ndarray,
) -> np.ndarray:
    """
    Exact state x(s) of x_dot = u with x(anchor_time) = anchor, on a time grid.

    Raises:
        ArgumentError: a requested time lies outside the control domain
    """
    times = np.asarray(times, dtype=float)
    if control.is_empty:
        raise ArgumentError("cannot simulate with an empty control")
    if np.any(times < control.t_start - _DOMAIN_TOL) or np.any(times > control.t_end + _DOMAIN_TOL):
        raise ArgumentError(
            f"simulation times leave the control domain [{control.t_start}, {control.t_end}]"
        )

    starts = np.array([segment.t_start for segment in control.segments])
    durations = np.array([segment.duration for segment in control.segments])
    values = np.array([segment.value for segment in control.segments])
    prefix = np.concatenate(([0.0], np.cumsum(values * durations)))

    def primitive(s):
        index = np.clip(np.searchsorted(starts, s, side="right") - 1, 0, len(starts) - 1)
        return prefix[index] + values[index] * (s - starts[index])

    return anchor + primitive(times) - primitive(np.asarray(anchor_time, dtype=float))


def pair_outputs(pair: IndistinguishablePair, times: np.ndarray):
    """Noiseless outputs (y, y') of both systems at the given times."""
    times = np.asarray(times, dtype=float)
    y = state_trajectory(pair.u, pair.anchor, pair.tau, times + pair.tau)
    y_prime = state_trajectory(pair.u_prime, pair.anchor, pair.tau_prime, times + pair.tau_prime)
    return y, y_prime


def output_grid(horizon: float, grid_step: float) -> np.ndarray:
    if grid_step <= 0:
        raise ArgumentError("grid_step must be positive")
    count = int(np.ceil(horizon / grid_step - 1e-9))
    return np.linspace(0.0, horizon, count + 1)


def verify_pair(
    pair: IndistinguishablePair,
    grid_step: float,
    horizon: Optional[float] = None,
) -> float:
    """
    Simulate both systems and return max |y - y'| over [0, horizon].

    horizon defaults to the pair's tau_+; larger values (within the control
    domains) show where the outputs separate.
    """
    times = output_grid(pair.horizon if horizon is None else horizon, grid_step)
    y, y_prime = pair_outputs(pair, times)
    difference = float(np.max(np.abs(y - y_prime)))
    logger.info(
        f"Verified {pair.branch} pair tau={pair.tau}, tau'={pair.tau_prime}: max |y - y'| = {difference:.3e}"
    )
    return difference


def constant_velocity_shift(v: float, tau: float) -> float:
    """
    Initial-position shift that hides a delay under constant velocity.

    With u = v, the system (x0 - v*tau, tau) produces the same output as the
    delay-free system (x0, 0) for all time.
    """
    return -v * tau

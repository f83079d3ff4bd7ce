from delaycal.identifiability.reachable import backward_reachable, forward_reachable
from delaycal.identifiability.schemas import (
    CONTROL_BOUND,
    BoundedControl,
    ControlSegment,
    IndistinguishablePair,
    Interval,
)
from delaycal.identifiability.service import (
    constant_velocity_shift,
    construct_pair,
    construct_pair_lagging,
    construct_pair_leading,
    example_pair,
    output_grid,
    pair_outputs,
    state_trajectory,
    verify_pair,
)

__all__ = [
    "CONTROL_BOUND",
    "BoundedControl",
    "ControlSegment",
    "IndistinguishablePair",
    "Interval",
    "backward_reachable",
    "constant_velocity_shift",
    "construct_pair",
    "construct_pair_lagging",
    "construct_pair_leading",
    "example_pair",
    "forward_reachable",
    "output_grid",
    "pair_outputs",
    "state_trajectory",
    "verify_pair",
]

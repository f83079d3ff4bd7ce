from delaycal.filter_core.baseline import baseline_step_known_delay
from delaycal.filter_core.ekf import (
    innovation_variance,
    measurement_jacobian,
    propagate,
    state_innovation_variance,
    step,
    update,
)
from delaycal.filter_core.schemas import FilterState, NoiseModel, ScalarFilterState, UpdateReport

__all__ = [
    "FilterState",
    "NoiseModel",
    "ScalarFilterState",
    "UpdateReport",
    "baseline_step_known_delay",
    "innovation_variance",
    "measurement_jacobian",
    "propagate",
    "state_innovation_variance",
    "step",
    "update",
]

from delaycal.trajectory.presets import PRESETS, get_trajectory, list_presets
from delaycal.trajectory.schemas import SinusoidSum, SinusoidTerm

__all__ = ["PRESETS", "SinusoidSum", "SinusoidTerm", "get_trajectory", "list_presets"]

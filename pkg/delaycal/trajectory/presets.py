"""
Benchmark trajectory presets.

The coefficients are repository constants chosen to reproduce the
qualitative contrast between a conservative and an aggressive trajectory.
They are not published ground truth.

Each preset is a slow manoeuvre plus a few centimetres of fast vibration
(4-5 Hz). The vibration period is shorter than the initial delay standard
deviation (0.5 s), so the output repeats inside the delay prior.

- traj1: conservative, slow part max |a| <= 0.5 m/s^2; overall max |a| about 40 m/s^2
- traj2: aggressive, max |a| above 100 m/s^2 within the 10 s horizon
"""

from typing import Dict, List, Optional

from delaycal.errors import ConfigError
from delaycal.trajectory.schemas import SinusoidSum, SinusoidTerm

PRESETS: Dict[str, SinusoidSum] = {
    "traj1": SinusoidSum(
        name="traj1",
        terms=[
            SinusoidTerm(amplitude=1.0, frequency=0.5, phase=0.0),
            SinusoidTerm(amplitude=0.2, frequency=1.1, phase=1.0),
            SinusoidTerm(amplitude=0.05, frequency=28.0, phase=2.0),
        ],
    ),
    "traj2": SinusoidSum(
        name="traj2",
        terms=[
            SinusoidTerm(amplitude=0.3, frequency=1.7, phase=1.5),
            SinusoidTerm(amplitude=0.15, frequency=30.0, phase=2.0),
        ],
    ),
}


def list_presets() -> List[str]:
    return sorted(PRESETS)


def get_trajectory(name: str, custom_terms: Optional[List[dict]] = None) -> SinusoidSum:
    """
    Resolve a trajectory by preset name, or build a custom one.

    Args:
        name: "traj1", "traj2" or "custom"
        custom_terms: list of {amplitude, frequency, phase} records (custom only)

    Returns:
        SinusoidSum

    Raises:
        ConfigError: unknown name, or custom requested without terms
    """
    if name == "custom":
        if not custom_terms:
            raise ConfigError("custom trajectory requires custom_terms")
        return SinusoidSum(
            name="custom",
            terms=[SinusoidTerm.model_validate(record) for record in custom_terms],
        )
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown trajectory '{name}' (choose from {', '.join(list_presets())} or custom)"
        ) from None

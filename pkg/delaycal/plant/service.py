"""
Plant Service

Reference-sensor control sampling and delayed, noisy position measurements.
Noise draws are always supplied by the caller; nothing here holds random
state.
"""

import csv
import logging
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from delaycal.errors import ArgumentError
from delaycal.plant.schemas import ControlStream, MeasurementRecord, PlantConfig, TrajectoryModel

logger = logging.getLogger(__name__)


def control_stream(
    traj: TrajectoryModel,
    control_rate: float,
    horizon: float,
    start: float = 0.0,
) -> ControlStream:
    """
    Sample the control u(t) = velocity(t) at t_i = i / control_rate.

    Args:
        traj: trajectory providing the exact velocity
        control_rate: sampling rate [Hz]
        horizon: last sample time bound [s]; samples up to floor(horizon * rate)
        start: first sample time bound [s]; samples from ceil(start * rate)

    Returns:
        ControlStream over [start, horizon]

    Raises:
        ArgumentError: horizon <= start, or control_rate <= 0
    """
    if control_rate <= 0:
        raise ArgumentError("control_rate must be positive")
    if horizon <= 0 or horizon <= start:
        raise ArgumentError("horizon must be positive and after start")

    first = math.ceil(start * control_rate)
    last = math.floor(horizon * control_rate)
    indices = np.arange(first, last + 1, dtype=float)
    times = indices / control_rate
    values = np.asarray(traj.velocity(times), dtype=float)
    logger.debug(f"Sampled {len(times)} controls on [{times[0]}, {times[-1]}] s")
    return ControlStream(times=times, values=values)


def measurement_time(k: int, meas_rate: float) -> float:
    return k / meas_rate


def measure(
    traj: TrajectoryModel,
    cfg: PlantConfig,
    k: int,
    noise_draw: float,
) -> MeasurementRecord:
    """y_k = position(t_k + tau) + noise_draw with t_k = k / meas_rate."""
    t_k = measurement_time(k, cfg.meas_rate)
    y_k = float(traj.position(t_k + cfg.delay)) + noise_draw
    return MeasurementRecord(k=k, t_k=t_k, y_k=y_k)


def write_measurements_csv(records: Iterable[MeasurementRecord], path: Path) -> Path:
    """Write a measurement stream as CSV (k, t_k, y_k)."""
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["k", "t_k", "y_k"])
        for record in records:
            writer.writerow([record.k, format(record.t_k, ".17g"), format(record.y_k, ".17g")])
    logger.info(f"Wrote measurements to {path}")
    return path

from delaycal.plant.schemas import (
    ControlSample,
    ControlStream,
    MeasurementRecord,
    PlantConfig,
    TrajectoryModel,
)
from delaycal.plant.service import control_stream, measure, measurement_time, write_measurements_csv

__all__ = [
    "ControlSample",
    "ControlStream",
    "MeasurementRecord",
    "PlantConfig",
    "TrajectoryModel",
    "control_stream",
    "measure",
    "measurement_time",
    "write_measurements_csv",
]

from delaycal.montecarlo.loader import apply_overrides, dump_config, load_config, validate_config
from delaycal.montecarlo.schemas import (
    BatchResult,
    ExperimentConfig,
    FixedDelay,
    SampledDelay,
    TrialSummary,
)
from delaycal.montecarlo.seeding import derive_trial_seed, trial_rng
from delaycal.montecarlo.service import (
    aggregate_batch,
    draw_trial_inputs,
    run_batch,
    run_trial,
    trial_measurements,
)

__all__ = [
    "BatchResult",
    "ExperimentConfig",
    "FixedDelay",
    "SampledDelay",
    "TrialSummary",
    "aggregate_batch",
    "apply_overrides",
    "derive_trial_seed",
    "draw_trial_inputs",
    "dump_config",
    "load_config",
    "run_batch",
    "run_trial",
    "trial_measurements",
    "trial_rng",
    "validate_config",
]

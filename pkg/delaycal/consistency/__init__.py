from delaycal.consistency.chi2 import chi2_anees_interval, chi2_cdf, chi2_quantile, wilson_hilferty
from delaycal.consistency.schemas import BatchStats, TrialTrace
from delaycal.consistency.service import (
    TABLE_STEPS,
    anees,
    compute_batch_stats,
    containment_3sigma,
    excess_over_bound,
    nees,
    nis,
    nis_exceed_fraction,
    rms_per_step,
    shows_apparent_divergence,
    summary_table,
    table_columns,
)

__all__ = [
    "TABLE_STEPS",
    "BatchStats",
    "TrialTrace",
    "anees",
    "chi2_anees_interval",
    "chi2_cdf",
    "chi2_quantile",
    "compute_batch_stats",
    "containment_3sigma",
    "excess_over_bound",
    "nees",
    "nis",
    "nis_exceed_fraction",
    "rms_per_step",
    "shows_apparent_divergence",
    "summary_table",
    "table_columns",
    "wilson_hilferty",
]

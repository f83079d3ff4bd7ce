from delaycal.export.csv_writer import (
    CONFIG_FILE,
    PER_STEP_FILE,
    PER_TRIAL_FILE,
    REPORT_INPUTS,
    SUMMARY_FILE,
    TOTALS_FILE,
    TRACES_FILE,
    read_batch_dir,
    write_batch_summary_csv,
    write_batch_totals_csv,
    write_identifiability_csv,
    write_per_step_stats_csv,
    write_per_trial_csv,
    write_trace_csv,
    write_traces_csv,
)
from delaycal.export.svg_plot import Panel, PlotRenderer, Series, batch_panels, trace_panels

__all__ = [
    "CONFIG_FILE",
    "PER_STEP_FILE",
    "PER_TRIAL_FILE",
    "REPORT_INPUTS",
    "SUMMARY_FILE",
    "TOTALS_FILE",
    "TRACES_FILE",
    "Panel",
    "PlotRenderer",
    "Series",
    "batch_panels",
    "read_batch_dir",
    "trace_panels",
    "write_batch_summary_csv",
    "write_batch_totals_csv",
    "write_identifiability_csv",
    "write_per_step_stats_csv",
    "write_per_trial_csv",
    "write_trace_csv",
    "write_traces_csv",
]

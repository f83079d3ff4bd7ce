"""
Unit Tests for the Export Layer

Tests for CSV formatting, batch read-back and SVG rendering.
"""

import xml.etree.ElementTree as ET

import numpy as np
import pytest

from delaycal.errors import ReportInputError
from delaycal.export import (
    Panel,
    PlotRenderer,
    Series,
    read_batch_dir,
    write_per_trial_csv,
    write_traces_csv,
)
from delaycal.export.csv_writer import fmt, write_batch_summary_csv
from delaycal.montecarlo import ExperimentConfig, aggregate_batch, dump_config, run_trial


@pytest.mark.unit
class TestFormatting:
    """Test suite for CSV value formatting."""

    def test_float_round_trips(self):
        """Test 17 significant digits read back bit-identical."""
        value = 0.1 + 0.2
        assert float(fmt(value)) == value

    def test_special_values(self):
        """Test None, booleans and integers."""
        assert fmt(None) == ""
        assert fmt(True) == "1"
        assert fmt(np.bool_(False)) == "0"
        assert fmt(np.int64(12)) == "12"

    def test_labels_pass_through(self):
        """Test metric names are written verbatim."""
        assert fmt("rms_delay_ms") == "rms_delay_ms"
        assert fmt("") == ""

    def test_batch_summary_rows(self, tmp_path):
        """Test the summary table writes one labelled row per metric."""
        config = ExperimentConfig(n_trials=3, horizon_steps=40)
        stats = aggregate_batch(config, [run_trial(config, i) for i in range(3)]).stats

        lines = write_batch_summary_csv(stats, tmp_path / "summary.csv").read_text().splitlines()

        assert lines[0] == "metric,20,40"
        assert [line.split(",")[0] for line in lines[1:]][:2] == ["rms_position_m", "rms_delay_ms"]
        assert all(len(line.split(",")) == 3 for line in lines[1:])


@pytest.mark.unit
class TestBatchReadBack:
    """Test suite for rebuilding traces from CSV."""

    def test_traces_round_trip(self, tmp_path):
        """Test written traces read back identical."""
        config = ExperimentConfig(n_trials=3, horizon_steps=12)
        traces = [run_trial(config, i) for i in range(3)]
        result = aggregate_batch(config, traces)
        (tmp_path / "config.json").write_text(dump_config(config))
        write_per_trial_csv(result.trials, tmp_path / "per_trial.csv")
        write_traces_csv(traces, tmp_path / "traces.csv")

        loaded_config, loaded = read_batch_dir(tmp_path)

        assert loaded_config == config
        for original, copy in zip(traces, loaded):
            np.testing.assert_array_equal(original.e_x, copy.e_x)
            np.testing.assert_array_equal(original.P, copy.P)
            np.testing.assert_array_equal(original.nees, copy.nees)
            np.testing.assert_array_equal(original.backward, copy.backward)
            assert original.tau_true == copy.tau_true

    def test_trial_count_mismatch(self, tmp_path):
        """Test a per-trial file shorter than the config is rejected."""
        config = ExperimentConfig(n_trials=3, horizon_steps=5)
        traces = [run_trial(config, 0)]
        (tmp_path / "config.json").write_text(dump_config(config))
        single = aggregate_batch(config.model_copy(update={"n_trials": 1}), traces)
        write_per_trial_csv(single.trials, tmp_path / "per_trial.csv")
        write_traces_csv(traces, tmp_path / "traces.csv")

        with pytest.raises(ReportInputError):
            read_batch_dir(tmp_path)

    def test_missing_directory(self, tmp_path):
        """Test a non-existent directory is rejected."""
        with pytest.raises(ReportInputError):
            read_batch_dir(tmp_path / "missing")


@pytest.mark.unit
class TestPlotRenderer:
    """Test suite for the SVG renderer."""

    def test_one_polyline_per_series(self):
        """Test structure and escaping of the rendered SVG."""
        panels = [
            Panel(
                "A <&> B",
                [Series("s1", [0, 1, 2], [0.0, 1.0, 4.0]), Series("s2", [0, 1, 2], [1.0, 1.0, 1.0])],
            ),
            Panel("C", [Series("s3", [0, 1], [float("nan"), 2.0])]),
        ]
        svg = PlotRenderer().render("title", panels)
        root = ET.fromstring(svg.encode("utf-8"))

        assert len(root.findall(".//{http://www.w3.org/2000/svg}polyline")) == 3
        assert "A &lt;&amp;&gt; B" in svg

    def test_no_timestamps(self):
        """Test rendering is a pure function of the data."""
        def panels():
            return [Panel("P", [Series("s", [0, 1], [0.0, 1.0])])]

        assert PlotRenderer().render("t", panels()) == PlotRenderer().render("t", panels())

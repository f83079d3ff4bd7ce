"""
Tests for the Monte Carlo Runner

Tests for experiment configuration, seed derivation, single trials and
batch aggregation.
"""

import json
import random
from pathlib import Path

import numpy as np
import pytest

from delaycal.errors import ConfigError
from delaycal.montecarlo import (
    ExperimentConfig,
    FixedDelay,
    SampledDelay,
    aggregate_batch,
    apply_overrides,
    derive_trial_seed,
    draw_trial_inputs,
    dump_config,
    load_config,
    run_batch,
    run_trial,
    trial_rng,
    validate_config,
)


CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def small_config(**overrides) -> ExperimentConfig:
    values = {"n_trials": 8, "horizon_steps": 30}
    values.update(overrides)
    return ExperimentConfig.model_validate(values)


# ============================================================================
# Configuration
# ============================================================================

@pytest.mark.unit
class TestExperimentConfig:
    """Test suite for ExperimentConfig validation and loading."""

    def test_defaults(self):
        """Test the default experiment protocol."""
        config = ExperimentConfig()

        assert config.trajectory == "traj1"
        assert config.n_trials == 1000
        assert config.horizon_steps == 100
        assert config.meas_rate == 10.0
        assert config.meas_noise_std == 0.25
        assert config.Qx == 1.0
        assert config.P0 == [[0.01, 0.0], [0.0, 0.25]]
        assert config.delay_mode == FixedDelay(value=-0.05)
        assert config.divergence_cap == 1e6
        assert config.noise_model().R == pytest.approx(0.0625)

    def test_delay_mode_discriminator(self):
        """Test the delay mode is selected by its kind field."""
        config = ExperimentConfig.model_validate({"delay_mode": {"kind": "sampled", "std": 0.05}})
        assert isinstance(config.delay_mode, SampledDelay)

    @pytest.mark.parametrize(
        "bad",
        [
            {"P0": [[0.01, 0.0], [0.0, -0.25]]},
            {"P0": [[0.01, 0.2], [0.0, 0.25]]},
            {"P0": [[0.01]]},
            {"n_trials": 0},
            {"meas_rate": 0.0},
            {"control_rate": 5.0},
            {"delay_mode": {"kind": "sampled", "std": 0.0}},
            {"trajectory": "traj9"},
            {"trajectory": "custom", "custom_terms": [{"amplitude": 1.0, "frequency": 0.0}]},
            {"unknown_field": 1},
            {"meas_noise_std": 0.0},
            {"meas_noise_std": 0.0, "filter_R": 0.0},
        ],
    )
    def test_invalid_configs(self, bad):
        """Test invalid fields are reported as ConfigError."""
        with pytest.raises(ConfigError):
            validate_config(bad)

    def test_custom_trajectory(self):
        """Test an excited custom trajectory validates."""
        config = validate_config(
            {"trajectory": "custom", "custom_terms": [{"amplitude": 1.0, "frequency": 2.0, "phase": 0.1}]}
        )
        assert config.trajectory_model().is_excited

    def test_filter_variance(self):
        """Test R defaults to the plant noise variance and filter_R overrides it."""
        assert ExperimentConfig(meas_noise_std=0.5).noise_model().R == 0.25
        noiseless = ExperimentConfig(meas_noise_std=0.0, filter_R=1e-12)
        assert noiseless.noise_model().R == 1e-12
        assert noiseless.plant_config(0.0).meas_noise_std == 0.0

    def test_overrides(self):
        """Test dotted overrides with JSON values."""
        raw = apply_overrides(
            {"delay_mode": {"kind": "fixed"}},
            ["delay_mode.value=-0.08", "trajectory=traj2", "n_trials=5"],
        )

        assert raw == {"delay_mode": {"kind": "fixed", "value": -0.08}, "trajectory": "traj2", "n_trials": 5}

    def test_override_without_equals(self):
        """Test a malformed override raises ConfigError."""
        with pytest.raises(ConfigError):
            apply_overrides({}, ["n_trials"])

    def test_load_missing_file(self, tmp_path):
        """Test a missing config names the path."""
        path = tmp_path / "absent.json"
        with pytest.raises(ConfigError, match="absent.json"):
            load_config(path)

    def test_load_invalid_json(self, tmp_path):
        """Test malformed JSON raises ConfigError."""
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_dump_round_trip(self, tmp_path):
        """Test the config echo reloads to the same config."""
        config = small_config(delay_mode={"kind": "sampled", "std": 0.05}, trajectory="traj2")
        path = tmp_path / "config.json"
        path.write_text(dump_config(config))

        assert load_config(path) == config

    @pytest.mark.parametrize(
        "name",
        ["traj1_sampled", "traj2_sampled", "traj1_fixed", "traj2_fixed", "baseline_traj1", "traj2_fixed_long"],
    )
    def test_shipped_configs_validate(self, name):
        """Test every shipped config loads."""
        config = load_config(CONFIG_DIR / f"{name}.json")
        assert config.meas_noise_std == 0.25


# ============================================================================
# Seeding
# ============================================================================

@pytest.mark.unit
class TestSeeding:
    """Test suite for trial seed derivation."""

    def test_deterministic(self):
        """Test the same (master, index) gives the same seed."""
        assert derive_trial_seed(42, 7) == derive_trial_seed(42, 7)

    def test_distinct_indices(self):
        """Test no collisions among the first 100,000 trial seeds."""
        seeds = {derive_trial_seed(0, i) for i in range(100_000)}
        assert len(seeds) == 100_000

    def test_distinct_masters(self):
        """Test different master seeds give different trial seeds."""
        assert derive_trial_seed(0, 3) != derive_trial_seed(1, 3)

    def test_uniformity(self):
        """Test the mean of 10^6 uniforms lies in [0.498, 0.502]."""
        mean = trial_rng(derive_trial_seed(0, 0)).random(1_000_000).mean()
        assert 0.498 <= mean <= 0.502

    def test_sampled_delay_std(self):
        """Test the sample std of tau_true over 10^4 trials is within 49-51 ms."""
        config = ExperimentConfig(delay_mode=SampledDelay(std=0.05), n_trials=10_000)
        taus = [draw_trial_inputs(config, derive_trial_seed(0, i))[0] for i in range(10_000)]
        assert 0.049 <= np.std(taus, ddof=1) <= 0.051

    def test_initial_position_prior(self):
        """Test true initial positions follow N(x_hat0, P0[0][0])."""
        config = ExperimentConfig(x_hat0=1.0)
        x0 = np.array([draw_trial_inputs(config, derive_trial_seed(3, i))[1] for i in range(4000)])
        assert abs(x0.mean() - 1.0) < 0.01
        assert 0.09 < x0.std() < 0.11


# ============================================================================
# Trials
# ============================================================================

@pytest.mark.unit
class TestRunTrial:
    """Test suite for single trials."""

    def test_replay_determinism(self):
        """Test identical inputs give identical traces."""
        config = small_config()
        a = run_trial(config, 3)
        b = run_trial(config, 3)

        np.testing.assert_array_equal(a.e_x, b.e_x)
        np.testing.assert_array_equal(a.P, b.P)
        assert a.seed == b.seed

    def test_trace_shapes(self):
        """Test one row per step with a 2-D state."""
        trace = run_trial(small_config(), 0)

        assert not trace.diverged
        assert trace.steps_completed == 30
        assert trace.e_x.shape == (30, 2)
        assert trace.P.shape == (30, 2, 2)
        assert list(trace.k) == list(range(1, 31))
        assert trace.tau_true == -0.05

    def test_known_delay_trace(self):
        """Test the baseline records a 1-D state and the true delay."""
        trace = run_trial(small_config(filter_kind="known_delay", Qx=0.0), 1)

        assert trace.dim == 1
        assert trace.P.shape == (30, 1, 1)
        assert np.all(trace.tau_hat == trace.tau_true)
        assert not trace.backward.any()

    def test_noiseless_fixed_zero_delay(self):
        """Test a pinned zero delay and noiseless plant track the position to 1e-9 from step 10."""
        config = small_config(
            delay_mode={"kind": "fixed", "value": 0.0},
            meas_noise_std=0.0,
            filter_R=1e-12,
            P0=[[0.0, 0.0], [0.0, 0.0]],
            control_rate=10_000.0,
            control_margin=2.0,
        )
        trace = run_trial(config, 0)

        assert not trace.diverged
        assert trace.steps_completed == 30
        assert np.all(trace.tau_hat == 0.0)
        assert np.max(np.abs(trace.e_x[9:, 0])) < 1e-9

    def test_singular_covariance_keeps_trial_running(self):
        """Test an undefined NEES is recorded as NaN instead of ending the trial."""
        config = small_config(
            delay_mode={"kind": "fixed", "value": 0.0},
            P0=[[0.01, 0.0], [0.0, 0.0]],
        )
        trace = run_trial(config, 3)

        assert not trace.diverged
        assert trace.steps_completed == 30
        assert np.all(np.isnan(trace.nees))
        assert np.all(np.isfinite(trace.nis))

    def test_divergence_is_recorded(self):
        """Test a tiny divergence cap marks the trial diverged without raising."""
        trace = run_trial(small_config(divergence_cap=1e-9), 0)

        assert trace.diverged
        assert trace.steps_completed == 0
        assert "divergence cap" in trace.divergence_reason

    def test_uncovered_propagation_is_recorded(self):
        """Test leaving the control stream is a recorded failure."""
        trace = run_trial(small_config(control_margin=0.0, tau_hat0=-0.5), 0)

        assert trace.diverged
        assert trace.divergence_reason.startswith("CoverageError")

    def test_error_reference_switch(self):
        """Test the measurement-time reference changes the position error only."""
        a = run_trial(small_config(), 2)
        b = run_trial(small_config(error_reference="measurement_time"), 2)

        np.testing.assert_array_equal(a.tau_hat, b.tau_hat)
        np.testing.assert_array_equal(a.e_x[:, 1], b.e_x[:, 1])
        assert not np.array_equal(a.e_x[:, 0], b.e_x[:, 0])


# ============================================================================
# Batches
# ============================================================================

@pytest.mark.integration
class TestRunBatch:
    """Test suite for batch execution and aggregation."""

    def test_single_trial_batch(self):
        """Test n_trials = 1 gives the trace's own values."""
        config = small_config(n_trials=1)
        result = run_batch(config, workers=1)
        trace = run_trial(config, 0)

        np.testing.assert_array_equal(result.stats.anees, trace.nees)
        assert len(result.trials) == 1

    def test_order_independence(self):
        """Test aggregating trials run in shuffled order matches the batch."""
        config = small_config()
        order = list(range(config.n_trials))
        random.Random(1).shuffle(order)
        shuffled = aggregate_batch(config, [run_trial(config, i) for i in order])
        batch = run_batch(config, workers=1)

        np.testing.assert_allclose(shuffled.stats.anees, batch.stats.anees, rtol=0.0, atol=1e-12)
        np.testing.assert_allclose(shuffled.stats.rms_delay_ms, batch.stats.rms_delay_ms, rtol=0.0, atol=1e-12)
        assert [t.trial_index for t in shuffled.trials] == sorted(order)

    def test_worker_count_does_not_matter(self, monkeypatch):
        """Test one and two workers give identical statistics."""
        monkeypatch.delenv("DELAYCAL_THREADS", raising=False)
        config = small_config()
        one = run_batch(config, workers=1)
        two = run_batch(config, workers=2)

        np.testing.assert_array_equal(one.stats.anees, two.stats.anees)
        np.testing.assert_array_equal(one.stats.containment_delay, two.stats.containment_delay)

    def test_trial_count_matches_config(self):
        """Test per-trial summaries follow trial index order."""
        result = run_batch(small_config(n_trials=5), workers=1)

        assert [t.trial_index for t in result.trials] == [0, 1, 2, 3, 4]
        assert result.stats.n_trials == 5
        assert json.loads(dump_config(result.config))["n_trials"] == 5

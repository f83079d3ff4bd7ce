"""
Unit Tests for Consistency Statistics

Tests for NIS/NEES/ANEES, chi-square quantiles, RMS and containment, and
batch aggregation. scipy.stats serves only as an independent oracle.
"""

import random
from dataclasses import replace

import numpy as np
import pytest
from scipy import stats as scipy_stats

from delaycal.consistency import (
    TABLE_STEPS,
    anees,
    chi2_anees_interval,
    chi2_cdf,
    chi2_quantile,
    compute_batch_stats,
    containment_3sigma,
    excess_over_bound,
    nees,
    nis,
    nis_exceed_fraction,
    rms_per_step,
    shows_apparent_divergence,
    summary_table,
)
from delaycal.errors import ArgumentError, NumericalFailureError
from tests.helpers import make_trace

P2 = np.array([[0.04, 0.01], [0.01, 0.09]])


def _random_traces(n_trials=30, n_steps=25, seed=5, dim=2):
    rng = np.random.default_rng(seed)
    traces = []
    for i in range(n_trials):
        P = np.tile(P2[:dim, :dim], (n_steps, 1, 1))
        e_x = rng.multivariate_normal(np.zeros(dim), P2[:dim, :dim], size=n_steps)
        traces.append(
            make_trace(
                i,
                e_x,
                P,
                nis=rng.chisquare(1, n_steps),
                tau_hat=rng.normal(0.0, 0.1, n_steps),
                interval=rng.uniform(-0.05, 0.2, n_steps),
                backward=rng.random(n_steps) < 0.1,
            )
        )
    return traces


# ============================================================================
# NIS / NEES
# ============================================================================

@pytest.mark.unit
class TestNormalizedErrors:
    """Test suite for NIS and NEES."""

    def test_nis(self):
        """Test e_y^2 / S."""
        assert nis(2.0, 4.0) == 1.0
        assert nis(-0.5, 0.25) == 1.0

    def test_nis_requires_positive_variance(self):
        """Test S <= 0 raises NumericalFailureError."""
        with pytest.raises(NumericalFailureError):
            nis(1.0, 0.0)

    def test_nees_scalar_and_matrix(self):
        """Test NEES for 1-D and 2-D states."""
        assert nees([0.2], [[0.04]]) == pytest.approx(1.0)
        e = np.array([0.3, -0.02])
        assert nees(e, P2) == pytest.approx(float(e @ np.linalg.inv(P2) @ e), rel=1e-12)

    @pytest.mark.parametrize("c", [0.5, 2.0])
    def test_nees_scale_invariance_exact(self, c):
        """Test NEES is unchanged exactly when errors scale by a power of two."""
        e = np.array([0.3, -0.02])
        assert nees(c * e, c * c * P2) == nees(e, P2)

    def test_nees_scale_invariance_decimal(self):
        """Test NEES under a factor 10 rescale."""
        e = np.array([0.3, -0.02])
        assert nees(10.0 * e, 100.0 * P2) == pytest.approx(nees(e, P2), rel=1e-13)

    def test_nees_singular_covariance(self):
        """Test a singular covariance raises NumericalFailureError."""
        with pytest.raises(NumericalFailureError):
            nees([0.1, 0.1], np.zeros((2, 2)))


# ============================================================================
# Chi-square quantiles
# ============================================================================

@pytest.mark.unit
class TestChiSquare:
    """Test suite for the in-repo chi-square quantile."""

    @pytest.mark.parametrize("dof", [1, 2, 7, 200, 1000, 2000])
    @pytest.mark.parametrize("p", [0.001, 0.025, 0.5, 0.95, 0.975, 0.999])
    def test_matches_oracle(self, p, dof):
        """Test quantiles against scipy.stats.chi2.ppf."""
        expected = scipy_stats.chi2.ppf(p, dof)
        assert chi2_quantile(p, dof) == pytest.approx(expected, rel=1e-8)

    @pytest.mark.parametrize("dof", [1, 3, 1000])
    @pytest.mark.parametrize("p", [0.01, 0.3, 0.9])
    def test_round_trip(self, p, dof):
        """Test cdf(quantile(p)) == p within 1e-8."""
        assert abs(chi2_cdf(chi2_quantile(p, dof), dof) - p) < 1e-8

    def test_anees_interval_one_dof(self):
        """Test the dof=1, N=1000 interval is about [0.914, 1.090]."""
        lo, hi = chi2_anees_interval(1, 1000)
        assert lo == pytest.approx(scipy_stats.chi2.ppf(0.025, 1000) / 1000, rel=1e-8)
        assert hi == pytest.approx(scipy_stats.chi2.ppf(0.975, 1000) / 1000, rel=1e-8)
        assert 0.913 < lo < 0.915
        assert 1.089 < hi < 1.091

    def test_invalid_arguments(self):
        """Test out-of-range inputs raise ArgumentError."""
        with pytest.raises(ArgumentError):
            chi2_quantile(1.0, 2)
        with pytest.raises(ArgumentError):
            chi2_quantile(0.5, 0)
        with pytest.raises(ArgumentError):
            chi2_anees_interval(2, 0)


# ============================================================================
# Per-step statistics
# ============================================================================

@pytest.mark.unit
class TestPerStepStatistics:
    """Test suite for ANEES, RMS, containment and exceedance."""

    def test_anees_and_exclusions(self):
        """Test ANEES averages non-diverged trials and counts the excluded."""
        P = np.ones((2, 1, 1))
        traces = [
            make_trace(0, [1.0, 2.0], P),
            make_trace(1, [3.0, 0.0], P),
            make_trace(2, [100.0, 100.0], P, diverged=True),
        ]
        value, excluded = anees(traces, 1)

        assert value == pytest.approx(5.0)
        assert excluded == 1
        assert anees(traces, 2)[0] == pytest.approx(2.0)

    def test_rms_per_step(self):
        """Test RMS of the position error at each step."""
        P = np.ones((2, 1, 1))
        traces = [make_trace(0, [1.0, 1.0], P), make_trace(1, [3.0, -3.0], P)]
        np.testing.assert_allclose(rms_per_step(traces, "position"), [np.sqrt(5.0)] * 2)

    def test_rms_delay_needs_augmented_state(self):
        """Test asking a 1-D batch for delay RMS raises ArgumentError."""
        traces = [make_trace(0, [1.0], np.ones((1, 1, 1)))]
        with pytest.raises(ArgumentError):
            rms_per_step(traces, "delay")

    def test_containment_bound_is_closed(self):
        """Test an error exactly at 3 sigma counts as contained."""
        P = np.ones((1, 1, 1))
        traces = [make_trace(0, [3.0], P), make_trace(1, [-3.0000001], P)]
        assert containment_3sigma(traces, 1, "position") == 0.5

    def test_containment_steps_start_at_one(self):
        """Test step 0 raises ArgumentError instead of reading the last step."""
        traces = [make_trace(0, [1.0, 5.0], np.ones((2, 1, 1)))]
        with pytest.raises(ArgumentError):
            containment_3sigma(traces, 0, "position")
        assert containment_3sigma(traces, 2, "position") == 0.0

    def test_anees_skips_undefined_nees(self):
        """Test NaN NEES entries are left out of the average."""
        P = np.ones((1, 1, 1))
        undefined = replace(make_trace(1, [9.0], P), nees=np.array([np.nan]))
        traces = [make_trace(0, [2.0], P), undefined]

        value, excluded = anees(traces, 1)
        assert value == pytest.approx(4.0)
        assert excluded == 0

    def test_nis_exceed_fraction(self):
        """Test the one-dof 95% threshold (about 3.84)."""
        P = np.ones((1, 1, 1))
        traces = [make_trace(0, [0.0], P, nis=[0.5]), make_trace(1, [0.0], P, nis=[5.0])]
        assert nis_exceed_fraction(traces, 1) == 0.5


# ============================================================================
# Batch aggregation
# ============================================================================

@pytest.mark.unit
class TestBatchStats:
    """Test suite for compute_batch_stats."""

    def test_order_independence(self):
        """Test shuffled traces give identical statistics."""
        traces = _random_traces()
        shuffled = traces[:]
        random.Random(3).shuffle(shuffled)

        a = compute_batch_stats(traces, meas_period=0.1)
        b = compute_batch_stats(shuffled, meas_period=0.1)

        np.testing.assert_array_equal(a.anees, b.anees)
        np.testing.assert_array_equal(a.rms_delay_ms, b.rms_delay_ms)
        np.testing.assert_array_equal(a.mean_nis, b.mean_nis)
        assert a.mean_signed_integration == b.mean_signed_integration
        assert a.backward_time_events == b.backward_time_events

    def test_single_trial_degenerates(self):
        """Test one trace gives its own values."""
        trace = _random_traces(n_trials=1)[0]
        stats = compute_batch_stats([trace], meas_period=0.1)

        np.testing.assert_allclose(stats.anees, trace.nees, rtol=1e-15)
        np.testing.assert_allclose(stats.rms_position, np.abs(trace.e_x[:, 0]), rtol=1e-15)
        np.testing.assert_allclose(stats.mean_nis, trace.nis, rtol=1e-15)

    def test_diverged_trials_excluded(self):
        """Test diverged traces drop out with their count reported."""
        traces = _random_traces(n_trials=4)
        bad = make_trace(9, np.full((25, 2), 1e9), np.tile(P2, (25, 1, 1)), diverged=True)
        stats = compute_batch_stats(traces + [bad], meas_period=0.1)
        clean = compute_batch_stats(traces, meas_period=0.1)

        assert stats.n_trials == 5
        assert stats.n_excluded == 1
        assert stats.n_used == 4
        np.testing.assert_array_equal(stats.anees, clean.anees)

    def test_intervals_and_dof(self):
        """Test the ANEES interval uses dof * N and NIS uses one dof."""
        stats = compute_batch_stats(_random_traces(n_trials=20), meas_period=0.1)

        assert stats.dof == 2
        assert stats.anees_interval == chi2_anees_interval(2, 20)
        assert stats.nis_interval == chi2_anees_interval(1, 20)

    def test_integration_accounting(self):
        """Test signed and absolute integrated time against the nominal span."""
        P = np.ones((3, 1, 1))
        trace = make_trace(0, [0.0, 0.0, 0.0], P, interval=[0.1, -0.3, 0.1], backward=[False, True, False])
        stats = compute_batch_stats([trace], meas_period=0.1)

        assert stats.mean_signed_integration == pytest.approx(-0.1)
        assert stats.mean_abs_integration == pytest.approx(0.5)
        assert stats.nominal_elapsed == pytest.approx(0.3)
        assert stats.backward_time_events == 1

    def test_baseline_batch_has_no_delay_fields(self):
        """Test a 1-D batch reports no delay statistics."""
        stats = compute_batch_stats(_random_traces(n_trials=5, dim=1), meas_period=0.1)

        assert stats.dof == 1
        assert stats.rms_delay_ms is None
        assert stats.containment_delay is None
        assert "rms_delay_ms" not in summary_table(stats)

    def test_summary_table_columns(self):
        """Test table rows hold one value per table step."""
        stats = compute_batch_stats(_random_traces(n_trials=3, n_steps=100), meas_period=0.1)
        table = summary_table(stats)

        assert TABLE_STEPS == (20, 40, 60, 80, 100)
        assert all(len(values) == 5 for values in table.values())
        assert table["anees"][-1] == stats.anees[99]

    def test_excess_over_bound(self):
        """Test the ANEES to upper-bound ratio and its out-of-range step."""
        stats = compute_batch_stats(_random_traces(n_trials=4, n_steps=30), meas_period=0.1)

        assert excess_over_bound(stats, 30) == pytest.approx(stats.anees[29] / stats.anees_interval[1])
        assert excess_over_bound(stats, 31) is None


@pytest.mark.unit
class TestApparentDivergence:
    """Test suite for the settled-but-biased detector."""

    def _trace(self, tau_error):
        n = 30
        P = np.tile(np.diag([0.01, 1e-4]), (n, 1, 1))
        e_x = np.column_stack([np.zeros(n), np.full(n, tau_error)])
        return make_trace(0, e_x, P, tau_hat=np.full(n, -0.02))

    def test_settled_and_biased(self):
        """Test a flat estimate with error beyond 3 sigma is flagged."""
        assert shows_apparent_divergence(self._trace(0.05))

    def test_settled_and_consistent(self):
        """Test a flat estimate with error inside 3 sigma is not flagged."""
        assert not shows_apparent_divergence(self._trace(0.01))

    def test_short_trace(self):
        """Test traces shorter than the window are never flagged."""
        assert not shows_apparent_divergence(self._trace(0.05), window=50)

    def test_fraction_in_batch(self):
        """Test the batch reports the flagged fraction."""
        stats = compute_batch_stats([self._trace(0.05), self._trace(0.0)], meas_period=0.1)
        assert stats.apparent_divergence_frac == 0.5

import math

import numpy as np
import pytest

from analysis.density_evolution import threshold
from analysis.scaling import scaling_params
from analysis.variance import variance_finite
from models.ensemble import DegreePair
from models.simulation import SimEstimate
from shared.errors import SimulationError
from shared.metrics import wilson_interval
from simulation.trials import (
    erasure_mask,
    estimate_message_variance,
    fit_scaling,
    mean_trajectory,
    run_trials,
    split_size,
)

EPS_STAR = 0.4294398


def _synthetic_estimate(n, eps, alpha, beta, trials=1_000_000):
    """Block-error estimate that follows the waterfall model exactly."""
    z = math.sqrt(n) * (EPS_STAR - beta * n ** (-2.0 / 3.0) - eps) / alpha
    p = 0.5 * math.erfc(z / math.sqrt(2.0))
    failures = int(round(p * trials))
    size = n // 2
    return SimEstimate(
        n=n,
        epsilon=eps,
        trials=trials,
        seed=0,
        block_failures=failures,
        residual_bits=failures * size,
        p_block=failures / trials,
        p_block_ci=wilson_interval(failures, trials),
        p_bit=failures * size / (n * trials),
        p_bit_ci=wilson_interval(failures * size, n * trials),
        size_histogram={size: failures} if failures else {},
    )


class TestErasureMask:
    def test_deterministic(self):
        first = erasure_mask(100, 0.3, 7, 4)
        assert np.array_equal(first, erasure_mask(100, 0.3, 7, 4))

    def test_trials_differ(self):
        first = erasure_mask(100, 0.3, 7, 4)
        assert not np.array_equal(first, erasure_mask(100, 0.3, 7, 5))

    def test_extremes(self):
        assert not erasure_mask(50, 0.0, 1, 0).any()
        assert erasure_mask(50, 1.0, 1, 0).all()


class TestRunTrials:
    """Monte Carlo block and bit erasure rates"""

    def test_zero_channel(self, regular_pair):
        """ε = 0: no failures and a Wilson interval starting at zero"""
        est = run_trials(100, regular_pair, 0.0, trials=50, seed=1)
        assert est.p_block == 0.0
        assert est.p_bit == 0.0
        assert est.p_block_ci.low == 0.0
        assert est.size_histogram == {}

    def test_rates_ordered(self, regular_pair):
        """p_bit ≤ p_block ≤ n·p_bit"""
        est = run_trials(200, regular_pair, 0.44, trials=100, seed=3)
        assert est.block_failures > 0
        assert est.p_bit <= est.p_block <= est.n * est.p_bit
        assert est.p_block_ci.contains(est.p_block)

    def test_split_counts(self, regular_pair):
        """Floor and waterfall failures partition the failures"""
        est = run_trials(200, regular_pair, 0.44, trials=100, seed=3, gamma_split=0.5)
        assert est.split_size == split_size(200, regular_pair, 0.5)
        assert est.floor_failures + est.waterfall_failures == est.block_failures

    def test_split_size_formula(self, regular_pair):
        """⌈n γ ν*⌉"""
        nu_star = threshold(regular_pair).critical.nu_star
        assert split_size(1000, regular_pair, 0.5) == math.ceil(1000 * 0.5 * nu_star)

    def test_split_size_without_critical_point(self):
        pair = DegreePair.from_maps({2: 1.0}, {3: 1.0})
        assert split_size(1000, pair, 0.5) is None

    def test_same_seed_same_estimate(self, regular_pair):
        a = run_trials(150, regular_pair, 0.42, trials=60, seed=11)
        b = run_trials(150, regular_pair, 0.42, trials=60, seed=11)
        assert a.size_histogram == b.size_histogram
        assert a.residual_bits == b.residual_bits

    def test_independent_of_workers(self, regular_pair):
        """Results do not depend on how trials are spread over processes"""
        single = run_trials(150, regular_pair, 0.43, trials=40, seed=4, workers=1)
        pooled = run_trials(150, regular_pair, 0.43, trials=40, seed=4, workers=2)
        assert single.size_histogram == pooled.size_histogram
        assert single.block_failures == pooled.block_failures
        assert single.graphs_sampled == pooled.graphs_sampled

    def test_trials_per_graph(self, regular_pair):
        """Several erasure patterns share one code"""
        est = run_trials(100, regular_pair, 0.3, trials=25, seed=2, trials_per_graph=10)
        assert est.trials == 25
        assert est.graphs_sampled == 3

    def test_expurgation_counts_samples(self, regular_pair):
        est = run_trials(60, regular_pair, 0.3, trials=6, seed=2, expurgate_below=4)
        assert est.expurgate_below == 4
        assert est.graphs_sampled == 6 + est.graphs_rejected

    def test_invalid_arguments(self, regular_pair):
        with pytest.raises(ValueError):
            run_trials(100, regular_pair, 0.3, trials=0)
        with pytest.raises(ValueError):
            run_trials(100, regular_pair, 1.3, trials=10)


class TestFitScaling:
    """Least-squares fit of the waterfall model"""

    def test_recovers_synthetic_parameters(self):
        alpha, beta = 0.56, 0.6
        estimates = [
            _synthetic_estimate(n, eps, alpha, beta)
            for n in (1000, 4000)
            for eps in np.linspace(0.39, 0.44, 9)
        ]
        fit = fit_scaling(estimates, EPS_STAR)
        assert abs(fit.alpha - alpha) <= 2.0 * fit.alpha_se + 1e-4
        assert abs(fit.beta - beta) <= 2.0 * fit.beta_se + 1e-4
        assert fit.blocklengths == (1000, 4000)
        assert fit.points == 18

    def test_single_blocklength_rejected(self):
        estimates = [
            _synthetic_estimate(1000, eps, 0.56, 0.6)
            for eps in np.linspace(0.39, 0.44, 9)
        ]
        with pytest.raises(SimulationError):
            fit_scaling(estimates, EPS_STAR)

    def test_too_few_epsilons_rejected(self):
        estimates = [
            _synthetic_estimate(n, eps, 0.56, 0.6)
            for n in (1000, 4000)
            for eps in (0.40, 0.41, 0.42)
        ]
        with pytest.raises(SimulationError):
            fit_scaling(estimates, EPS_STAR)

    @pytest.mark.slow
    def test_simulated_alpha_matches_closed_form(self, regular_pair):
        """Fitted α̂ on simulated (3,6) curves is within 15% of α"""
        params = scaling_params(regular_pair, threshold(regular_pair))
        estimates = []
        for n in (2048, 8192):
            center = params.eps_star - params.beta * n ** (-2.0 / 3.0)
            width = 2.0 * params.alpha / math.sqrt(n)
            for eps in np.linspace(center - width, center + width, 7):
                estimates.append(
                    run_trials(
                        n, regular_pair, float(eps), 2000, seed=n, trials_per_graph=10
                    )
                )
        fit = fit_scaling(estimates, params.eps_star)
        assert fit.alpha == pytest.approx(params.alpha, rel=0.15)


class TestMeanTrajectory:
    def test_shape(self, regular_pair):
        traj = mean_trajectory(500, regular_pair, 0.4, samples=5, seed=1, bins=20)
        rows = traj.rows()
        assert len(rows) == 20
        assert sum(traj.counts) > 0
        assert all(r["predicted_r1"] >= 0.0 for r in rows)

    def test_prediction_tracks_mean(self, regular_pair):
        """Away from the end of decoding the mean R₁/n follows n·L'(1)·r₁(y)/n"""
        traj = mean_trajectory(4000, regular_pair, 0.38, samples=10, seed=2, bins=10)
        for row in traj.rows()[3:]:
            if row["count"] > 50:
                assert row["mean_r1"] == pytest.approx(row["predicted_r1"], abs=0.02)

    def test_zero_epsilon_rejected(self, regular_pair):
        with pytest.raises(ValueError):
            mean_trajectory(100, regular_pair, 0.0, samples=2)


class TestMessageVariance:
    def test_round_zero_mean(self, regular_pair):
        """Before any BP round the erased-message fraction is ε on average"""
        est = estimate_message_variance(2000, regular_pair, 0.3, 0, samples=50, seed=1)
        assert est.mean == pytest.approx(0.3, abs=0.02)

    @pytest.mark.slow
    @pytest.mark.parametrize("ell", [0, 1, 2])
    def test_matches_analytic_variance(self, variance_pair, ell):
        """Sample variance agrees with the large-n formula within 3 standard errors"""
        est = estimate_message_variance(4000, variance_pair, 0.6, ell, samples=4000)
        expected = variance_finite(variance_pair, 0.6, ell)
        assert abs(est.variance - expected) <= 3.0 * est.std_error

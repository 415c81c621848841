import math

import numpy as np
import pytest

from analysis.density_evolution import threshold
from analysis.ensemble import edge_to_node, random_pair
from analysis.scaling import (
    alpha,
    beta,
    gamma_const,
    scaling_params,
    scaling_per_critical_point,
)
from analysis.variance import scaled_variance_limit
from models.ensemble import DegreePair
from shared.errors import ScalingError


def _bridge_alpha(pair, de):
    """α recovered from γ: sqrt(γ / (L'(1) x*² λ'(y*)² ρ'(x̄*)²))."""
    cp = de.critical
    avg_var = edge_to_node(pair).avg_var_degree
    lam_slope = float(pair.lam.deriv(cp.y_star))
    rho_slope = float(pair.rho.deriv(cp.x_bar_star))
    return math.sqrt(
        gamma_const(pair, de)
        / (avg_var * cp.x_star**2 * lam_slope**2 * rho_slope**2)
    )


class TestAlpha:
    """Waterfall width"""

    def test_regular_value(self, regular_pair):
        """(3,6)-regular has α = 0.56036"""
        de = threshold(regular_pair)
        assert alpha(regular_pair, de) == pytest.approx(0.56036, rel=1e-3)

    def test_bridge_identity_regular(self, regular_pair):
        """α agrees with the variance constant γ"""
        de = threshold(regular_pair)
        assert alpha(regular_pair, de) == pytest.approx(
            _bridge_alpha(regular_pair, de), rel=1e-9
        )

    def test_bridge_identity_random_ensembles(self, coarse_settings):
        """The identity holds on ten random single-critical ensembles"""
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(300):
            pair = random_pair(6, 8, rng)
            de = threshold(pair, settings=coarse_settings)
            if de.degenerate or not de.single_critical:
                continue
            assert alpha(pair, de) == pytest.approx(_bridge_alpha(pair, de), rel=1e-9)
            checked += 1
            if checked == 10:
                break
        assert checked == 10

    def test_explicit_zero_coefficients(self, regular_pair):
        """Zero entries do not change the ensemble or its α"""
        padded = DegreePair.from_maps({2: 0.0, 3: 1.0}, {5: 0.0, 6: 1.0})
        assert alpha(padded, threshold(padded)) == pytest.approx(
            alpha(regular_pair, threshold(regular_pair))
        )


class TestGamma:
    def test_positive(self, regular_pair, final_pair):
        """γ is positive for single-critical ensembles"""
        for pair in (regular_pair, final_pair):
            assert gamma_const(pair, threshold(pair)) > 0.0

    def test_variance_limit_bridge(self, regular_pair):
        """(1 − ελ'(y)ρ'(x̄))² V∞(ε) tends to γ as ε decreases to ε*"""
        de = threshold(regular_pair)
        target = gamma_const(regular_pair, de)
        # δ = 4^-k halves √δ, the expansion variable near the threshold
        values = [
            scaled_variance_limit(regular_pair, de.eps_star + 4.0**-k)
            for k in (5, 6, 7, 8)
        ]
        first = [2.0 * b - a for a, b in zip(values, values[1:])]
        second = [(4.0 * b - a) / 3.0 for a, b in zip(first, first[1:])]
        assert second[-1] == pytest.approx(target, rel=1e-3)


class TestBeta:
    def test_omega_scales_linearly(self, regular_pair):
        """β is proportional to Ω"""
        de = threshold(regular_pair)
        assert beta(regular_pair, de, omega=2.0) == pytest.approx(
            2.0 * beta(regular_pair, de)
        )

    def test_regular_positive(self, regular_pair):
        """The finite-size shift moves the threshold down for (3,6)"""
        assert beta(regular_pair, threshold(regular_pair)) > 0.0


class TestScalingParams:
    def test_provenance(self, regular_pair):
        """The parameter set carries the critical point it was computed at"""
        de = threshold(regular_pair)
        params = scaling_params(regular_pair, de)
        assert params.eps_star == de.eps_star
        assert params.y_star == de.critical.y_star
        assert params.nu_star == de.critical.nu_star
        assert params.omega == 1.0
        assert params.alpha > 0.0

    def test_degenerate_ensemble_rejected(self):
        """No interior critical point, no scaling parameters"""
        pair = DegreePair.from_maps({2: 1.0}, {3: 1.0})
        with pytest.raises(ScalingError):
            scaling_per_critical_point(pair, threshold(pair))

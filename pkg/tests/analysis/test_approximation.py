import numpy as np
import pytest

from analysis import catalog
from analysis.approximation import (
    ErasureApproximation,
    curve,
    q_function,
    total,
    waterfall,
)
from analysis.density_evolution import threshold
from analysis.scaling import scaling_params

N = 5000
EPSILON = 0.5
S_MIN = 6


class TestQFunction:
    def test_known_values(self):
        """Q(0) = 1/2 and Q(1.96) ≈ 0.025"""
        assert float(q_function(0.0)) == pytest.approx(0.5)
        assert float(q_function(1.959963985)) == pytest.approx(0.025, rel=1e-6)

    def test_vectorised(self):
        values = q_function(np.array([-1.0, 0.0, 1.0]))
        assert values.shape == (3,)
        assert values[0] + values[2] == pytest.approx(1.0)


class TestWaterfall:
    def test_half_at_shifted_threshold(self, regular_pair):
        """The waterfall term is 1/2 at ε = ε* − βn^(−2/3)"""
        params = scaling_params(regular_pair, threshold(regular_pair))
        n = 1000
        eps = params.eps_star - params.beta * n ** (-2.0 / 3.0)
        assert waterfall(n, params, eps) == pytest.approx(0.5)
        assert waterfall(n, params, eps, "bit") == pytest.approx(0.5 * params.nu_star)


class TestErasureApproximation:
    """Waterfall plus floor"""

    def test_initial_pair_anchor(self):
        """P_B(5000, λ₀, ρ₀, 0.5) = 0.000552 within 10%"""
        approx = ErasureApproximation(N, catalog.optim_initial(), S_MIN)
        assert approx.probability(EPSILON) == pytest.approx(0.000552, rel=0.10)

    def test_intermediate_pair_anchor(self):
        """P_B(5000, λ₁, ρ₁, 0.5) = 0.0000997 within 10%"""
        approx = ErasureApproximation(N, catalog.optim_intermediate(), S_MIN)
        assert approx.probability(EPSILON) == pytest.approx(0.0000997, rel=0.10)

    def test_zero_channel(self, final_pair, coarse_settings):
        """Nothing is erased at ε = 0"""
        approx = ErasureApproximation(N, final_pair, S_MIN, coarse_settings)
        point = approx.point(0.0)
        assert point.pb_block == pytest.approx(0.0, abs=1e-12)
        assert point.floor_block == 0.0

    def test_components_add_up(self, final_pair, coarse_settings):
        """The total is the sum of waterfall and floor below 1"""
        point = total(N, final_pair, S_MIN, 0.45, coarse_settings)
        block = point.waterfall_block + point.floor_block
        assert point.pb_block == pytest.approx(block)
        assert point.pb_bit == pytest.approx(point.waterfall_bit + point.floor_bit)

    def test_floor_disabled_above_s_max(self, regular_pair, coarse_settings):
        """Without spectrum terms only the waterfall remains"""
        approx = ErasureApproximation(1000, regular_pair, 50, coarse_settings)
        assert approx.spectrum is None
        point = approx.point(0.4)
        assert point.floor_block == 0.0
        assert point.pb_block == pytest.approx(point.waterfall_block)

    def test_curve_increases(self, regular_pair, coarse_settings):
        """P_B grows with the channel erasure probability"""
        grid = np.linspace(0.3, 0.5, 11)
        points = curve(1000, regular_pair, 50, grid, coarse_settings)
        values = [p.pb_block for p in points]
        assert all(a <= b for a, b in zip(values, values[1:]))
        assert values[-1] > 0.99

    def test_clipped_to_one(self, final_pair, coarse_settings):
        """Far above threshold the probability is clipped at 1"""
        approx = ErasureApproximation(N, final_pair, 1, coarse_settings)
        assert approx.probability(0.9) == 1.0

    def test_epsilon_out_of_range(self, regular_pair, coarse_settings):
        approx = ErasureApproximation(1000, regular_pair, 50, coarse_settings)
        with pytest.raises(ValueError):
            approx.point(-0.1)

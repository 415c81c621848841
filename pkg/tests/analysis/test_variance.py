import numpy as np
import pytest

from analysis.density_evolution import threshold
from analysis.variance import (
    variance_breakdown,
    variance_finite,
    variance_limit,
)
from shared.config import Settings


def _is_unimodal(values, tol=1e-10):
    peak = int(np.argmax(values))
    rising = np.diff(values[: peak + 1])
    falling = np.diff(values[peak:])
    return bool(np.all(rising >= -tol) and np.all(falling <= tol))


class TestVarianceFinite:
    """Normalized message variance after ℓ rounds"""

    @pytest.mark.parametrize("ell", [0, 1, 2, 5, 20])
    def test_zero_at_channel_extremes(self, variance_pair, ell):
        """Nothing is random when ε is 0 or 1"""
        assert abs(variance_finite(variance_pair, 0.0, ell)) < 1e-12
        assert abs(variance_finite(variance_pair, 1.0, ell)) < 1e-12

    def test_channel_round(self, variance_pair):
        """ℓ = 0 counts channel erasures once per edge: ε(1 − ε)(1 + λ'(1))"""
        eps = 0.3
        lam_slope = float(variance_pair.lam.deriv(1.0))
        assert variance_finite(variance_pair, eps, 0) == pytest.approx(
            eps * (1.0 - eps) * (1.0 + lam_slope)
        )

    def test_breakdown_sums_terms(self, variance_pair):
        """value is the sum of the reported terms"""
        result = variance_breakdown(variance_pair, 0.6, 3)
        assert result.value == pytest.approx(sum(result.terms.values()))
        assert {"t1", "t2", "t3", "t4"} <= set(result.terms)
        assert not result.big_float

    def test_switch_follows_growth(self, regular_pair, variance_pair):
        """Doubles are left once (λ'(1)ρ'(1))^2ℓ cancels more than three digits"""
        assert not variance_breakdown(regular_pair, 0.5, 1).big_float
        assert variance_breakdown(regular_pair, 0.5, 2).big_float
        assert not variance_breakdown(variance_pair, 0.5, 3).big_float
        assert variance_breakdown(variance_pair, 0.5, 4).big_float

    def test_big_float_path_agrees(self, variance_pair):
        """mpmath and double evaluation agree where both are accurate"""
        exact = Settings(variance_float_digits=0)
        fast = variance_breakdown(variance_pair, 0.7, 2)
        slow = variance_breakdown(variance_pair, 0.7, 2, exact)
        assert not fast.big_float
        assert slow.big_float
        assert slow.value == pytest.approx(fast.value, rel=1e-9)

    def test_regular_ten_rounds_non_negative(self, regular_pair):
        """(3,6) at ε = 0.5 cancels twenty digits by ℓ = 10"""
        result = variance_breakdown(regular_pair, 0.5, 10)
        assert result.big_float
        assert result.value >= 0.0
        assert abs(variance_finite(regular_pair, 1.0, 10)) < 1e-12

    @pytest.mark.slow
    def test_figure_shape(self, variance_pair):
        """Unimodal in ε, higher peaks for more rounds, peak moving toward ε*"""
        eps_star = threshold(variance_pair).eps_star
        grid = np.linspace(0.0, 1.0, 101)
        peaks = []
        for ell in range(10):
            values = np.array([variance_finite(variance_pair, e, ell) for e in grid])
            assert np.all(values >= -1e-9)
            assert _is_unimodal(values)
            peaks.append((values.max(), grid[int(np.argmax(values))]))
        heights = [h for h, _ in peaks]
        assert all(a < b for a, b in zip(heights, heights[1:]))
        assert abs(peaks[-1][1] - eps_star) < abs(peaks[1][1] - eps_star)

    @pytest.mark.parametrize("ell", [40, pytest.param(60, marks=pytest.mark.slow)])
    @pytest.mark.parametrize("eps", [0.6, 0.95])
    def test_converges_to_limit(self, variance_pair, eps, ell):
        """Away from ε*, 40 and 60 rounds are within 1e-4 of the limit"""
        assert variance_finite(variance_pair, eps, ell) == pytest.approx(
            variance_limit(variance_pair, eps), abs=1e-4
        )

    @pytest.mark.slow
    def test_regular_converges_to_limit(self, regular_pair):
        """(3,6) at ε = 0.5 after 40 rounds"""
        assert variance_finite(regular_pair, 0.5, 40) == pytest.approx(
            variance_limit(regular_pair, 0.5), abs=1e-4
        )

    def test_ell_out_of_range(self, variance_pair):
        with pytest.raises(ValueError):
            variance_finite(variance_pair, 0.5, -1)
        with pytest.raises(ValueError):
            variance_finite(variance_pair, 0.5, 101)


class TestVarianceLimit:
    def test_zero_below_threshold(self, variance_pair):
        """Below ε* every message is eventually known"""
        assert variance_limit(variance_pair, 0.8) == 0.0

    def test_zero_just_below_threshold(self, variance_pair):
        """No summary given: the threshold is computed, not left to root finding"""
        eps_star = threshold(variance_pair).eps_star
        assert variance_limit(variance_pair, eps_star - 1e-3) == 0.0

    def test_zero_below_threshold_with_summary(self, variance_pair):
        de = threshold(variance_pair)
        assert variance_limit(variance_pair, de.eps_star, de=de) == 0.0

    def test_positive_above_threshold(self, variance_pair):
        assert variance_limit(variance_pair, 0.95) > 0.0

    def test_diverges_at_threshold(self, variance_pair):
        """The limit grows without bound as ε decreases to ε*"""
        de = threshold(variance_pair)
        near = variance_limit(variance_pair, de.eps_star + 1e-4, de=de)
        far = variance_limit(variance_pair, de.eps_star + 1e-2, de=de)
        assert near > 5.0 * far

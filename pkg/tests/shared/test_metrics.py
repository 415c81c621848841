import pytest

from shared.metrics import FailureTally, wilson_interval


class TestWilsonInterval:
    def test_contains_estimate(self):
        ci = wilson_interval(30, 100)
        assert ci.low < 0.3 < ci.high
        assert ci.level == 0.95

    def test_known_value(self):
        """10 of 100 at 95%: [0.0552, 0.1744]"""
        ci = wilson_interval(10, 100)
        assert ci.low == pytest.approx(0.0552, abs=1e-4)
        assert ci.high == pytest.approx(0.1744, abs=1e-4)

    def test_zero_successes(self):
        """No failures still gives a non-trivial upper bound"""
        ci = wilson_interval(0, 50)
        assert ci.low == 0.0
        assert 0.0 < ci.high < 0.1

    def test_wider_at_higher_confidence(self):
        narrow = wilson_interval(20, 200, 0.9)
        wide = wilson_interval(20, 200, 0.99)
        assert wide.low < narrow.low and wide.high > narrow.high

    def test_no_trials(self):
        with pytest.raises(ValueError):
            wilson_interval(0, 0)


class TestFailureTally:
    """Accumulation of decoding outcomes"""

    def test_counts(self):
        tally = FailureTally(n=10).extend([0, 3, 0, 1, 3])
        assert tally.trials == 5
        assert tally.block_failures == 3
        assert tally.residual_bits == 7
        assert tally.histogram == {3: 2, 1: 1}

    def test_merge_is_order_independent(self):
        a = FailureTally(n=10, split_size=2).extend([0, 1, 5])
        b = FailureTally(n=10, split_size=2).extend([4, 0])
        left = FailureTally(n=10, split_size=2).merge(a).merge(b)
        right = FailureTally(n=10, split_size=2).merge(b).merge(a)
        assert left.histogram == right.histogram
        assert (left.trials, left.residual_bits) == (right.trials, right.residual_bits)

    def test_merge_rejects_other_experiment(self):
        with pytest.raises(ValueError):
            FailureTally(n=10).merge(FailureTally(n=20))

    def test_split_counts(self):
        """Failures below the split size are floor failures"""
        tally = FailureTally(n=100, split_size=4).extend([1, 3, 4, 9, 0])
        assert tally.split_counts() == (2, 2)

    def test_split_disabled(self):
        assert FailureTally(n=10).extend([2]).split_counts() == (None, None)

    def test_rates(self):
        rates = FailureTally(n=4).extend([0, 2, 0, 0]).rates()
        assert rates["p_block"] == 0.25
        assert rates["p_bit"] == 2 / 16
        assert rates["p_block_ci"].contains(0.25)

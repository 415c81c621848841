import numpy as np
import pytest

from models.simulation import TrialOutcome
from simulation.graph import sample_graph
from simulation.peeling import erased_messages, peel_decode, residual_mask


def _maximal_stopping_set(graph, mask):
    """Drop erased variables seen by a check with one erased edge, until none are."""
    remaining = np.array(mask, dtype=bool)
    while True:
        per_check = np.bincount(
            graph.edge_check, weights=remaining[graph.edge_var], minlength=graph.m
        )
        solved = np.zeros(graph.n, dtype=bool)
        for v, c in zip(graph.edge_var, graph.edge_check):
            if remaining[v] and per_check[c] == 1:
                solved[v] = True
        if not solved.any():
            return remaining
        remaining &= ~solved


def _random_order_peel(graph, mask, rng):
    """Peel one variable at a time, choosing the degree-one check at random."""
    remaining = np.array(mask, dtype=bool)
    while True:
        per_check = np.bincount(
            graph.edge_check, weights=remaining[graph.edge_var], minlength=graph.m
        )
        ready = [c for c in range(graph.m) if per_check[c] == 1]
        if not ready:
            return remaining
        c = ready[rng.integers(len(ready))]
        (v,) = [v for v in graph.variables_of(c) if remaining[v]]
        remaining[v] = False


class TestPeelDecode:
    """Peeling decoder"""

    def test_matches_stopping_set_oracle(self, regular_pair, final_pair):
        """The residual is the maximal stopping set on 1000 small instances"""
        rng = np.random.default_rng(0)
        for t in range(1000):
            pair = regular_pair if t % 2 else final_pair
            n = int(rng.integers(6, 21))
            graph = sample_graph(n, pair, seed=t)
            mask = rng.random(n) < rng.uniform(0.2, 0.9)
            expected = _maximal_stopping_set(graph, mask)
            assert np.array_equal(residual_mask(graph, mask), expected)
            outcome = peel_decode(graph, mask)
            assert outcome.residual_erasures == int(expected.sum())
            assert outcome.success == (not expected.any())

    def test_order_independent(self, regular_pair):
        """Any peeling order stops at the same set"""
        rng = np.random.default_rng(1)
        for t in range(100):
            graph = sample_graph(40, regular_pair, seed=100 + t)
            mask = rng.random(40) < 0.45
            expected = residual_mask(graph, mask)
            assert np.array_equal(_random_order_peel(graph, mask, rng), expected)

    def test_nothing_erased(self, small_graph):
        outcome = peel_decode(small_graph, np.zeros(small_graph.n, dtype=bool))
        assert outcome.success
        assert outcome.erased_initial == 0
        assert outcome.residual_erasures == 0

    def test_everything_erased(self, small_graph):
        """With every bit erased no check can resolve anything"""
        outcome = peel_decode(small_graph, np.ones(small_graph.n, dtype=bool))
        assert not outcome.success
        assert outcome.residual_erasures == small_graph.n

    def test_trajectory(self, regular_pair):
        """The trajectory starts at the channel erasures and drops by one per step"""
        graph = sample_graph(200, regular_pair, seed=3)
        mask = np.random.default_rng(3).random(200) < 0.3
        outcome = peel_decode(graph, mask, capture_trajectory=True)
        residuals = [r for r, _ in outcome.trajectory]
        assert residuals[0] == outcome.erased_initial
        assert residuals[-1] == outcome.residual_erasures
        assert all(a - b == 1 for a, b in zip(residuals, residuals[1:]))
        assert all(r1 >= 0 for _, r1 in outcome.trajectory)

    def test_trajectory_off_by_default(self, small_graph):
        outcome = peel_decode(small_graph, np.zeros(small_graph.n, dtype=bool))
        assert outcome.trajectory is None

    def test_mask_length_checked(self, small_graph):
        with pytest.raises(ValueError):
            peel_decode(small_graph, np.zeros(small_graph.n + 1, dtype=bool))

    def test_outcome_consistency(self):
        """success is exactly an empty residual"""
        with pytest.raises(ValueError):
            TrialOutcome(erased_initial=3, residual_erasures=1, success=True)
        with pytest.raises(ValueError):
            TrialOutcome(erased_initial=1, residual_erasures=2, success=False)


class TestErasedMessages:
    """Erased variable-to-check messages after ℓ rounds"""

    def test_round_zero_counts_channel_edges(self, small_graph):
        mask = np.zeros(small_graph.n, dtype=bool)
        mask[[0, 3]] = True
        expected = int(small_graph.var_degrees[[0, 3]].sum())
        assert erased_messages(small_graph, mask, 0) == expected

    def test_nothing_erased(self, small_graph):
        mask = np.zeros(small_graph.n, dtype=bool)
        assert erased_messages(small_graph, mask, 5) == 0

    def test_everything_erased(self, small_graph):
        mask = np.ones(small_graph.n, dtype=bool)
        assert erased_messages(small_graph, mask, 3) == small_graph.edges

    def test_non_increasing(self, regular_pair):
        """More rounds never erase more messages"""
        graph = sample_graph(500, regular_pair, seed=9)
        mask = np.random.default_rng(9).random(500) < 0.4
        counts = [erased_messages(graph, mask, ell) for ell in range(8)]
        assert all(a >= b for a, b in zip(counts, counts[1:]))

    def test_negative_rounds(self, small_graph):
        with pytest.raises(ValueError):
            erased_messages(small_graph, np.zeros(small_graph.n, dtype=bool), -1)

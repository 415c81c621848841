"""Error-rate statistics for Monte Carlo decoding experiments."""

from typing import Any, Dict, Iterable, Optional, Tuple

from scipy.stats import binomtest

from models.simulation import ConfidenceInterval


def wilson_interval(
    successes: int, trials: int, confidence: float = 0.95
) -> ConfidenceInterval:
    """
    Wilson score interval for a binomial proportion.

    Args:
        successes: Number of counted events (e.g. block failures)
        trials: Number of independent trials
        confidence: Two-sided confidence level

    Returns:
        ConfidenceInterval with bounds clipped to [0, 1]
    """
    if trials < 1:
        raise ValueError("at least one trial is required")
    ci = binomtest(k=int(successes), n=int(trials)).proportion_ci(
        confidence_level=confidence, method="wilson"
    )
    return ConfidenceInterval(
        low=max(0.0, float(ci.low)), high=min(1.0, float(ci.high)), level=confidence
    )


class FailureTally:
    """Associative accumulator of decoding outcomes.

    Tallies from different workers merge in any order to the same totals.
    """

    def __init__(self, n: int, split_size: Optional[int] = None):
        self.n = n
        self.split_size = split_size
        self.trials = 0
        self.block_failures = 0
        self.residual_bits = 0
        self.histogram: Dict[int, int] = {}

    def add(self, residual: int) -> None:
        self.trials += 1
        if residual > 0:
            self.block_failures += 1
            self.residual_bits += residual
            self.histogram[residual] = self.histogram.get(residual, 0) + 1

    def extend(self, residuals: Iterable[int]) -> "FailureTally":
        for residual in residuals:
            self.add(residual)
        return self

    def merge(self, other: "FailureTally") -> "FailureTally":
        if (other.n, other.split_size) != (self.n, self.split_size):
            raise ValueError("cannot merge tallies of different experiments")
        self.trials += other.trials
        self.block_failures += other.block_failures
        self.residual_bits += other.residual_bits
        for size, count in other.histogram.items():
            self.histogram[size] = self.histogram.get(size, 0) + count
        return self

    def split_counts(self) -> Tuple[Optional[int], Optional[int]]:
        """(floor failures below the split size, waterfall failures at or above it)."""
        if self.split_size is None:
            return None, None
        floor = sum(c for s, c in self.histogram.items() if s < self.split_size)
        return floor, self.block_failures - floor

    def rates(self, confidence: float = 0.95) -> Dict[str, Any]:
        """
        Block and bit erasure rates with Wilson intervals.

        The bit interval treats every bit of every trial as a Bernoulli draw;
        bits within a block are correlated, so it is narrower than the truth.
        """
        bits = self.n * self.trials
        return {
            "p_block": self.block_failures / self.trials,
            "p_block_ci": wilson_interval(self.block_failures, self.trials, confidence),
            "p_bit": self.residual_bits / bits,
            "p_bit_ci": wilson_interval(self.residual_bits, bits, confidence),
        }

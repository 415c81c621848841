"""Configuration-model sampling of Tanner graphs from a degree-distribution pair."""

import logging
from functools import lru_cache
from typing import Dict, Sequence, Tuple

import numpy as np

from analysis.ensemble import design_rate, node_fractions
from models.ensemble import MAX_DEGREE, DegreePair, DegreePolynomial
from models.simulation import TannerGraph
from shared.errors import SimulationError

logger = logging.getLogger(__name__)

GRAPH_STREAM = 0
MIN_CHECK_DEGREE = 2


def apportion(total: int, fractions: Sequence[float]) -> np.ndarray:
    """Largest-remainder integer counts summing to ``total``; ties go to lower index."""
    raw = total * np.asarray(fractions, dtype=float)
    counts = np.floor(raw).astype(np.int64)
    short = total - int(counts.sum())
    if short > 0:
        remainders = np.where(raw > 0.0, raw - counts, -1.0)
        order = np.argsort(-remainders, kind="stable")
        counts[order[:short]] += 1
    return counts


def _balance_checks(
    check_counts: Dict[int, int], surplus: int, support: Sequence[int]
) -> Dict[int, int]:
    """Move single checks between adjacent degrees until the stub surplus is gone.

    ``surplus`` > 0 means the variable side has more stubs, so checks are
    promoted one degree at a time; < 0 demotes. Moves into degrees the
    distribution already uses are preferred, then the most populated source.
    """
    counts = dict(check_counts)
    step = 1 if surplus > 0 else -1
    for _ in range(abs(surplus)):
        candidates = [
            d
            for d, c in counts.items()
            if c > 0 and MIN_CHECK_DEGREE <= d + step <= MAX_DEGREE
        ]
        if not candidates:
            raise SimulationError(
                f"cannot balance stub counts: {abs(surplus)} "
                f"{'promotions' if step > 0 else 'demotions'} needed, none possible"
            )
        source = max(candidates, key=lambda d: (d + step in support, counts[d], -d))
        counts[source] -= 1
        counts[source + step] = counts.get(source + step, 0) + 1
    return {d: c for d, c in counts.items() if c > 0}


def _counts_by_degree(poly: DegreePolynomial, total: int) -> Dict[int, int]:
    fractions, _ = node_fractions(poly)
    counts = apportion(total, fractions)
    return {d: int(c) for d, c in enumerate(counts) if c > 0}


@lru_cache(maxsize=256)
def _degree_sequences(
    n: int, lam_coeffs: Tuple[float, ...], rho_coeffs: Tuple[float, ...]
) -> Tuple[np.ndarray, np.ndarray]:
    pair = DegreePair.unchecked(lam_coeffs, rho_coeffs)
    m = int(round(n * (1.0 - design_rate(pair))))
    if m < 1:
        raise SimulationError(f"n = {n} leaves no check nodes")
    var_counts = _counts_by_degree(pair.lam, n)
    check_counts = _counts_by_degree(pair.rho, m)
    surplus = sum(d * c for d, c in var_counts.items()) - sum(
        d * c for d, c in check_counts.items()
    )
    if surplus:
        logger.debug(f"balancing {surplus:+d} check stubs for n = {n}, m = {m}")
        check_counts = _balance_checks(
            check_counts, surplus, [d for d, _ in pair.rho.items()]
        )
    var_degrees = np.repeat(
        np.fromiter(var_counts.keys(), dtype=np.int64),
        np.fromiter(var_counts.values(), dtype=np.int64),
    )
    check_degrees = np.repeat(
        np.fromiter(sorted(check_counts), dtype=np.int64),
        np.asarray([check_counts[d] for d in sorted(check_counts)], dtype=np.int64),
    )
    var_degrees.flags.writeable = False
    check_degrees.flags.writeable = False
    return var_degrees, check_degrees


def degree_sequences(n: int, pair: DegreePair) -> Tuple[np.ndarray, np.ndarray]:
    """Integer variable and check degree sequences realizing ``pair`` at length n."""
    return _degree_sequences(n, pair.lam.coeffs, pair.rho.coeffs)


def graph_rng(seed: int, key: Sequence[int] = ()) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, GRAPH_STREAM, *key]))


def sample_graph(
    n: int, pair: DegreePair, seed: int, key: Sequence[int] = ()
) -> TannerGraph:
    """
    Draw a code uniformly from the configuration model.

    Args:
        n: Number of variable nodes
        pair: Edge-perspective degree distributions
        seed: Run seed
        key: Extra entropy (graph index, resample attempt) so that every
            graph of a run has its own deterministic stream

    Returns:
        TannerGraph with a uniformly random matching of edge stubs
    """
    var_degrees, check_degrees = degree_sequences(n, pair)
    rng = graph_rng(seed, key)
    var_stubs = np.repeat(np.arange(n, dtype=np.int64), var_degrees)
    checks = np.arange(check_degrees.size, dtype=np.int64)
    check_stubs = np.repeat(checks, check_degrees)
    return TannerGraph(
        n=n,
        m=int(check_degrees.size),
        var_degrees=var_degrees,
        check_degrees=check_degrees,
        edge_var=var_stubs,
        edge_check=check_stubs[rng.permutation(check_stubs.size)],
    )

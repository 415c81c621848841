"""Monte Carlo decoding experiments over the ensemble.

Every trial derives its erasure pattern from (seed, trial index) and every
graph from (seed, graph index, attempt), so estimates do not depend on the
number of workers or the order in which batches finish.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import brentq, curve_fit

from analysis.approximation import q_function
from analysis.density_evolution import r1_curve, threshold
from analysis.ensemble import edge_to_node
from models.ensemble import DegreePair
from models.simulation import (
    MeanTrajectory,
    MessageVarianceEstimate,
    ScalingFit,
    SimEstimate,
)
from shared.config import Settings, get_settings
from shared.errors import LdpcError, SimulationError
from shared.metrics import FailureTally
from simulation.expurgation import DEFAULT_MAX_RESAMPLES, expurgated_graph
from simulation.graph import sample_graph
from simulation.peeling import erased_messages, peel_decode

logger = logging.getLogger(__name__)

TRIAL_STREAM = 1
VARIANCE_STREAM = 3
MIN_FIT_BLOCKLENGTHS = 2
MIN_FIT_EPSILONS = 5


def erasure_mask(n: int, epsilon: float, seed: int, trial: int) -> np.ndarray:
    """I.i.d. erasures at rate ε for trial ``trial`` of run ``seed``."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, TRIAL_STREAM, trial]))
    return rng.random(n) < epsilon


def split_size(
    n: int, pair: DegreePair, gamma: float, settings: Optional[Settings] = None
) -> Optional[int]:
    """⌈n·γ·ν*⌉, separating floor-sized from waterfall-sized failures."""
    try:
        summary = threshold(pair, settings=settings)
    except LdpcError as e:
        logger.info(f"no size split: threshold unavailable ({e})")
        return None
    if not summary.critical_points:
        logger.info("no size split: ensemble has no interior critical point")
        return None
    nu_star = max(p.nu_star for p in summary.critical_points)
    return max(1, math.ceil(n * gamma * nu_star))


class _TrialBatch(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    pair: DegreePair
    epsilon: float
    seed: int
    trials: int
    trials_per_graph: int
    first_graph: int
    last_graph: int
    expurgate_below: Optional[int]
    max_resamples: int
    split_size: Optional[int]


def _run_batch(batch: _TrialBatch) -> Tuple[FailureTally, int, int]:
    """Trials of graphs [first_graph, last_graph) as (tally, sampled, rejected)."""
    tally = FailureTally(batch.n, batch.split_size)
    sampled = rejected = 0
    for g in range(batch.first_graph, batch.last_graph):
        if batch.expurgate_below is not None:
            graph, attempts = expurgated_graph(
                batch.n,
                batch.pair,
                batch.expurgate_below,
                batch.seed,
                (g,),
                batch.max_resamples,
            )
            rejected += attempts
            sampled += attempts + 1
        else:
            graph = sample_graph(batch.n, batch.pair, batch.seed, (g, 0))
            sampled += 1
        first = g * batch.trials_per_graph
        for t in range(first, min(first + batch.trials_per_graph, batch.trials)):
            mask = erasure_mask(batch.n, batch.epsilon, batch.seed, t)
            tally.add(peel_decode(graph, mask).residual_erasures)
    return tally, sampled, rejected


def _batches(graphs: int, workers: int) -> List[Tuple[int, int]]:
    pieces = max(1, min(graphs, workers * 4))
    bounds = np.linspace(0, graphs, pieces + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def run_trials(
    n: int,
    pair: DegreePair,
    epsilon: float,
    trials: int,
    seed: int = 0,
    gamma_split: Optional[float] = None,
    expurgate_below: Optional[int] = None,
    trials_per_graph: int = 1,
    workers: int = 1,
    max_resamples: int = DEFAULT_MAX_RESAMPLES,
    settings: Optional[Settings] = None,
) -> SimEstimate:
    """
    Estimate block and bit erasure probabilities of peeling decoding.

    Args:
        n: Blocklength
        pair: Degree distributions
        epsilon: Channel erasure probability
        trials: Number of erasure patterns
        seed: Run seed
        gamma_split: Size-split factor γ (settings.gamma_split when None)
        expurgate_below: Resample codes with a stopping set smaller than this
        trials_per_graph: Erasure patterns decoded on each sampled code
        workers: Worker processes
        max_resamples: Rejected samples allowed per code when expurgating

    Returns:
        SimEstimate with Wilson 95% intervals
    """
    settings = settings or get_settings()
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if trials_per_graph < 1:
        raise ValueError("trials_per_graph must be >= 1")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    gamma = gamma_split if gamma_split is not None else settings.gamma_split
    split = split_size(n, pair, gamma, settings)

    graphs = math.ceil(trials / trials_per_graph)
    batches = [
        _TrialBatch(
            n=n,
            pair=pair,
            epsilon=epsilon,
            seed=seed,
            trials=trials,
            trials_per_graph=trials_per_graph,
            first_graph=first,
            last_graph=last,
            expurgate_below=expurgate_below,
            max_resamples=max_resamples,
            split_size=split,
        )
        for first, last in _batches(graphs, workers)
    ]
    logger.info(
        f"simulating n={n}, eps={epsilon}: {trials} trials on {graphs} codes, "
        f"{len(batches)} batches, {workers} workers"
    )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_batch, batches))
    else:
        results = [_run_batch(b) for b in batches]

    tally = FailureTally(n, split)
    sampled = rejected = 0
    for part, s, r in results:
        tally.merge(part)
        sampled += s
        rejected += r
    if rejected:
        logger.info(f"expurgation rejected {rejected} of {sampled} sampled codes")

    rates = tally.rates()
    floor, waterfall = tally.split_counts()
    return SimEstimate(
        n=n,
        epsilon=epsilon,
        trials=tally.trials,
        seed=seed,
        block_failures=tally.block_failures,
        residual_bits=tally.residual_bits,
        p_block=rates["p_block"],
        p_block_ci=rates["p_block_ci"],
        p_bit=rates["p_bit"],
        p_bit_ci=rates["p_bit_ci"],
        size_histogram=dict(sorted(tally.histogram.items())),
        split_size=split,
        floor_failures=floor,
        waterfall_failures=waterfall,
        expurgate_below=expurgate_below,
        graphs_sampled=sampled,
        graphs_rejected=rejected,
    )


def _waterfall_model(eps_star: float):
    def model(xdata: np.ndarray, alpha: float, beta: float) -> np.ndarray:
        n, eps = xdata
        shifted = eps_star - beta * n ** (-2.0 / 3.0)
        return q_function(np.sqrt(n) * (shifted - eps) / alpha)

    return model


def fit_scaling(
    estimates: Sequence[SimEstimate],
    eps_star: float,
    initial: Tuple[float, float] = (0.5, 0.5),
) -> ScalingFit:
    """
    Weighted least-squares fit of Q(√n(ε* − βn^(−2/3) − ε)/α) to block errors.

    Args:
        estimates: Block-error estimates over an ε grid for several blocklengths
        eps_star: Threshold of the ensemble
        initial: Starting (α, β)

    Returns:
        ScalingFit with standard errors from the fit covariance
    """
    by_n: Dict[int, Set[float]] = {}
    for e in estimates:
        by_n.setdefault(e.n, set()).add(e.epsilon)
    if len(by_n) < MIN_FIT_BLOCKLENGTHS:
        raise SimulationError(
            f"scaling fit needs >= {MIN_FIT_BLOCKLENGTHS} blocklengths, got {len(by_n)}"
        )
    thin = {n: len(eps) for n, eps in by_n.items() if len(eps) < MIN_FIT_EPSILONS}
    if thin:
        raise SimulationError(
            f"scaling fit needs >= {MIN_FIT_EPSILONS} epsilon points per blocklength; "
            f"got {thin}"
        )

    xdata = np.array([[e.n for e in estimates], [e.epsilon for e in estimates]], float)
    p = np.array([e.p_block for e in estimates])
    trials = np.array([e.trials for e in estimates], dtype=float)
    sigma = np.sqrt(np.maximum(p * (1.0 - p), 1.0 / trials) / trials)
    try:
        params, cov = curve_fit(
            _waterfall_model(eps_star),
            xdata,
            p,
            p0=initial,
            sigma=sigma,
            absolute_sigma=True,
            bounds=([1e-6, -np.inf], [np.inf, np.inf]),
        )
    except (RuntimeError, ValueError) as e:
        raise SimulationError(f"scaling fit did not converge: {e}") from e
    errors = np.sqrt(np.diag(cov))
    if not np.all(np.isfinite(errors)):
        raise SimulationError("scaling fit is underdetermined (singular covariance)")
    logger.info(
        f"fitted alpha={params[0]:.5f}±{errors[0]:.2g}, "
        f"beta={params[1]:.5f}±{errors[1]:.2g}"
    )
    return ScalingFit(
        alpha=float(params[0]),
        beta=float(params[1]),
        alpha_se=float(errors[0]),
        beta_se=float(errors[1]),
        eps_star=eps_star,
        points=len(estimates),
        blocklengths=tuple(sorted(by_n)),
    )


def _predicted_r1(pair: DegreePair, epsilon: float, residual: np.ndarray) -> np.ndarray:
    """L'(1)·r₁(y) at the y where εL(y) equals the residual fraction."""
    avg_var = edge_to_node(pair).avg_var_degree
    out = np.empty_like(residual)
    for i, v in enumerate(residual):
        if v <= 0.0:
            out[i] = 0.0
            continue
        y = brentq(lambda t: epsilon * pair.lam.node_generating(t) - v, 0.0, 1.0)
        out[i] = avg_var * r1_curve(pair, epsilon, y)
    return out


def mean_trajectory(
    n: int,
    pair: DegreePair,
    epsilon: float,
    samples: int,
    seed: int = 0,
    bins: int = 50,
) -> MeanTrajectory:
    """
    Average R₁/n of peeling trajectories binned by residual erasures/n.

    Each sample decodes one erasure pattern on its own code. The predicted
    curve places nεL(y) variables and n·L'(1)·r₁(y) degree-one checks at
    the point y of the density-evolution flow.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if epsilon <= 0.0:
        raise ValueError("trajectories need epsilon > 0")
    points: List[np.ndarray] = []
    for t in range(samples):
        graph = sample_graph(n, pair, seed, (t,))
        outcome = peel_decode(graph, erasure_mask(n, epsilon, seed, t), True)
        points.append(np.asarray(outcome.trajectory, dtype=float) / n)
    data = np.concatenate(points) if points else np.empty((0, 2))

    edges = np.linspace(0.0, epsilon, bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    which = np.clip(np.digitize(data[:, 0], edges) - 1, 0, bins - 1)
    means: List[Optional[float]] = []
    stds: List[Optional[float]] = []
    counts: List[int] = []
    for b in range(bins):
        values = data[which == b, 1]
        counts.append(int(values.size))
        means.append(float(values.mean()) if values.size else None)
        stds.append(float(values.std(ddof=1)) if values.size > 1 else None)
    return MeanTrajectory(
        n=n,
        epsilon=epsilon,
        samples=samples,
        residual=tuple(float(c) for c in centers),
        mean_r1=tuple(means),
        std_r1=tuple(stds),
        counts=tuple(counts),
        predicted_r1=tuple(float(v) for v in _predicted_r1(pair, epsilon, centers)),
    )


def estimate_message_variance(
    n: int,
    pair: DegreePair,
    epsilon: float,
    ell: int,
    samples: int,
    seed: int = 0,
) -> MessageVarianceEstimate:
    """Sample Var(erased variable-to-check messages after ℓ rounds) / edges.

    Code and erasure pattern are both redrawn for every sample, so the
    estimate is over the ensemble.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    counts = np.empty(samples)
    edges = 0
    for s in range(samples):
        graph = sample_graph(n, pair, seed, (VARIANCE_STREAM, s))
        rng = np.random.default_rng(np.random.SeedSequence([seed, VARIANCE_STREAM, s]))
        counts[s] = erased_messages(graph, rng.random(n) < epsilon, ell)
        edges = graph.edges
    variance = float(np.var(counts, ddof=1)) / edges
    return MessageVarianceEstimate(
        n=n,
        epsilon=epsilon,
        ell=ell,
        samples=samples,
        mean=float(counts.mean()) / edges,
        variance=variance,
        std_error=variance * math.sqrt(2.0 / (samples - 1)),
    )

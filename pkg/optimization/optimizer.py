"""Local optimization of degree distributions against the finite-length approximation.

Phase 1 runs LP 2 (decrease P) until P ≤ P_target; phase 2 runs LP 1 (increase
the rate subject to the linearized P ≤ P_target). Every LP step is re-evaluated
with the full approximation and rejected steps halve δ.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple

import numpy as np

from analysis.approximation import ErasureApproximation
from analysis.ensemble import design_rate, perturb, random_pair
from models.ensemble import DegreePair, DegreePolynomial
from models.optimization import (
    Gradients,
    LPKind,
    LPSolution,
    MultiStartResult,
    OptimizationStep,
    OptimizationTrace,
    OptimizerConfig,
    Side,
    TraceStatus,
)
from optimization.lp import build_problem, lp_variables, solve_lp
from shared.config import Settings, get_settings
from shared.errors import LdpcError, LPInfeasibleError, OptimizationError

logger = logging.getLogger(__name__)

RATE_GAIN_TOL = 1e-12


def evaluate(
    pair: DegreePair, config: OptimizerConfig, settings: Optional[Settings] = None
) -> float:
    """P(n, λ, ρ, ε) of the requested kind at the configured operating point."""
    approx = ErasureApproximation(
        config.n, pair, config.s_min, settings, s_max=config.spectrum_size
    )
    return approx.probability(config.epsilon, config.kind)


def _mixture(p: DegreePolynomial, degree: int, h: float) -> DegreePolynomial:
    """(p + h·e_degree) / (1 + h); stays a distribution while p_degree ≥ −h."""
    top = max(p.max_degree, degree)
    coeffs = [p.coefficient(d) for d in range(top + 1)]
    coeffs[degree] += h
    return DegreePolynomial(coeffs=tuple(c / (1.0 + h) for c in coeffs))


def _shifted(pair: DegreePair, side: Side, degree: int, h: float) -> DegreePair:
    if side == "lambda":
        return DegreePair(lam=_mixture(pair.lam, degree, h), rho=pair.rho)
    return DegreePair(lam=pair.lam, rho=_mixture(pair.rho, degree, h))


def _partial(
    pair: DegreePair,
    side: Side,
    degree: int,
    step: float,
    base: float,
    config: OptimizerConfig,
    settings: Settings,
) -> float:
    coefficient = (pair.lam if side == "lambda" else pair.rho).coefficient(degree)
    if coefficient >= step:
        up = evaluate(_shifted(pair, side, degree, step), config, settings)
        down = evaluate(_shifted(pair, side, degree, -step), config, settings)
        value = (up - down) / (2.0 * step)
    else:
        # second-order one-sided difference keeps zero coefficients non-negative
        one = evaluate(_shifted(pair, side, degree, step), config, settings)
        two = evaluate(_shifted(pair, side, degree, 2.0 * step), config, settings)
        value = (-3.0 * base + 4.0 * one - two) / (2.0 * step)
    if not math.isfinite(value):
        raise OptimizationError(
            f"non-finite derivative for {side}_{degree}; "
            f"fd_step {step} may be too small"
        )
    return value


def gradients(
    pair: DegreePair,
    config: OptimizerConfig,
    fd_step: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> Gradients:
    """Finite-difference ∂P/∂λ_i, ∂P/∂ρ_i along mixture directions (p + h e_i)/(1 + h).

    Each direction differs from the raw coordinate partial by the same constant
    on its side, which the LP's zero-sum constraint cancels.
    """
    settings = settings or get_settings()
    step = fd_step if fd_step is not None else config.fd_step
    base = evaluate(pair, config, settings)
    lam: List[Tuple[int, float]] = []
    rho: List[Tuple[int, float]] = []
    for side, degree in lp_variables(pair, config.dl_max, config.dr_max):
        value = _partial(pair, side, degree, step, base, config, settings)
        (lam if side == "lambda" else rho).append((degree, value))
    return Gradients(value=base, lam=tuple(lam), rho=tuple(rho))


def richardson_gap(
    pair: DegreePair, config: OptimizerConfig, settings: Optional[Settings] = None
) -> float:
    """Largest relative change of any gradient entry when fd_step is halved."""
    full = gradients(pair, config, config.fd_step, settings)
    half = gradients(pair, config, config.fd_step / 2.0, settings)
    entries = [*zip(full.lam, half.lam), *zip(full.rho, half.rho)]
    scale = max((abs(a[1]) for a, _ in entries), default=0.0)
    if scale == 0.0:
        return 0.0
    return max(abs(a[1] - b[1]) for a, b in entries) / scale


def _gradient_map(grads: Gradients) -> Dict[Tuple[Side, int], float]:
    out: Dict[Tuple[Side, int], float] = {("lambda", d): g for d, g in grads.lam}
    out.update({("rho", d): g for d, g in grads.rho})
    return out


def lp_increase_rate(
    pair: DegreePair,
    grads: Gradients,
    p_now: float,
    config: OptimizerConfig,
    delta: float,
) -> LPSolution:
    """LP 1: maximize the rate differential subject to P + g·Δ ≤ P_target."""
    rate = design_rate(pair)
    lam_integral = pair.lam.inverse_degree_sum()
    gain: Dict[Tuple[Side, int], float] = {}
    for side, degree in lp_variables(pair, config.dl_max, config.dr_max):
        weight = (1.0 - rate) / degree if side == "lambda" else -1.0 / degree
        gain[(side, degree)] = -weight / lam_integral
    problem = build_problem(
        pair,
        gain,
        delta,
        config.dl_max,
        config.dr_max,
        constraint=(_gradient_map(grads), config.p_target - p_now),
    )
    solution = solve_lp(problem)
    return solution.model_copy(update={"objective": -solution.objective})


def lp_decrease_p(
    pair: DegreePair, grads: Gradients, config: OptimizerConfig, delta: float
) -> LPSolution:
    """LP 2: minimize g·Δ."""
    problem = build_problem(
        pair, _gradient_map(grads), delta, config.dl_max, config.dr_max
    )
    return solve_lp(problem)


class _Run:
    """Mutable state of one optimization run."""

    def __init__(self, config: OptimizerConfig, pair: DegreePair, settings: Settings):
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self.config = config
        self.settings = settings
        self.pair = pair
        self.p = evaluate(pair, config, settings)
        self.rate = design_rate(pair)
        self.delta = config.delta_init
        self.steps: List[OptimizationStep] = [
            OptimizationStep(
                round=0, pair=pair, rate=self.rate, p=self.p, delta=self.delta
            )
        ]

    @property
    def feasible(self) -> bool:
        return self.p <= self.config.p_target

    def _record(
        self,
        round_no: int,
        pair: DegreePair,
        rate: float,
        p: float,
        kind: LPKind,
        ok: bool,
    ) -> None:
        self.steps.append(
            OptimizationStep(
                round=round_no,
                pair=pair,
                rate=rate,
                p=p,
                delta=self.delta,
                lp_kind=kind,
                accepted=ok,
            )
        )

    def _reject(self, round_no: int, kind: LPKind, reason: str) -> None:
        self.logger.debug(
            f"[_Run] round {round_no} ({kind}) rejected: {reason}; "
            f"delta {self.delta:.3g} -> {self.delta / 2:.3g}"
        )
        self.delta /= 2.0

    def round(self, round_no: int) -> None:
        kind: LPKind = "lp1" if self.feasible else "lp2"
        grads = gradients(self.pair, self.config, settings=self.settings)
        try:
            if kind == "lp1":
                solution = lp_increase_rate(
                    self.pair, grads, self.p, self.config, self.delta
                )
            else:
                solution = lp_decrease_p(self.pair, grads, self.config, self.delta)
        except LPInfeasibleError as e:
            self._reject(round_no, kind, str(e))
            return
        if not any(solution.delta):
            self._record(round_no, self.pair, self.rate, self.p, kind, False)
            self._reject(round_no, kind, "null step")
            return

        dlambda, drho = solution.split(
            lp_variables(self.pair, self.config.dl_max, self.config.dr_max)
        )
        try:
            candidate = perturb(self.pair, dlambda, drho)
            p_new = evaluate(candidate, self.config, self.settings)
        except LdpcError as e:
            self._reject(round_no, kind, f"candidate not evaluable ({e})")
            return
        rate_new = design_rate(candidate)

        if kind == "lp2":
            accepted = p_new < self.p
        else:
            accepted = (
                rate_new > self.rate + RATE_GAIN_TOL and p_new <= self.config.p_target
            )
        self._record(round_no, candidate, rate_new, p_new, kind, accepted)
        if not accepted:
            self._reject(round_no, kind, f"P {self.p:.4g} -> {p_new:.4g}")
            return
        self.logger.info(
            f"[_Run] round {round_no} ({kind}): rate {rate_new:.6f}, P {p_new:.4g}, "
            f"delta {self.delta:.3g}"
        )
        self.pair, self.p, self.rate = candidate, p_new, rate_new


def _start_seeds(seed: int, count: int) -> List[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


def _initial_pair(config: OptimizerConfig, start_seed: int) -> DegreePair:
    return random_pair(config.dl_max, config.dr_max, np.random.default_rng(start_seed))


def _unevaluable_trace(config: OptimizerConfig, pair: DegreePair) -> OptimizationTrace:
    start = OptimizationStep(
        round=0, pair=pair, rate=design_rate(pair), p=math.inf, delta=config.delta_init
    )
    return OptimizationTrace(
        config=config, steps=(start,), status="start_not_evaluable"
    )


def optimize(
    config: OptimizerConfig,
    initial: Optional[DegreePair] = None,
    settings: Optional[Settings] = None,
    check_gradients: bool = True,
) -> OptimizationTrace:
    """Run phase 1 then phase 2 from ``initial`` or a pair drawn from config.seed."""
    settings = settings or get_settings()
    pair = initial or _initial_pair(config, _start_seeds(config.seed, 1)[0])
    try:
        run = _Run(config, pair, settings)
    except LdpcError as e:
        logger.warning(f"start pair not evaluable, run skipped: {e}")
        return _unevaluable_trace(config, pair)

    gap = None
    if check_gradients:
        gap = richardson_gap(pair, config, settings)
        if gap > 1e-2:
            logger.warning(
                f"gradients move by {gap:.3g} (relative) when fd_step is halved"
            )

    status: TraceStatus = "max_rounds"
    for round_no in range(1, config.max_rounds + 1):
        if run.delta < config.delta_min:
            status = "converged" if run.feasible else "target_unreachable"
            break
        run.round(round_no)
    else:
        if not run.feasible:
            status = "target_unreachable"

    if status == "target_unreachable":
        logger.error(
            f"P stayed at {run.p:.4g} > target {config.p_target:.4g} after phase 1"
        )
    logger.info(f"optimization {status}: rate {run.rate:.6f}, P {run.p:.4g}")
    return OptimizationTrace(
        config=config, steps=tuple(run.steps), status=status, richardson_gap=gap
    )


def _optimize_from_seed(
    config: OptimizerConfig, start_seed: int, settings: Settings
) -> OptimizationTrace:
    return optimize(config, _initial_pair(config, start_seed), settings)


def multi_start(
    config: OptimizerConfig,
    n_starts: int,
    seed: Optional[int] = None,
    workers: int = 1,
    settings: Optional[Settings] = None,
) -> MultiStartResult:
    """Optimize from ``n_starts`` random pairs and keep the best feasible result.

    Starts whose approximation cannot be evaluated are skipped and left out of
    ``final_rates``.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    settings = settings or get_settings()
    seeds = _start_seeds(config.seed if seed is None else seed, n_starts)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(
                pool.map(
                    _optimize_from_seed,
                    [config] * n_starts,
                    seeds,
                    [settings] * n_starts,
                )
            )
    else:
        traces = [_optimize_from_seed(config, s, settings) for s in seeds]

    evaluated = [t for t in traces if t.status != "start_not_evaluable"]
    if len(evaluated) < n_starts:
        logger.warning(
            f"{n_starts - len(evaluated)} of {n_starts} starts were not evaluable"
        )
    rates = [t.final.rate for t in evaluated]
    feasible = [t for t in evaluated if t.feasible]
    if not feasible:
        raise OptimizationError(f"none of {n_starts} starts reached P <= target")
    best = max(feasible, key=lambda t: t.final.rate)
    logger.info(
        f"multi-start: best rate {best.final.rate:.6f}, "
        f"spread {max(rates) - min(rates):.3g} over {n_starts} starts"
    )
    return MultiStartResult(best=best, final_rates=rates, seeds=seeds)

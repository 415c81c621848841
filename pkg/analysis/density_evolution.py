"""Density evolution on the binary erasure channel.

f(y) = y - 1 + rho(1 - eps*lambda(y)) is positive on (0, 1] exactly when
density evolution drives the erasure fraction to zero. The threshold search
works with h(y) = f(y)/y, which extends continuously to y = 0 with
h(0) = f'(0) = 1 - eps*lambda'(0)*rho'(1), so the stability condition is part
of the same minimization.
"""

import logging
from typing import Annotated, List, Optional, Tuple

import numpy as np
from pydantic import Field, PositiveFloat, PositiveInt, validate_call
from scipy.optimize import brentq, minimize_scalar

from models.density import CriticalPoint, DensityEvolutionSummary, DETrajectory
from models.ensemble import DegreePair
from shared.config import Settings, get_settings
from shared.errors import EnsembleError, ThresholdError

logger = logging.getLogger(__name__)

Probability = Annotated[float, Field(ge=0.0, le=1.0)]


@validate_call
def de_trajectory(
    pair: DegreePair,
    epsilon: Probability,
    max_iter: PositiveInt = 1000,
    tol: PositiveFloat = 1e-12,
) -> DETrajectory:
    """Iterate x_i = eps*lambda(y_i), y_(i+1) = 1 - rho(1 - x_i) from y_0 = 1.

    Bad arguments fail pydantic validation; rounding that would make x_i grow
    is clamped, so the sequence is non-increasing.
    """
    ys = [1.0]
    xs = [float(epsilon * pair.lam.eval(1.0))]
    for _ in range(max_iter):
        y = float(1.0 - pair.rho.eval(1.0 - xs[-1]))
        x = float(epsilon * pair.lam.eval(y))
        if x > xs[-1]:
            x = xs[-1]
        ys.append(min(max(y, 0.0), 1.0))
        xs.append(min(max(x, 0.0), 1.0))
        if abs(xs[-1] - xs[-2]) < tol:
            break
    return DETrajectory(
        epsilon=epsilon, xs=tuple(xs), ys=tuple(ys), iterations=len(xs) - 1
    )


def r1_curve(pair: DegreePair, epsilon: float, y):
    """r1(y) = eps*lambda(y) * [y - 1 + rho(1 - eps*lambda(y))]; vectorised in y."""
    x = epsilon * pair.lam.eval(y)
    return x * (y - 1.0 + pair.rho.eval(1.0 - x))


def f_value(pair: DegreePair, epsilon: float, y):
    return y - 1.0 + pair.rho.eval(1.0 - epsilon * pair.lam.eval(y))


def f_slope(pair: DegreePair, epsilon: float, y):
    z = 1.0 - epsilon * pair.lam.eval(y)
    return 1.0 - epsilon * pair.rho.deriv(z) * pair.lam.deriv(y)


def f_curvature(pair: DegreePair, epsilon: float, y):
    z = 1.0 - epsilon * pair.lam.eval(y)
    lam_slope = pair.lam.deriv(y)
    return (
        epsilon**2 * pair.rho.deriv2(z) * lam_slope**2
        - epsilon * pair.rho.deriv(z) * pair.lam.deriv2(y)
    )


def _h_grid(pair: DegreePair, epsilon: float, grid: np.ndarray) -> np.ndarray:
    values = np.empty_like(grid)
    values[0] = f_slope(pair, epsilon, 0.0)
    values[1:] = f_value(pair, epsilon, grid[1:]) / grid[1:]
    return values


def _h_minima(
    pair: DegreePair, epsilon: float, settings: Settings
) -> List[Tuple[float, float]]:
    """Local minima (y, h(y)) of h over [0, 1], interior ones refined."""
    grid = np.linspace(0.0, 1.0, settings.grid_points + 1)
    values = _h_grid(pair, epsilon, grid)
    last = len(grid) - 1
    minima: List[Tuple[float, float]] = []
    if values[0] <= values[1]:
        minima.append((0.0, float(values[0])))
    for k in range(1, last):
        if values[k] <= values[k - 1] and values[k] <= values[k + 1]:
            result = minimize_scalar(
                lambda y: f_value(pair, epsilon, y) / y,
                bounds=(grid[k - 1], grid[k + 1]),
                method="bounded",
                options={"xatol": 1e-13},
            )
            if result.fun <= values[k]:
                minima.append((float(result.x), float(result.fun)))
            else:
                minima.append((float(grid[k]), float(values[k])))
    if values[last] <= values[last - 1]:
        minima.append((1.0, float(values[last])))
    return minima


def _min_h(pair: DegreePair, epsilon: float, settings: Settings) -> float:
    return min(value for _, value in _h_minima(pair, epsilon, settings))


def _refine_critical(pair: DegreePair, eps_star: float, y0: float) -> float:
    """Newton on f'(y) = 0 with the analytic second derivative."""
    y = y0
    for _ in range(50):
        curvature = float(f_curvature(pair, eps_star, y))
        if curvature <= 0.0:
            break
        step = float(f_slope(pair, eps_star, y)) / curvature
        candidate = y - step
        if not 0.0 < candidate <= 1.0 or abs(step) > 1e-2:
            break
        y = candidate
        if abs(step) < 1e-15:
            break
    return y


def _merge(
    points: List[Tuple[float, float]], radius: float
) -> List[Tuple[float, float]]:
    merged: List[Tuple[float, float]] = []
    for y, value in sorted(points):
        if merged and y - merged[-1][0] <= radius:
            if value < merged[-1][1]:
                merged[-1] = (y, value)
            continue
        merged.append((y, value))
    return merged


def stability_epsilon(pair: DegreePair) -> Optional[float]:
    """1 / (lambda'(0) rho'(1)); None when there are no degree-2 variable nodes."""
    slope = float(pair.lam.deriv(0.0) * pair.rho.deriv(1.0))
    return 1.0 / slope if slope > 0.0 else None


def threshold(
    pair: DegreePair,
    tol: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> DensityEvolutionSummary:
    """Threshold eps* and the critical points of ``pair``."""
    settings = settings or get_settings()
    tol = tol if tol is not None else settings.threshold_tol
    if pair.lam.coefficient(1) > 0.0:
        raise EnsembleError("degree-1 variable nodes are not supported by threshold")
    stability = stability_epsilon(pair)

    if _min_h(pair, 1.0, settings) > -settings.critical_value_tol:
        logger.info("f stays non-negative at eps = 1; reporting degenerate eps* = 1")
        return DensityEvolutionSummary(
            eps_star=1.0, degenerate=True, stability_eps=stability
        )

    eps_star = float(
        brentq(lambda e: _min_h(pair, e, settings), 0.0, 1.0, xtol=tol)
    )
    minima = _h_minima(pair, eps_star, settings)
    floor = min(value for _, value in minima)
    ties = [
        (y, value)
        for y, value in minima
        if value <= floor + settings.critical_value_tol and 0.0 < y < 1.0
    ]
    if not ties:
        logger.info(
            f"threshold {eps_star:.10f} is set by the stability condition; "
            "no interior critical point"
        )
        return DensityEvolutionSummary(
            eps_star=eps_star, degenerate=True, stability_eps=stability
        )

    points = []
    for y_grid, _ in _merge(ties, settings.critical_merge_radius):
        y_star = _refine_critical(pair, eps_star, y_grid)
        x_star = float(eps_star * pair.lam.eval(y_star))
        points.append(
            CriticalPoint(
                y_star=y_star,
                x_star=x_star,
                x_bar_star=1.0 - x_star,
                nu_star=float(eps_star * pair.lam.node_generating(y_star)),
                f_value=float(f_value(pair, eps_star, y_star)),
                f_slope=float(f_slope(pair, eps_star, y_star)),
            )
        )
    if len(points) > 1:
        logger.warning(
            f"{len(points)} critical points at eps* = {eps_star:.10f}: "
            f"{[round(p.y_star, 6) for p in points]}"
        )
    return DensityEvolutionSummary(
        eps_star=eps_star,
        critical_points=tuple(points),
        single_critical=len(points) == 1,
        stability_eps=stability,
    )


def fixed_point_above(
    pair: DegreePair,
    epsilon: float,
    tol: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> Tuple[float, float]:
    """Largest fixed point (x, y) of density evolution, iterating from x_0 = eps."""
    settings = settings or get_settings()
    tol = tol if tol is not None else settings.fixed_point_tol

    def update(x: float) -> float:
        return float(epsilon * pair.lam.eval(1.0 - pair.rho.eval(1.0 - x)))

    def residual(x: float) -> float:
        return x - update(x)

    x = float(epsilon)
    for _ in range(settings.fixed_point_max_iter):
        nxt = update(x)
        if nxt < 1e-12:
            raise ThresholdError(
                f"density evolution collapses to zero at eps = {epsilon} "
                "(at or below threshold)"
            )
        if abs(nxt - x) < 1e-9:
            x = nxt
            break
        x = nxt

    # Newton polish; iteration alone slows down near the threshold
    for _ in range(60):
        y = 1.0 - float(pair.rho.eval(1.0 - x))
        slope = 1.0 - epsilon * float(pair.lam.deriv(y) * pair.rho.deriv(1.0 - x))
        current = residual(x)
        if abs(current) < tol or slope <= 0.0:
            break
        candidate = x - current / slope
        if not 0.0 < candidate <= 1.0 or abs(residual(candidate)) >= abs(current):
            break
        x = candidate

    y = 1.0 - float(pair.rho.eval(1.0 - x))
    return x, y

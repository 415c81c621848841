"""Closed-form scaling parameters alpha, beta and the variance constant gamma."""

import logging
import math
from typing import List, Optional

from models.density import CriticalPoint, DensityEvolutionSummary
from models.ensemble import DegreePair
from models.scaling import ScalingParams
from shared.config import Settings, get_settings
from shared.errors import ScalingError

logger = logging.getLogger(__name__)


def _point(
    de: DensityEvolutionSummary, point: Optional[CriticalPoint]
) -> CriticalPoint:
    chosen = point if point is not None else de.critical
    if chosen.y_star <= 0.0:
        raise ScalingError("critical point must satisfy y* > 0")
    return chosen


def _rho_bracket(pair: DegreePair, x: float) -> float:
    """ρ(x̄)² − ρ(x̄²) + ρ'(x̄)(1 − 2xρ(x̄)) − x̄²ρ'(x̄²)."""
    rho = pair.rho
    xb = 1.0 - x
    return float(
        rho.eval(xb) ** 2
        - rho.eval(xb**2)
        + rho.deriv(xb) * (1.0 - 2.0 * x * rho.eval(xb))
        - xb**2 * rho.deriv(xb**2)
    )


def _lambda_bracket(pair: DegreePair, y: float) -> float:
    """λ(y)² − λ(y²) − y²λ'(y²)."""
    lam = pair.lam
    return float(lam.eval(y) ** 2 - lam.eval(y**2) - y**2 * lam.deriv(y**2))


def _avg_var_degree(pair: DegreePair) -> float:
    return 1.0 / pair.lam.inverse_degree_sum()


def alpha(
    pair: DegreePair,
    de: DensityEvolutionSummary,
    point: Optional[CriticalPoint] = None,
) -> float:
    """Waterfall width alpha at the (single, unless given) critical point."""
    cp = _point(de, point)
    eps, y, x = de.eps_star, cp.y_star, cp.x_star
    avg_degree = _avg_var_degree(pair)
    lam_y = float(pair.lam.eval(y))
    rho_slope = float(pair.rho.deriv(1.0 - x))
    radicand = _rho_bracket(pair, x) / (avg_degree * lam_y**2 * rho_slope**2) + (
        eps**2 * _lambda_bracket(pair, y)
    ) / (avg_degree * lam_y**2)
    if not radicand > 0.0:
        raise ScalingError(f"alpha radicand is {radicand!r}; check the critical point")
    return math.sqrt(radicand)


def gamma_const(
    pair: DegreePair,
    de: DensityEvolutionSummary,
    point: Optional[CriticalPoint] = None,
) -> float:
    """Numerator constant of the variance divergence at eps* from above."""
    cp = _point(de, point)
    eps, y, x = de.eps_star, cp.y_star, cp.x_star
    lam_slope = float(pair.lam.deriv(y))
    rho_slope = float(pair.rho.deriv(1.0 - x))
    return (
        eps**2
        * lam_slope**2
        * (
            _rho_bracket(pair, x)
            + eps**2 * rho_slope**2 * _lambda_bracket(pair, y)
        )
    )


def r_star(pair: DegreePair, i: int, x_star: float) -> float:
    """r_i* = Σ_{m≥j≥i} (−1)^{i+j} C(j−1, i−1) C(m−1, j−1) ρ_m x*^j."""
    terms = [
        (-1) ** (i + j)
        * math.comb(j - 1, i - 1)
        * math.comb(m - 1, j - 1)
        * rho_m
        * x_star**j
        for m, rho_m in pair.rho.items()
        for j in range(i, m + 1)
    ]
    return math.fsum(terms)


def beta(
    pair: DegreePair,
    de: DensityEvolutionSummary,
    point: Optional[CriticalPoint] = None,
    omega: float = 1.0,
) -> float:
    """Finite-length threshold shift beta = omega * (beta/omega)."""
    cp = _point(de, point)
    eps, y, x = de.eps_star, cp.y_star, cp.x_star
    lam = pair.lam
    lam_slope = float(lam.deriv(y))
    lam_curv = float(lam.deriv2(y))
    rho_slope = float(pair.rho.deriv(1.0 - x))
    r2 = r_star(pair, 2, x)
    r3 = r_star(pair, 3, x)
    avg_degree = _avg_var_degree(pair)

    inner = eps * lam_slope**2 * r2 - x * (lam_curv * r2 + lam_slope * x)
    numerator = eps**4 * r2**2 * inner**2
    denominator = (
        avg_degree**2
        * rho_slope**3
        * x**10
        * (2.0 * eps * lam_slope**2 * r3 - lam_curv * r2 * x)
    )
    if denominator == 0.0 or not numerator / denominator > 0.0:
        raise ScalingError(
            f"beta cube-root argument is not positive ({numerator!r}/{denominator!r})"
        )
    return omega * (numerator / denominator) ** (1.0 / 3.0)


def scaling_params(
    pair: DegreePair,
    de: DensityEvolutionSummary,
    point: Optional[CriticalPoint] = None,
    settings: Optional[Settings] = None,
) -> ScalingParams:
    """alpha, beta and gamma for one critical point, with provenance."""
    settings = settings or get_settings()
    cp = _point(de, point)
    gamma = gamma_const(pair, de, cp)
    if not gamma > 0.0:
        raise ScalingError(f"gamma constant is {gamma!r}, expected positive")
    params = ScalingParams(
        alpha=alpha(pair, de, cp),
        beta=beta(pair, de, cp, settings.omega),
        omega=settings.omega,
        gamma_const=gamma,
        eps_star=de.eps_star,
        y_star=cp.y_star,
        x_star=cp.x_star,
        nu_star=cp.nu_star,
    )
    if params.beta <= 0.0:
        logger.warning(f"beta = {params.beta:.6g} is not positive for this ensemble")
    return params


def scaling_per_critical_point(
    pair: DegreePair,
    de: DensityEvolutionSummary,
    settings: Optional[Settings] = None,
) -> List[ScalingParams]:
    """Scaling parameters for every critical point of ``de``."""
    if not de.critical_points:
        raise ScalingError("ensemble has no interior critical point")
    return [scaling_params(pair, de, cp, settings) for cp in de.critical_points]

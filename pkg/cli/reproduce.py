"""End-to-end reproduction of the sample optimization at n = 5000, ε = 0.5."""

import logging
from typing import List, Optional

from pydantic import BaseModel

from analysis import catalog
from analysis.approximation import ErasureApproximation
from analysis.density_evolution import threshold
from analysis.ensemble import design_rate
from analysis.stopping_sets import expurgation_probability, spectrum
from models.optimization import OptimizerConfig
from optimization.optimizer import optimize
from shared.config import Settings

logger = logging.getLogger(__name__)

N = 5000
EPSILON = 0.5
S_MIN = 6
P_TARGET = 1e-4
MINIMAL_SPECTRUM = (0.2073, 0.04688, 0.01676, 0.007874, 0.0043335)


class Check(BaseModel):
    name: str
    value: Optional[float]
    expected: float
    tolerance: str
    passed: Optional[bool]


def _absolute(name: str, value: float, expected: float, tol: float) -> Check:
    return Check(
        name=name,
        value=value,
        expected=expected,
        tolerance=f"±{tol:g}",
        passed=abs(value - expected) <= tol,
    )


def _reference(name: str, value: float, published: float) -> Check:
    return Check(
        name=name, value=value, expected=published, tolerance="reference", passed=None
    )


def _relative(name: str, value: float, expected: float, rel: float) -> Check:
    return Check(
        name=name,
        value=value,
        expected=expected,
        tolerance=f"±{rel:.0%}",
        passed=abs(value - expected) <= rel * abs(expected),
    )


def _at_most(name: str, value: float, bound: float) -> Check:
    return Check(
        name=name, value=value, expected=bound, tolerance="<=", passed=value <= bound
    )


def _at_least(name: str, value: float, bound: float) -> Check:
    return Check(
        name=name, value=value, expected=bound, tolerance=">=", passed=value >= bound
    )


def optim_example_checks(
    settings: Settings, with_optimization: bool = False
) -> List[Check]:
    """Threshold, rate, spectrum and approximation anchors of the sample design."""
    checks = [
        _absolute(
            "threshold regular (3,6)",
            threshold(catalog.regular_3_6(), settings=settings).eps_star,
            0.42944,
            1e-5,
        ),
        _reference(
            "threshold variance example",
            threshold(catalog.variance_example(), settings=settings).eps_star,
            0.8495897455,
        ),
        _absolute("rate initial", design_rate(catalog.optim_initial()), 0.2029, 1e-4),
        _absolute(
            "rate intermediate", design_rate(catalog.optim_intermediate()), 0.218, 1e-3
        ),
        _absolute("rate final", design_rate(catalog.optim_final()), 0.41065, 1e-5),
        _absolute(
            "rate expurgated", design_rate(catalog.optim_expurgated()), 0.433942, 1e-5
        ),
    ]

    final = spectrum(N, catalog.optim_final(), settings=settings)
    for s, expected in enumerate(MINIMAL_SPECTRUM, start=1):
        value = float(final.A_tilde[s])
        checks.append(_relative(f"A~_{s} final", value, expected, 0.01))
    checks.append(
        _absolute(
            "expurgation probability final",
            expurgation_probability(final, S_MIN),
            0.753,
            0.01,
        )
    )

    for name, pair, expected in (
        ("P_B initial", catalog.optim_initial(), 0.000552),
        ("P_B intermediate", catalog.optim_intermediate(), 0.0000997),
    ):
        approx = ErasureApproximation(N, pair, S_MIN, settings)
        checks.append(_relative(name, approx.probability(EPSILON), expected, 0.10))

    if with_optimization:
        checks.extend(_optimization_checks(settings))
    return checks


def _optimization_checks(settings: Settings) -> List[Check]:
    config = OptimizerConfig(
        n=N, epsilon=EPSILON, p_target=P_TARGET, dl_max=13, dr_max=10, s_min=S_MIN
    )
    logger.info("running the sample optimization; this takes minutes")
    trace = optimize(config, catalog.optim_initial(), settings)
    pair = trace.final.pair
    p_full = ErasureApproximation(N, pair, S_MIN, settings).probability(EPSILON)
    return [
        _at_least("optimized rate", trace.final.rate, 0.40),
        _at_most("optimized P_B (full spectrum)", p_full, P_TARGET),
    ]

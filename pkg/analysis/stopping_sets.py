"""Ensemble-average stopping-set spectrum and the error-floor terms built on it.

A_s = Σ_e [x^s y^e] Π_i (1 + x y^i)^(nΛ_i) · [x^e] Π_i ((1+x)^i − ix)^(n(1−r)Γ_i)
      / C(n L'(1), e)

All tables are computed with mpmath at ``settings.spectrum_dps`` digits; the
binomial denominators overflow doubles long before the ratios do.
"""

import logging
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath

from analysis.ensemble import design_rate, node_fractions
from models.ensemble import DegreePair
from models.spectrum import StoppingSetSpectrum, TruncatedSeries
from shared.config import Settings, get_settings
from shared.errors import SpectrumError

logger = logging.getLogger(__name__)

NEGATIVE_TOL = mpmath.mpf("1e-30")

Table = List[List[mpmath.mpf]]


def _binomial_series(t: float, top: int) -> List[mpmath.mpf]:
    """C(t, k) for k = 0..top, t real, by the running product t(t−1)…(t−k+1)/k!."""
    t = mpmath.mpf(t)
    out = [mpmath.mpf(1)]
    for k in range(1, top + 1):
        out.append(out[-1] * (t - k + 1) / k)
    return out


def _check_finite(value: mpmath.mpf, where: str) -> None:
    if not mpmath.isfinite(value):
        raise SpectrumError(f"coefficient overflow in {where}")


def variable_side(
    n: int, var_fractions: Sequence[float], s_max: int, e_max: int
) -> Table:
    """T[s][e] = [x^s y^e] Π_i (1 + x y^i)^(nΛ_i), truncated at s_max and e_max.

    ``var_fractions[i]`` is Λ_i. Work at the caller's mpmath precision.
    """
    table: Dict[Tuple[int, int], mpmath.mpf] = {(0, 0): mpmath.mpf(1)}
    for degree, fraction in enumerate(var_fractions):
        if degree == 0 or fraction == 0.0:
            continue
        weights = _binomial_series(n * fraction, s_max)
        grown: Dict[Tuple[int, int], mpmath.mpf] = {}
        for (s, e), value in table.items():
            for k, weight in enumerate(weights):
                if s + k > s_max or e + degree * k > e_max:
                    break
                if weight == 0:
                    continue
                key = (s + k, e + degree * k)
                grown[key] = grown.get(key, mpmath.mpf(0)) + value * weight
        table = grown

    dense = [[mpmath.mpf(0)] * (e_max + 1) for _ in range(s_max + 1)]
    for (s, e), value in table.items():
        _check_finite(value, "variable_side")
        dense[s][e] = value
    return dense


def _series_power(base: List[mpmath.mpf], t: mpmath.mpf, top: int) -> List[mpmath.mpf]:
    """base(x)^t truncated at x^top, for base[0] = 1 and real t (J.C.P. Miller)."""
    out = [mpmath.mpf(1)] + [mpmath.mpf(0)] * top
    support = [k for k in range(1, len(base)) if base[k] != 0]
    for m in range(1, top + 1):
        acc = mpmath.mpf(0)
        for k in support:
            if k > m:
                break
            acc += (k * (t + 1) - m) * base[k] * out[m - k]
        out[m] = acc / m
    return out


def _multiply(a: List[mpmath.mpf], b: List[mpmath.mpf], top: int) -> List[mpmath.mpf]:
    out = [mpmath.mpf(0)] * (top + 1)
    for i, ai in enumerate(a[: top + 1]):
        if ai == 0:
            continue
        for j in range(top + 1 - i):
            out[i + j] += ai * b[j]
    return out


def check_side(
    n: int, rate: float, check_fractions: Sequence[float], e_max: int
) -> List[mpmath.mpf]:
    """U[e] = [x^e] Π_i ((1+x)^i − ix)^(n(1−r)Γ_i), truncated at e_max."""
    total = [mpmath.mpf(1)] + [mpmath.mpf(0)] * e_max
    for degree, fraction in enumerate(check_fractions):
        if degree == 0 or fraction == 0.0:
            continue
        base = [mpmath.mpf(1), mpmath.mpf(0)] + [
            mpmath.mpf(mpmath.binomial(degree, k)) for k in range(2, degree + 1)
        ]
        exponent = mpmath.mpf(n) * (1 - mpmath.mpf(rate)) * fraction
        total = _multiply(total, _series_power(base, exponent, e_max), e_max)
    for value in total:
        _check_finite(value, "check_side")
    return total


def series_log(a: Sequence[mpmath.mpf]) -> List[mpmath.mpf]:
    """Coefficients of log A(x) for A_0 = 1: s·Ã_s = s·A_s − Σ_{k<s} k·Ã_k·A_(s−k)."""
    if a[0] != 1:
        raise SpectrumError(f"series logarithm needs A_0 = 1, got {a[0]}")
    out = [mpmath.mpf(0)] * len(a)
    for s in range(1, len(a)):
        acc = s * a[s]
        for k in range(1, s):
            acc -= k * out[k] * a[s - k]
        out[s] = acc / s
    return out


def series_exp(b: Sequence[mpmath.mpf]) -> List[mpmath.mpf]:
    """Inverse of :func:`series_log` for b_0 = 0."""
    out = [mpmath.mpf(1)] + [mpmath.mpf(0)] * (len(b) - 1)
    for s in range(1, len(b)):
        out[s] = mpmath.fsum(k * b[k] * out[s - k] for k in range(1, s + 1)) / s
    return out


@lru_cache(maxsize=64)
def _cached_spectrum(
    n: int,
    lam_coeffs: Tuple[float, ...],
    rho_coeffs: Tuple[float, ...],
    s_max: int,
    dps: int,
) -> StoppingSetSpectrum:
    pair = DegreePair.unchecked(lam_coeffs, rho_coeffs)
    var_fractions, avg_var = node_fractions(pair.lam)
    check_fractions, _ = node_fractions(pair.rho)
    rate = design_rate(pair)
    e_max = s_max * pair.lam.max_degree

    with mpmath.workdps(dps):
        table = variable_side(n, var_fractions, s_max, e_max)
        checks = check_side(n, rate, check_fractions, e_max)
        edges = mpmath.mpf(n) * mpmath.mpf(avg_var)
        inverse_binomials = [1 / mpmath.binomial(edges, e) for e in range(e_max + 1)]

        a = [mpmath.mpf(1)]
        for s in range(1, s_max + 1):
            value = mpmath.fsum(
                table[s][e] * checks[e] * inverse_binomials[e]
                for e in range(e_max + 1)
                if table[s][e] != 0
            )
            if value < 0:
                if value < -NEGATIVE_TOL * max(1, abs(a[-1])):
                    raise SpectrumError(f"A_{s} = {mpmath.nstr(value, 8)} is negative")
                value = mpmath.mpf(0)
            _check_finite(value, "spectrum")
            a.append(value)
        a_tilde = series_log(a)

    logger.debug(
        f"spectrum n={n} s_max={s_max} e_max={e_max}: "
        f"A_tilde[1..5] = {[float(v) for v in a_tilde[1:6]]}"
    )
    return StoppingSetSpectrum(
        n=n,
        A=TruncatedSeries(coeffs=tuple(a)),
        A_tilde=TruncatedSeries(coeffs=tuple(a_tilde)),
        s_max=s_max,
        e_max=e_max,
    )


def spectrum(
    n: int,
    pair: DegreePair,
    s_max: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> StoppingSetSpectrum:
    """Expected stopping-set spectrum of the (n, λ, ρ) ensemble up to size s_max."""
    settings = settings or get_settings()
    s_max = s_max if s_max is not None else settings.s_max
    if s_max < 1:
        raise ValueError(f"s_max must be >= 1, got {s_max}")
    if n < 1:
        raise ValueError(f"blocklength must be >= 1, got {n}")
    return _cached_spectrum(
        n, pair.lam.coeffs, pair.rho.coeffs, s_max, settings.spectrum_dps
    )


def _floor_sum(
    spec: StoppingSetSpectrum, s_min: int, epsilon: float, weighted: bool
) -> mpmath.mpf:
    eps = mpmath.mpf(epsilon)
    return mpmath.fsum(
        (s if weighted else 1) * spec.A_tilde[s] * eps**s
        for s in range(max(s_min, 1), spec.s_max + 1)
    )


def floor_bit(spec: StoppingSetSpectrum, s_min: int, epsilon: float) -> float:
    """Σ_{s_min ≤ s ≤ s_max} s·Ã_s·ε^s / n, the expected erased-bit fraction."""
    return float(_floor_sum(spec, s_min, epsilon, True) / spec.n)


def floor_block(spec: StoppingSetSpectrum, s_min: int, epsilon: float) -> float:
    """1 − exp(−Σ_{s_min ≤ s ≤ s_max} Ã_s ε^s)."""
    return float(-mpmath.expm1(-_floor_sum(spec, s_min, epsilon, False)))


def expurgation_probability(spec: StoppingSetSpectrum, s_min: int) -> float:
    """exp(−Σ_{s<s_min} Ã_s): chance that a code has no stopping set below s_min."""
    top = min(s_min - 1, spec.s_max)
    if s_min - 1 > spec.s_max:
        logger.warning(
            f"s_min = {s_min} exceeds s_max + 1 = {spec.s_max + 1}; truncating the sum"
        )
    return float(mpmath.exp(-mpmath.fsum(spec.A_tilde[s] for s in range(1, top + 1))))

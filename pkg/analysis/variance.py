"""Variance of the number of erased variable-to-check messages.

``variance_finite`` evaluates the normalized variance after ℓ rounds of BP in
the large-n limit by walking the computation tree with 2×2 transfer matrices;
``variance_limit`` is the ℓ → ∞ closed form at the density-evolution fixed
point. All matrix chains are carried as running row vectors.
"""

import logging
import math
from typing import Any, Callable, Dict, List, Optional, Tuple

import mpmath

from analysis.density_evolution import fixed_point_above, threshold
from models.density import DensityEvolutionSummary
from models.ensemble import DegreePair, DegreePolynomial
from models.variance import VarianceComputation
from shared.config import Settings, get_settings
from shared.errors import ThresholdError

logger = logging.getLogger(__name__)

Vec = Tuple[Any, Any]
Mat = Tuple[Vec, Vec]


def _row_times(v: Vec, m: Mat) -> Vec:
    return (v[0] * m[0][0] + v[1] * m[1][0], v[0] * m[0][1] + v[1] * m[1][1])


def _times_col(m: Mat, u: Vec) -> Vec:
    return (m[0][0] * u[0] + m[0][1] * u[1], m[1][0] * u[0] + m[1][1] * u[1])


def _dot(v: Vec, u: Vec) -> Any:
    return v[0] * u[0] + v[1] * u[1]


def _add(u: Vec, w: Vec) -> Vec:
    return (u[0] + w[0], u[1] + w[1])


class _Poly:
    """Horner evaluation in whatever number type the coefficients carry."""

    def __init__(self, p: DegreePolynomial, num: Callable[[Any], Any]):
        # p(1) = 1 at working precision
        total = sum((num(c) for c in p.coeffs), num(0))
        self.coeffs = [num(c) / total for c in p.coeffs[1:]]
        self.slopes = [num(k) * c for k, c in enumerate(self.coeffs) if k >= 1]
        self.zero = num(0)

    @staticmethod
    def _horner(coeffs: List[Any], x: Any, zero: Any) -> Any:
        acc = zero
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    def value(self, x: Any) -> Any:
        return self._horner(self.coeffs, x, self.zero)

    def slope(self, x: Any) -> Any:
        return self._horner(self.slopes, x, self.zero)


class MessageMatrices:
    """Transfer matrices V(i), C(i) of the computation tree at erasure probability ε.

    x_i, y_i follow density evolution from y_0 = 1 and are 1 for i < 0, where
    V and C become diagonal with λ'(1) and ρ'(1).
    """

    def __init__(
        self,
        pair: DegreePair,
        epsilon: float,
        ell: int,
        num: Callable[[Any], Any] = float,
    ):
        self.num = num
        self.ell = ell
        self.eps = num(epsilon)
        self.one = num(1)
        self.zero = num(0)
        self.lam = _Poly(pair.lam, num)
        self.rho = _Poly(pair.rho, num)
        self.a1 = self.lam.slope(self.one)
        self.b1 = self.rho.slope(self.one)

        self.ys = [self.one]
        self.xs = []
        for i in range(ell + 1):
            self.xs.append(self.eps * self.lam.value(self.ys[i]))
            if i < ell:
                self.ys.append(self.one - self.rho.value(self.one - self.xs[i]))

    def x(self, i: int) -> Any:
        return self.one if i < 0 else self.xs[i]

    def y(self, i: int) -> Any:
        return self.one if i < 0 else self.ys[i]

    def x_bar(self, i: int) -> Any:
        return self.one - self.x(i)

    def lam_slope_at(self, i: int) -> Any:
        """ελ'(y_i)."""
        return self.eps * self.lam.slope(self.y(i))

    def rho_slope_at(self, i: int) -> Any:
        """ρ'(x̄_i)."""
        return self.rho.slope(self.x_bar(i))

    def V(self, i: int) -> Mat:
        if i < 0:
            return ((self.a1, self.zero), (self.zero, self.a1))
        lp = self.lam_slope_at(i)
        return ((lp, self.zero), (self.a1 - lp, self.a1))

    def C(self, i: int) -> Mat:
        if i < 0:
            return ((self.b1, self.zero), (self.zero, self.b1))
        rp = self.rho_slope_at(i)
        return ((self.b1, self.b1 - rp), (self.zero, rp))

    def column_sums(self, i: int) -> Tuple[Vec, Vec]:
        """Column sums of V(i) and C(i); always (λ'(1), λ'(1)) and (ρ'(1), ρ'(1))."""
        v, c = self.V(i), self.C(i)
        return (
            (v[0][0] + v[1][0], v[0][1] + v[1][1]),
            (c[0][0] + c[1][0], c[0][1] + c[1][1]),
        )

    def chain_rows(self, i: int, length: int) -> List[Vec]:
        """(1, 0)·V(i)C(i−1)···V(i−j+1)C(i−j) for j = 0..length."""
        rows = [(self.one, self.zero)]
        for j in range(1, length + 1):
            step = _row_times(rows[-1], self.V(i - j + 1))
            rows.append(_row_times(step, self.C(i - j)))
        return rows


class _TreeVariance:
    """Assembles the tree terms and the finite-size corrections for one (ε, ℓ)."""

    def __init__(self, m: MessageMatrices):
        self.m = m
        ell = m.ell
        self.rows = m.chain_rows(ell, 2 * ell)
        growth = m.a1 * m.b1
        self.geometric = sum((growth**i for i in range(ell)), m.zero)
        self.growth_ell = growth**ell
        self.x_ell = m.x(ell)

    def tree_terms(self) -> Dict[str, Any]:
        m, ell, x_ell = self.m, self.m.ell, self.x_ell
        first = [row[0] for row in self.rows]
        return {
            "t1": x_ell + x_ell * sum(first[1 : ell + 1], m.zero),
            "t2": x_ell**2 * m.b1 * self.geometric,
            "t3": x_ell * sum(first[1 : 2 * ell + 1], m.zero),
            "t4": self._t4(),
        }

    def _step(self, j: int, k: int, u_star: Vec, u_zero: Vec) -> Tuple[Vec, Vec]:
        m, ell, z = self.m, self.m.ell, self.m.zero
        a, b = ell - k, ell - j + k
        lp = m.lam_slope_at
        m1: Mat = (
            (lp(max(a, b)), z),
            ((lp(a) - lp(b)) if j < 2 * k else z, lp(a)),
        )
        m2: Mat = (
            ((lp(b) - lp(a)) if j > 2 * k else z, z),
            (m.a1 - lp(min(a, b)), m.a1 - lp(a)),
        )
        kp = k - 1
        c, d = ell - k, ell - j + k - 1
        rp = m.rho_slope_at
        n1: Mat = (
            (m.b1 - rp(c), m.b1 - rp(max(c, d))),
            (z, (rp(d) - rp(c)) if j <= 2 * kp else z),
        )
        n2: Mat = (
            (rp(c), (rp(c) - rp(d)) if j > 2 * kp else z),
            (z, rp(min(c, d))),
        )
        inner = _add(_times_col(n1, u_star), _times_col(n2, u_zero))
        new_star = _add(
            _times_col(m1, _times_col(m.C(ell - j + k - 1), u_star)),
            _times_col(m2, inner),
        )
        new_zero = _times_col(m.V(ell - j + k), inner)
        return new_star, new_zero

    def _t4(self) -> Any:
        m, ell = self.m, self.m.ell
        eps, a1, z = m.eps, m.a1, m.zero
        total = z
        for j in range(ell + 1):
            y_far = m.y(ell - j)
            root = m.lam_slope_at(ell)
            u_star: Vec = (y_far * root, (m.one - y_far) * root)
            u_zero: Vec = (z, z)
            for k in range(1, j + 1):
                u_star, u_zero = self._step(j, k, u_star, u_zero)
            total += y_far * u_star[0] + (m.one - y_far) * u_zero[0]
        for j in range(ell + 1, 2 * ell + 1):
            row = self.rows[j - ell]
            lam_far = m.lam.slope(m.y(2 * ell - j))
            u_star = _add(
                (row[0] * eps * lam_far, z),
                (row[1] * eps * (a1 - lam_far), row[1] * a1 * (m.one - eps)),
            )
            u_zero = (row[1] * eps * a1, row[1] * (m.one - eps) * a1)
            for k in range(j - ell + 1, ell + 1):
                u_star, u_zero = self._step(j, k, u_star, u_zero)
            total += _dot(row, u_star)
        return total

    def _w(self, alpha: Any) -> Any:
        m, ell = self.m, self.m.ell
        lam = m.lam
        whole = alpha * lam.slope(alpha) + lam.value(alpha)
        acc = m.zero
        for k in range(2 * ell + 1):
            if k <= ell:
                ay = alpha * m.y(ell - k)
                near = m.eps * (ay * lam.slope(ay) + lam.value(ay))
                acc += _dot(self.rows[k], (near, whole - near))
            else:
                acc += self.rows[k][0] * whole
        return acc + self.x_ell * whole * m.b1 * self.geometric

    def _d(self, alpha: Any) -> Any:
        m, ell = self.m, self.m.ell
        rho = m.rho
        whole = alpha * rho.slope(alpha) + rho.value(alpha)
        acc = m.zero
        for k in range(1, 2 * ell + 1):
            ax = alpha * m.x_bar(ell - k)
            near = ax * rho.slope(ax) + rho.value(ax)
            row = _row_times(self.rows[k - 1], m.V(ell - k + 1))
            acc += _dot(row, (whole - near, near))
        return acc + self.x_ell * whole * self.geometric

    def _f(self) -> List[Any]:
        """F_i for i = 0..ℓ; F_ℓ = 1."""
        m, ell = self.m, self.m.ell
        factors = [m.one] * (ell + 1)
        for i in range(ell - 1, -1, -1):
            factors[i] = factors[i + 1] * m.lam_slope_at(i + 1) * m.rho_slope_at(i)
        return factors

    def corrections(self) -> Dict[str, Any]:
        m, ell, x_ell = self.m, self.m.ell, self.x_ell
        one, z = m.one, m.zero
        f = self._f()
        w_one = self._w(one)
        d_one = self._d(one)

        size = -x_ell * w_one
        degree_w = sum(
            (
                f[i] * (m.x(i) * w_one - m.eps * self._w(m.y(i)))
                for i in range(1, ell + 1)
            ),
            z,
        )
        degree_d = -sum(
            (
                f[i]
                * m.lam_slope_at(i)
                * (d_one * m.rho.value(m.x_bar(i - 1)) - self._d(m.x_bar(i - 1)))
                for i in range(1, ell + 1)
            ),
            z,
        )
        boundary = x_ell + _row_times(self.rows[ell], m.V(0))[0]
        boundary_terms = z
        for i in range(1, ell):
            reach = m.chain_rows(i, ell)[ell][0]
            boundary_terms += f[i] * boundary * (reach - m.x(i) * self.growth_ell)
        return {
            "size": size,
            "degree_w": degree_w,
            "degree_d": degree_d,
            "boundary": boundary_terms,
        }


def _digits_lost(pair: DegreePair, ell: int) -> float:
    """Decimal digits cancelled between tree terms of size (λ'(1)ρ'(1))^2ℓ."""
    growth = float(pair.lam.deriv(1.0) * pair.rho.deriv(1.0))
    return 2 * ell * math.log10(max(growth, 1.0))


def variance_breakdown(
    pair: DegreePair,
    epsilon: float,
    ell: int,
    settings: Optional[Settings] = None,
) -> VarianceComputation:
    """Normalized message variance after ℓ rounds, with its individual terms."""
    settings = settings or get_settings()
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    if not 0 <= ell <= settings.variance_max_ell:
        raise ValueError(f"ell must lie in [0, {settings.variance_max_ell}], got {ell}")

    lost = _digits_lost(pair, ell)
    big_float = lost > settings.variance_float_digits
    if big_float:
        dps = 30 + math.ceil(lost)
        logger.debug(f"variance at ell={ell}: switching to mpmath with {dps} digits")
        with mpmath.workdps(dps):
            tree = _TreeVariance(MessageMatrices(pair, epsilon, ell, mpmath.mpf))
            parts = {**tree.tree_terms(), **tree.corrections()}
            value = float(mpmath.fsum(parts.values()))
            terms = {name: float(v) for name, v in parts.items()}
    else:
        tree = _TreeVariance(MessageMatrices(pair, epsilon, ell))
        raw = {**tree.tree_terms(), **tree.corrections()}
        terms = {name: float(v) for name, v in raw.items()}
        value = math.fsum(terms.values())

    if value < -1e-9:
        logger.warning(f"variance {value:.3g} < 0 at eps={epsilon}, ell={ell}")
    return VarianceComputation(
        epsilon=epsilon, ell=ell, terms=terms, value=value, big_float=big_float
    )


def variance_finite(
    pair: DegreePair,
    epsilon: float,
    ell: int,
    settings: Optional[Settings] = None,
) -> float:
    return variance_breakdown(pair, epsilon, ell, settings).value


def _limit_parts(
    pair: DegreePair, epsilon: float, x: float, y: float
) -> Tuple[float, float]:
    """(numerator over den², den) of the ℓ → ∞ limit, den = 1 − ελ'(y)ρ'(x̄)."""
    lam, rho = pair.lam, pair.rho
    eps = epsilon
    xb = 1.0 - x
    lam_slope = float(lam.deriv(y))
    rho_slope = float(rho.deriv(xb))
    den = 1.0 - eps * lam_slope * rho_slope
    rho_bracket = float(
        rho.eval(xb) ** 2
        - rho.eval(xb**2)
        + rho_slope * (1.0 - 2.0 * x * rho.eval(xb))
        - xb**2 * rho.deriv(xb**2)
    )
    lam_square = float(eps**2 * lam.eval(y**2) + y**2 * eps**2 * lam.deriv(y**2))
    lam_bracket = float(eps**2 * lam.eval(y) ** 2) - lam_square
    squared = eps**2 * lam_slope**2 * (rho_bracket + rho_slope**2 * lam_bracket)
    linear = (x - lam_square) * (1.0 + eps * lam_slope * rho_slope)
    linear += eps * y**2 * lam_slope
    return squared + linear * den, den


def variance_limit(
    pair: DegreePair,
    epsilon: float,
    settings: Optional[Settings] = None,
    de: Optional[DensityEvolutionSummary] = None,
) -> float:
    """ℓ → ∞ normalized variance; 0 at or below the threshold."""
    de = de or threshold(pair, settings=settings)
    if epsilon <= de.eps_star:
        return 0.0
    try:
        x, y = fixed_point_above(pair, epsilon, settings=settings)
    except ThresholdError:
        return 0.0
    numerator, den = _limit_parts(pair, epsilon, x, y)
    return numerator / den**2


def scaled_variance_limit(
    pair: DegreePair, epsilon: float, settings: Optional[Settings] = None
) -> float:
    """(1 − ελ'(y)ρ'(x̄))² times the limiting variance; tends to γ as ε ↓ ε*."""
    try:
        x, y = fixed_point_above(pair, epsilon, settings=settings)
    except ThresholdError:
        return 0.0
    return _limit_parts(pair, epsilon, x, y)[0]

"""Degree-distribution arithmetic: validation, perspectives, rate, perturbations."""

import logging
import math
from typing import List, Mapping, Optional, Tuple

import numpy as np

from models.ensemble import (
    ARITHMETIC_TOL,
    CONSTRUCTION_TOL,
    DegreePair,
    DegreePolynomial,
    NodePerspective,
)
from shared.errors import EnsembleError

logger = logging.getLogger(__name__)

SparseCoeffs = Mapping[int, float]


def validate(p: DegreePolynomial) -> List[str]:
    """Return the list of invariant violations of ``p`` (empty when valid)."""
    return p.diagnostics(CONSTRUCTION_TOL)


def node_fractions(p: DegreePolynomial) -> Tuple[Tuple[float, ...], float]:
    """Node fractions (index = degree) and average node degree, without validation."""
    weights = [c / d if d >= 1 else 0.0 for d, c in enumerate(p.coeffs)]
    total = math.fsum(weights)
    if total <= 0.0:
        raise EnsembleError("degree distribution has no mass")
    return tuple(w / total for w in weights), 1.0 / total


def edge_to_node(pair: DegreePair) -> NodePerspective:
    """Λ_i ∝ λ_i / i and Γ_i ∝ ρ_i / i, with the average node degrees."""
    var_fractions, avg_var = node_fractions(pair.lam)
    check_fractions, avg_check = node_fractions(pair.rho)
    return NodePerspective(
        var_fractions=var_fractions,
        check_fractions=check_fractions,
        avg_var_degree=avg_var,
        avg_check_degree=avg_check,
    )


def _edge_from_node(fractions: Tuple[float, ...]) -> DegreePolynomial:
    weights = [d * f for d, f in enumerate(fractions)]
    total = math.fsum(weights)
    return DegreePolynomial(coeffs=tuple(w / total for w in weights))


def node_to_edge(node: NodePerspective) -> DegreePair:
    """Inverse of :func:`edge_to_node`: λ_i ∝ i·Λ_i, ρ_i ∝ i·Γ_i."""
    return DegreePair(
        lam=_edge_from_node(node.var_fractions),
        rho=_edge_from_node(node.check_fractions),
    )


def pair_from_node_maps(
    var_fractions: Mapping[int, float], check_fractions: Mapping[int, float]
) -> DegreePair:
    """Build an edge-perspective pair from node-perspective degree maps."""

    def dense(fractions: Mapping[int, float]) -> Tuple[float, ...]:
        top = max(fractions)
        out = [0.0] * (top + 1)
        for degree, value in fractions.items():
            out[degree] = float(value)
        return tuple(out)

    return DegreePair(
        lam=_edge_from_node(dense(var_fractions)),
        rho=_edge_from_node(dense(check_fractions)),
    )


def design_rate(pair: DegreePair) -> float:
    """r(λ, ρ) = 1 − (Σ ρ_i/i) / (Σ λ_j/j)."""
    return 1.0 - pair.rho.inverse_degree_sum() / pair.lam.inverse_degree_sum()


def rate_differential(
    pair: DegreePair, dlambda: SparseCoeffs, drho: SparseCoeffs
) -> float:
    """First-order change of the design rate under (Δλ, Δρ)."""
    rate = design_rate(pair)
    lam_integral = pair.lam.inverse_degree_sum()
    gain = math.fsum((1.0 - rate) * dv / d for d, dv in dlambda.items())
    loss = math.fsum(dv / d for d, dv in drho.items())
    return (gain - loss) / lam_integral


def _apply(
    p: DegreePolynomial, delta: SparseCoeffs, side: str
) -> DegreePolynomial:
    if abs(math.fsum(delta.values())) > CONSTRUCTION_TOL:
        raise EnsembleError(f"{side} perturbation does not sum to zero")
    if any(d < 1 for d in delta):
        raise EnsembleError(f"{side} perturbation touches degree < 1")
    top = max([p.max_degree, *delta.keys()])
    coeffs = [p.coefficient(d) for d in range(top + 1)]
    for degree, value in delta.items():
        coeffs[degree] += value
    for degree, value in enumerate(coeffs):
        if value < 0.0:
            if value < -CONSTRUCTION_TOL:
                raise EnsembleError(
                    f"{side}_{degree} would become {value:.3g} (negative)"
                )
            coeffs[degree] = 0.0
    result = DegreePolynomial.model_construct(coeffs=tuple(coeffs))
    if abs(result.total() - 1.0) > ARITHMETIC_TOL:
        raise EnsembleError(f"{side} sums to {result.total()!r} after perturbation")
    return result.normalized()


def perturb(
    pair: DegreePair,
    dlambda: Optional[SparseCoeffs] = None,
    drho: Optional[SparseCoeffs] = None,
) -> DegreePair:
    """Add zero-sum coefficient changes to both sides of ``pair``."""
    return DegreePair(
        lam=_apply(pair.lam, dlambda or {}, "lambda"),
        rho=_apply(pair.rho, drho or {}, "rho"),
    )


def random_pair(dl_max: int, dr_max: int, rng: np.random.Generator) -> DegreePair:
    """Coefficients of degrees 2..max drawn uniformly in [0, 1] and normalized."""
    lam = rng.uniform(0.0, 1.0, size=dl_max - 1)
    rho = rng.uniform(0.0, 1.0, size=dr_max - 1)
    return DegreePair(
        lam=DegreePolynomial(coeffs=(0.0, 0.0, *(lam / lam.sum()))),
        rho=DegreePolynomial(coeffs=(0.0, 0.0, *(rho / rho.sum()))),
    )

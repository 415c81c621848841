"""Small dense linear programs over degree-coefficient changes.

Solved with the HiGHS dual simplex behind ``scipy.optimize.linprog``; the
returned basic solution is checked against the dual marginals, snapped onto
its box and zero-sum constraints, and replaced by Δ = 0 whenever Δ = 0 is
feasible and attains the optimum.
"""

import logging
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from models.ensemble import DegreePair
from models.optimization import LPProblem, LPSolution, Side
from shared.errors import LPError, LPInfeasibleError, LPUnboundedError

logger = logging.getLogger(__name__)

SOLVER_TOL = 1e-10
CERTIFY_TOL = 1e-9
TIE_TOL = 1e-13

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": SOLVER_TOL,
    "dual_feasibility_tolerance": SOLVER_TOL,
}


def _scale(values: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0


def _certify(problem: LPProblem, result) -> None:
    """Stationarity and sign conditions of the dual marginals."""
    c = np.asarray(problem.objective, dtype=float)
    reduced = c.copy()
    if problem.eq_rows:
        reduced -= np.asarray(problem.eq_rows).T @ result.eqlin.marginals
    ineq = np.zeros(0)
    if problem.ub_rows:
        ineq = np.asarray(result.ineqlin.marginals)
        reduced -= np.asarray(problem.ub_rows).T @ ineq
    lower = np.asarray(result.lower.marginals)
    upper = np.asarray(result.upper.marginals)
    reduced -= lower + upper

    tol = CERTIFY_TOL * _scale(c)
    problems = []
    if np.max(np.abs(reduced), initial=0.0) > tol:
        problems.append(f"stationarity residual {np.max(np.abs(reduced)):.3g}")
    if np.min(lower, initial=0.0) < -tol:
        problems.append(f"negative lower-bound reduced cost {np.min(lower):.3g}")
    if np.max(upper, initial=0.0) > tol:
        problems.append(f"positive upper-bound reduced cost {np.max(upper):.3g}")
    if np.max(ineq, initial=0.0) > tol:
        problems.append(f"positive inequality multiplier {np.max(ineq):.3g}")
    if problems:
        raise LPError("LP optimum not certified: " + "; ".join(problems))


def _repair(problem: LPProblem, x: np.ndarray) -> np.ndarray:
    """Clip onto the box, then restore each 0/1 equality row by moving slack."""
    lower = np.asarray(problem.lower)
    upper = np.asarray(problem.upper)
    x = np.clip(x, lower, upper)
    for row, rhs in zip(problem.eq_rows, problem.eq_rhs):
        members = [i for i, a in enumerate(row) if a != 0.0]
        residual = rhs - float(np.sum(x[members]))
        for i in sorted(
            members,
            key=lambda i: -(upper[i] - x[i] if residual > 0 else x[i] - lower[i]),
        ):
            if residual == 0.0:
                break
            room = upper[i] - x[i] if residual > 0 else lower[i] - x[i]
            move = min(residual, room) if residual > 0 else max(residual, room)
            x[i] += move
            residual -= move
    return x


def _zero_feasible(problem: LPProblem) -> bool:
    return (
        all(lo <= 0.0 <= hi for lo, hi in zip(problem.lower, problem.upper))
        and all(b == 0.0 for b in problem.eq_rhs)
        and all(b >= 0.0 for b in problem.ub_rhs)
    )


def solve_lp(problem: LPProblem) -> LPSolution:
    """Optimal Δ of ``problem``; raises LPInfeasibleError / LPUnboundedError."""
    c = np.asarray(problem.objective, dtype=float)
    result = linprog(
        c,
        A_ub=np.asarray(problem.ub_rows) if problem.ub_rows else None,
        b_ub=np.asarray(problem.ub_rhs) if problem.ub_rows else None,
        A_eq=np.asarray(problem.eq_rows) if problem.eq_rows else None,
        b_eq=np.asarray(problem.eq_rhs) if problem.eq_rows else None,
        bounds=list(zip(problem.lower, problem.upper)),
        method="highs-ds",
        options=_HIGHS_OPTIONS,
    )
    if result.status == 2:
        raise LPInfeasibleError(f"linear program is infeasible: {result.message}")
    if result.status == 3:
        raise LPUnboundedError(f"linear program is unbounded: {result.message}")
    if result.status != 0:
        raise LPError(f"linear program failed ({result.status}): {result.message}")

    _certify(problem, result)
    x = _repair(problem, np.asarray(result.x, dtype=float))
    objective = float(c @ x)
    if _zero_feasible(problem) and objective >= -TIE_TOL * _scale(c):
        logger.debug("LP optimum is attained at zero; returning the null step")
        x = np.zeros_like(x)
        objective = 0.0
    return LPSolution(
        delta=tuple(float(v) for v in x),
        objective=objective,
        iterations=int(getattr(result, "nit", 0)),
    )


def lp_variables(
    pair: DegreePair, dl_max: int, dr_max: int
) -> Tuple[Tuple[Side, int], ...]:
    """Degrees 2..max on each side; degree 1 never receives mass."""
    top_l = max(dl_max, pair.lam.max_degree)
    top_r = max(dr_max, pair.rho.max_degree)
    lam: List[Tuple[Side, int]] = [("lambda", d) for d in range(2, top_l + 1)]
    rho: List[Tuple[Side, int]] = [("rho", d) for d in range(2, top_r + 1)]
    return tuple(lam + rho)


def build_problem(
    pair: DegreePair,
    objective: Mapping[Tuple[Side, int], float],
    delta: float,
    dl_max: int,
    dr_max: int,
    constraint: Optional[Tuple[Mapping[Tuple[Side, int], float], float]] = None,
) -> LPProblem:
    """Box −min(δ, coefficient) ≤ Δ ≤ δ, zero-sum per side, optional g·Δ ≤ b."""
    variables = lp_variables(pair, dl_max, dr_max)
    lower, upper = [], []
    for side, degree in variables:
        poly = pair.lam if side == "lambda" else pair.rho
        lower.append(-min(delta, poly.coefficient(degree)))
        upper.append(delta)
    eq_rows = tuple(
        tuple(1.0 if side == which else 0.0 for side, _ in variables)
        for which in ("lambda", "rho")
    )
    ub_rows: Sequence[Tuple[float, ...]] = ()
    ub_rhs: Sequence[float] = ()
    if constraint is not None:
        weights, bound = constraint
        ub_rows = (tuple(float(weights.get(v, 0.0)) for v in variables),)
        ub_rhs = (float(bound),)
    return LPProblem(
        variables=variables,
        objective=tuple(float(objective.get(v, 0.0)) for v in variables),
        eq_rows=eq_rows,
        eq_rhs=(0.0, 0.0),
        ub_rows=tuple(ub_rows),
        ub_rhs=tuple(ub_rhs),
        lower=tuple(lower),
        upper=tuple(upper),
    )

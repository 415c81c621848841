"""Optimizer configuration, linear programs and optimization traces."""

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.approximation import ErasureKind
from models.ensemble import DegreePair

Side = Literal["lambda", "rho"]
LPKind = Literal["lp1", "lp2"]
TraceStatus = Literal[
    "converged", "max_rounds", "target_unreachable", "start_not_evaluable"
]


class OptimizerConfig(BaseModel):
    """Everything one optimization run depends on."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(ge=1, description="Blocklength")
    epsilon: float = Field(gt=0.0, lt=1.0, description="Channel erasure probability")
    p_target: float = Field(gt=0.0, lt=1.0, description="Target erasure probability")
    kind: ErasureKind = Field(default="block", description="Block or bit probability")
    dl_max: int = Field(ge=2, description="Largest variable degree searched")
    dr_max: int = Field(ge=2, description="Largest check degree searched")
    s_min: int = Field(ge=1, description="Expurgation parameter of the floor term")
    s_max: Optional[int] = Field(
        default=None,
        description="Spectrum truncation; defaults to s_min + 6 to keep rounds fast",
    )
    delta_init: float = Field(default=1e-2, gt=0.0)
    delta_min: float = Field(default=1e-6, gt=0.0)
    max_rounds: int = Field(default=500, ge=1)
    fd_step: float = Field(default=1e-5, gt=0.0, lt=1e-2)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _delta_bounds(self) -> "OptimizerConfig":
        if not self.delta_init > self.delta_min:
            raise ValueError("delta_init must exceed delta_min")
        if self.s_max is not None and self.s_max < self.s_min:
            raise ValueError("s_max must be at least s_min")
        return self

    @property
    def spectrum_size(self) -> int:
        return self.s_max if self.s_max is not None else self.s_min + 6


class Gradients(BaseModel):
    """∂P/∂λ_i and ∂P/∂ρ_i along zero-sum-compatible directions."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(description="P at the expansion point")
    lam: Tuple[Tuple[int, float], ...]
    rho: Tuple[Tuple[int, float], ...]

    def predicted_change(self, dlambda: dict, drho: dict) -> float:
        """First-order change Σ ∂P/∂λ_i Δλ_i + Σ ∂P/∂ρ_i Δρ_i."""
        lam, rho = dict(self.lam), dict(self.rho)
        return sum(lam.get(d, 0.0) * v for d, v in dlambda.items()) + sum(
            rho.get(d, 0.0) * v for d, v in drho.items()
        )


class LPProblem(BaseModel):
    """min c·Δ subject to A_eq Δ = b_eq, A_ub Δ ≤ b_ub and box bounds."""

    model_config = ConfigDict(frozen=True)

    variables: Tuple[Tuple[Side, int], ...] = Field(
        description="(side, degree) of each variable, λ block first"
    )
    objective: Tuple[float, ...]
    eq_rows: Tuple[Tuple[float, ...], ...]
    eq_rhs: Tuple[float, ...]
    ub_rows: Tuple[Tuple[float, ...], ...] = ()
    ub_rhs: Tuple[float, ...] = ()
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    @model_validator(mode="after")
    def _consistent(self) -> "LPProblem":
        size = len(self.variables)
        if not len(self.objective) == len(self.lower) == len(self.upper) == size:
            raise ValueError("objective and bounds must match the variable count")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("every lower bound must not exceed its upper bound")
        eq_ok = len(self.eq_rows) == len(self.eq_rhs)
        if not eq_ok or len(self.ub_rows) != len(self.ub_rhs):
            raise ValueError("constraint rows and right-hand sides differ in length")
        return self


class LPSolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta: Tuple[float, ...]
    objective: float
    iterations: int = 0

    def split(self, variables: Tuple[Tuple[Side, int], ...]) -> Tuple[dict, dict]:
        """(Δλ, Δρ) as degree-keyed maps."""
        pairs = list(zip(variables, self.delta))
        dlambda = {d: v for (side, d), v in pairs if side == "lambda"}
        drho = {d: v for (side, d), v in pairs if side == "rho"}
        return dlambda, drho


class OptimizationStep(BaseModel):
    model_config = ConfigDict(frozen=True)

    round: int = Field(ge=0)
    pair: DegreePair
    rate: float
    p: float = Field(description="Re-evaluated erasure probability")
    delta: float
    lp_kind: Optional[LPKind] = None
    accepted: bool = True

    def as_record(self) -> dict:
        return {
            "round": self.round,
            "rate": self.rate,
            "p": self.p,
            "delta": self.delta,
            "lp_kind": self.lp_kind,
            "accepted": self.accepted,
            "pair": self.pair.to_json_dict(),
        }


class OptimizationTrace(BaseModel):
    model_config = ConfigDict(frozen=True)

    config: OptimizerConfig
    steps: Tuple[OptimizationStep, ...]
    status: TraceStatus
    richardson_gap: Optional[float] = Field(
        default=None,
        description="Largest relative gradient change when fd_step is halved",
    )

    @property
    def final(self) -> OptimizationStep:
        accepted = [s for s in self.steps if s.accepted]
        return accepted[-1]

    @property
    def feasible(self) -> bool:
        return self.final.p <= self.config.p_target


class MultiStartResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    best: OptimizationTrace
    final_rates: List[float]
    seeds: List[int]

    @property
    def dispersion(self) -> float:
        return max(self.final_rates) - min(self.final_rates)

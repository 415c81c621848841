"""Monte Carlo simulation types: sampled codes, decoding outcomes, estimates."""

from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    field_validator,
    model_validator,
)


class ConfidenceInterval(BaseModel):
    model_config = ConfigDict(frozen=True)

    low: float = Field(ge=0.0, le=1.0)
    high: float = Field(ge=0.0, le=1.0)
    level: float = Field(default=0.95, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _ordered(self) -> "ConfidenceInterval":
        if self.low > self.high:
            raise ValueError(f"interval bounds out of order: {self.low} > {self.high}")
        return self

    def contains(self, value: float) -> bool:
        return self.low <= value <= self.high


def _int_array(value: Any) -> np.ndarray:
    array = np.ascontiguousarray(value, dtype=np.int64)
    if array.ndim != 1:
        raise ValueError("expected a one-dimensional integer array")
    return array


def _csr(
    owners: np.ndarray, partners: np.ndarray, size: int
) -> Tuple[np.ndarray, np.ndarray]:
    order = np.argsort(owners, kind="stable")
    counts = np.bincount(owners, minlength=size)
    ptr = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, np.ascontiguousarray(partners[order])


class TannerGraph(BaseModel):
    """One code of the ensemble as an edge list; multi-edges are allowed.

    Edge k joins variable ``edge_var[k]`` and check ``edge_check[k]``. The
    compressed adjacency (``var_ptr``/``var_adj`` and ``check_ptr``/``check_adj``)
    is built once on construction and used by the decoding kernels.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(ge=1, description="Number of variable nodes")
    m: int = Field(ge=1, description="Number of check nodes")
    var_degrees: np.ndarray
    check_degrees: np.ndarray
    edge_var: np.ndarray
    edge_check: np.ndarray

    _var_ptr: np.ndarray = PrivateAttr()
    _var_adj: np.ndarray = PrivateAttr()
    _check_ptr: np.ndarray = PrivateAttr()
    _check_adj: np.ndarray = PrivateAttr()

    @field_validator(
        "var_degrees", "check_degrees", "edge_var", "edge_check", mode="before"
    )
    @classmethod
    def _as_int_arrays(cls, value: Any) -> np.ndarray:
        return _int_array(value)

    @model_validator(mode="after")
    def _degrees_match_edges(self) -> "TannerGraph":
        edges = self.edge_var.size
        if self.edge_check.size != edges:
            raise ValueError("edge_var and edge_check differ in length")
        if self.var_degrees.size != self.n or self.check_degrees.size != self.m:
            raise ValueError("degree arrays do not match the node counts")
        var_sum, check_sum = int(self.var_degrees.sum()), int(self.check_degrees.sum())
        if var_sum != edges or check_sum != edges:
            raise ValueError(
                f"degree sums {var_sum}/{check_sum} differ from {edges} edges"
            )
        if edges and (
            self.edge_var.min() < 0
            or self.edge_var.max() >= self.n
            or self.edge_check.min() < 0
            or self.edge_check.max() >= self.m
        ):
            raise ValueError("edge endpoint out of range")
        if not np.array_equal(
            np.bincount(self.edge_var, minlength=self.n), self.var_degrees
        ):
            raise ValueError("variable degrees disagree with the edge list")
        if not np.array_equal(
            np.bincount(self.edge_check, minlength=self.m), self.check_degrees
        ):
            raise ValueError("check degrees disagree with the edge list")
        return self

    def model_post_init(self, __context: Any) -> None:
        self._var_ptr, self._var_adj = _csr(self.edge_var, self.edge_check, self.n)
        self._check_ptr, self._check_adj = _csr(self.edge_check, self.edge_var, self.m)

    @property
    def edges(self) -> int:
        return int(self.edge_var.size)

    @property
    def max_var_degree(self) -> int:
        return int(self.var_degrees.max())

    @property
    def var_ptr(self) -> np.ndarray:
        return self._var_ptr

    @property
    def var_adj(self) -> np.ndarray:
        return self._var_adj

    @property
    def check_ptr(self) -> np.ndarray:
        return self._check_ptr

    @property
    def check_adj(self) -> np.ndarray:
        return self._check_adj

    def checks_of(self, v: int) -> np.ndarray:
        return self._var_adj[self._var_ptr[v] : self._var_ptr[v + 1]]

    def variables_of(self, c: int) -> np.ndarray:
        return self._check_adj[self._check_ptr[c] : self._check_ptr[c + 1]]

    def degree_histogram(self) -> Tuple[Dict[int, int], Dict[int, int]]:
        """(variable, check) node counts keyed by degree."""
        var = np.bincount(self.var_degrees)
        check = np.bincount(self.check_degrees)
        return (
            {d: int(c) for d, c in enumerate(var) if c},
            {d: int(c) for d, c in enumerate(check) if c},
        )


class TrialOutcome(BaseModel):
    """Result of peeling one erasure pattern."""

    model_config = ConfigDict(frozen=True)

    erased_initial: int = Field(ge=0)
    residual_erasures: int = Field(ge=0)
    success: bool
    trajectory: Optional[Tuple[Tuple[int, int], ...]] = Field(
        default=None,
        description="(residual erasures, degree-one checks) after each peeled variable",
    )

    @model_validator(mode="after")
    def _success_iff_empty(self) -> "TrialOutcome":
        if self.success != (self.residual_erasures == 0):
            raise ValueError("success must hold exactly when no erasures remain")
        if self.residual_erasures > self.erased_initial:
            raise ValueError("residual exceeds the initial erasures")
        return self


class SimEstimate(BaseModel):
    """Aggregated Monte Carlo estimate at one (n, ε)."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    epsilon: float = Field(ge=0.0, le=1.0)
    trials: int = Field(ge=1)
    seed: int = Field(ge=0)
    block_failures: int = Field(ge=0)
    residual_bits: int = Field(ge=0)
    p_block: float = Field(ge=0.0, le=1.0)
    p_block_ci: ConfidenceInterval
    p_bit: float = Field(ge=0.0, le=1.0)
    p_bit_ci: ConfidenceInterval
    size_histogram: Dict[int, int] = Field(
        default_factory=dict, description="Residual size -> number of failed trials"
    )
    split_size: Optional[int] = Field(
        default=None, description="ceil(n * gamma * nu*); None without a critical point"
    )
    floor_failures: Optional[int] = None
    waterfall_failures: Optional[int] = None
    expurgate_below: Optional[int] = None
    graphs_sampled: int = Field(default=0, ge=0)
    graphs_rejected: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _counts_consistent(self) -> "SimEstimate":
        if sum(self.size_histogram.values()) != self.block_failures:
            raise ValueError("size histogram does not add up to the block failures")
        if sum(s * c for s, c in self.size_histogram.items()) != self.residual_bits:
            raise ValueError("size histogram does not add up to the residual bits")
        if self.block_failures > self.trials:
            raise ValueError("more failures than trials")
        if self.split_size is not None and (
            self.floor_failures is None
            or self.waterfall_failures is None
            or self.floor_failures + self.waterfall_failures != self.block_failures
        ):
            raise ValueError("floor and waterfall failures must split the failures")
        return self

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "trials": self.trials,
            "block_failures": self.block_failures,
            "p_block": self.p_block,
            "p_block_low": self.p_block_ci.low,
            "p_block_high": self.p_block_ci.high,
            "p_bit": self.p_bit,
            "p_bit_low": self.p_bit_ci.low,
            "p_bit_high": self.p_bit_ci.high,
            "split_size": self.split_size,
            "floor_failures": self.floor_failures,
            "waterfall_failures": self.waterfall_failures,
            "graphs_sampled": self.graphs_sampled,
            "graphs_rejected": self.graphs_rejected,
        }


class ScalingFit(BaseModel):
    """Least-squares (α̂, β̂) of the waterfall model fitted to block-error estimates."""

    model_config = ConfigDict(frozen=True)

    alpha: float
    beta: float
    alpha_se: float = Field(ge=0.0)
    beta_se: float = Field(ge=0.0)
    eps_star: float
    points: int = Field(ge=1)
    blocklengths: Tuple[int, ...]


class MeanTrajectory(BaseModel):
    """Binned mean of R₁/n against residual erasures/n, with the predicted curve."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    epsilon: float = Field(ge=0.0, le=1.0)
    samples: int = Field(ge=1)
    residual: Tuple[float, ...] = Field(
        description="Bin centers, residual erasures / n"
    )
    mean_r1: Tuple[Optional[float], ...]
    std_r1: Tuple[Optional[float], ...]
    counts: Tuple[int, ...]
    predicted_r1: Tuple[float, ...]

    def rows(self) -> List[dict]:
        return [
            {
                "residual": v,
                "mean_r1": mean,
                "std_r1": std,
                "count": count,
                "predicted_r1": predicted,
            }
            for v, mean, std, count, predicted in zip(
                self.residual, self.mean_r1, self.std_r1, self.counts, self.predicted_r1
            )
        ]


class MessageVarianceEstimate(BaseModel):
    """Monte Carlo Var(erased variable-to-check messages) / edges after ℓ rounds."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    epsilon: float = Field(ge=0.0, le=1.0)
    ell: int = Field(ge=0)
    samples: int = Field(ge=2)
    mean: float = Field(description="Mean erased-message fraction")
    variance: float = Field(ge=0.0)
    std_error: float = Field(ge=0.0)

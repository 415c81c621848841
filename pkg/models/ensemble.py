"""Degree-distribution types for LDPC ensembles."""

import math
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_serializer,
    model_validator,
)

MAX_DEGREE = 100
CONSTRUCTION_TOL = 1e-12
ARITHMETIC_TOL = 1e-9

ArrayLike = Union[float, np.ndarray]


def dense_from_map(degree_map: Mapping[Any, Any]) -> Tuple[float, ...]:
    """Turn a degree-keyed map ({"2": 0.5, 3: "0.5"}) into a dense coefficient tuple."""
    entries: Dict[int, float] = {}
    for key, value in degree_map.items():
        degree = int(key)
        if degree < 1:
            raise ValueError(f"degree must be >= 1, got {key}")
        entries[degree] = entries.get(degree, 0.0) + float(value)
    top = max(entries, default=1)
    coeffs = [0.0] * (top + 1)
    for degree, value in entries.items():
        coeffs[degree] = value
    return tuple(coeffs)


@lru_cache(maxsize=8192)
def _polynomials(
    coeffs: Tuple[float, ...]
) -> Tuple[Polynomial, Polynomial, Polynomial]:
    poly = Polynomial(np.asarray(coeffs[1:], dtype=float))
    return poly, poly.deriv(1), poly.deriv(2)


class DegreePolynomial(BaseModel):
    """Edge-perspective degree distribution; ``coeffs[d]`` multiplies x^(d-1)."""

    model_config = ConfigDict(frozen=True)

    coeffs: Tuple[float, ...] = Field(
        description="Dense coefficients indexed by degree; index 0 is always 0"
    )

    @model_validator(mode="before")
    @classmethod
    def _accept_degree_map(cls, data: Any) -> Any:
        if isinstance(data, Mapping):
            if "coeffs" not in data:
                return {"coeffs": dense_from_map(data)}
            if isinstance(data["coeffs"], Mapping):
                return {"coeffs": dense_from_map(data["coeffs"])}
        return data

    @field_validator("coeffs")
    @classmethod
    def _canonical_coeffs(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if len(value) < 2:
            raise ValueError("at least one degree >= 1 is required")
        if value[0] != 0.0:
            raise ValueError("degree 0 carries no edges and must be 0")
        if not all(math.isfinite(c) for c in value):
            raise ValueError("coefficients must be finite")
        trimmed = list(value)
        while len(trimmed) > 2 and trimmed[-1] == 0.0:
            trimmed.pop()
        if len(trimmed) - 1 > MAX_DEGREE:
            raise ValueError(f"max degree {len(trimmed) - 1} exceeds {MAX_DEGREE}")
        return tuple(float(c) for c in trimmed)

    @model_serializer(mode="plain")
    def _serialize(self) -> Dict[str, float]:
        return {str(d): c for d, c in self.items()}

    @classmethod
    def from_map(
        cls, degree_map: Mapping[Any, Any], normalize: bool = False
    ) -> "DegreePolynomial":
        """Build from degree maps, optionally rescaled so each side sums to 1."""
        coeffs = dense_from_map(degree_map)
        if normalize:
            total = math.fsum(coeffs)
            coeffs = tuple(c / total for c in coeffs)
        return cls(coeffs=coeffs)

    @property
    def max_degree(self) -> int:
        return len(self.coeffs) - 1

    def items(self) -> List[Tuple[int, float]]:
        """Non-zero (degree, coefficient) pairs in increasing degree."""
        return [(d, c) for d, c in enumerate(self.coeffs) if d >= 1 and c != 0.0]

    def coefficient(self, degree: int) -> float:
        if 0 <= degree < len(self.coeffs):
            return self.coeffs[degree]
        return 0.0

    def total(self) -> float:
        return math.fsum(self.coeffs)

    def inverse_degree_sum(self) -> float:
        """Σ_d coeffs[d] / d, i.e. the integral of the polynomial over [0, 1]."""
        return math.fsum(c / d for d, c in self.items())

    def normalized(self) -> "DegreePolynomial":
        total = self.total()
        return DegreePolynomial(coeffs=tuple(c / total for c in self.coeffs))

    def diagnostics(self, tol: float = CONSTRUCTION_TOL) -> List[str]:
        """Violations of non-negativity and normalization; empty when valid."""
        problems = []
        negative = [d for d, c in enumerate(self.coeffs) if c < 0.0]
        if negative:
            problems.append(f"negative coefficients at degrees {negative}")
        total = self.total()
        if abs(total - 1.0) > tol:
            problems.append(f"coefficients sum to {total!r}, expected 1")
        return problems

    def eval(self, x: ArrayLike) -> ArrayLike:
        return _polynomials(self.coeffs)[0](x)

    def deriv(self, x: ArrayLike) -> ArrayLike:
        return _polynomials(self.coeffs)[1](x)

    def deriv2(self, x: ArrayLike) -> ArrayLike:
        return _polynomials(self.coeffs)[2](x)

    def node_generating(self, y: ArrayLike) -> ArrayLike:
        """Node-perspective generating function ∫_0^y p / ∫_0^1 p, e.g. L(y) for λ."""
        integral = _polynomials(self.coeffs)[0].integ()
        return integral(y) / integral(1.0)


class DegreePair(BaseModel):
    """Variable (lambda) and check (rho) edge-perspective distributions."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: DegreePolynomial = Field(alias="lambda", description="Variable side")
    rho: DegreePolynomial = Field(description="Check side")

    @model_validator(mode="after")
    def _components_valid(self) -> "DegreePair":
        problems = [f"lambda: {p}" for p in self.lam.diagnostics()]
        problems += [f"rho: {p}" for p in self.rho.diagnostics()]
        if problems:
            raise ValueError("; ".join(problems))
        return self

    @classmethod
    def from_maps(
        cls,
        lam: Mapping[Any, Any],
        rho: Mapping[Any, Any],
        normalize: bool = False,
    ) -> "DegreePair":
        return cls(
            lam=DegreePolynomial.from_map(lam, normalize),
            rho=DegreePolynomial.from_map(rho, normalize),
        )

    @classmethod
    def unchecked(
        cls, lam_coeffs: Tuple[float, ...], rho_coeffs: Tuple[float, ...]
    ) -> "DegreePair":
        """Build without validation; used for off-simplex finite differences."""
        return cls.model_construct(
            lam=DegreePolynomial.model_construct(coeffs=tuple(lam_coeffs)),
            rho=DegreePolynomial.model_construct(coeffs=tuple(rho_coeffs)),
        )

    def to_json_dict(self) -> Dict[str, Dict[str, float]]:
        return self.model_dump(by_alias=True)


class NodePerspective(BaseModel):
    """Node-perspective fractions Λ_i, Γ_i and the average degrees."""

    model_config = ConfigDict(frozen=True)

    var_fractions: Tuple[float, ...] = Field(
        description="Λ_i, fraction of variable nodes of degree i (index = degree)"
    )
    check_fractions: Tuple[float, ...] = Field(
        description="Γ_i, fraction of check nodes of degree i (index = degree)"
    )
    avg_var_degree: float = Field(gt=0, description="Λ'(1), edges per variable node")
    avg_check_degree: float = Field(gt=0, description="Γ'(1), edges per check node")

    @field_validator("var_fractions", "check_fractions")
    @classmethod
    def _fractions_valid(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(f < 0.0 for f in value):
            raise ValueError("node fractions must be non-negative")
        if abs(math.fsum(value) - 1.0) > ARITHMETIC_TOL:
            raise ValueError("node fractions must sum to 1")
        return value

    def variable_generating(self, y: ArrayLike) -> ArrayLike:
        """L(y) = Σ_i Λ_i y^i."""
        return Polynomial(np.asarray(self.var_fractions, dtype=float))(y)

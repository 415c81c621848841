"""Stopping-set spectrum types."""

from typing import Any, List, Tuple

import mpmath
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator


class TruncatedSeries(BaseModel):
    """Power series truncated after x^s_max, held as big floats."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coeffs: Tuple[Any, ...] = Field(description="mpmath reals, index = power of x")

    @field_validator("coeffs")
    @classmethod
    def _finite(cls, value: Tuple[Any, ...]) -> Tuple[Any, ...]:
        if not value:
            raise ValueError("a truncated series needs at least the constant term")
        converted = tuple(
            c if isinstance(c, mpmath.mpf) else mpmath.mpf(c) for c in value
        )
        if not all(mpmath.isfinite(c) for c in converted):
            raise ValueError("series coefficients must be finite")
        return converted

    @field_serializer("coeffs")
    def _as_floats(self, value: Tuple[Any, ...]) -> List[float]:
        return [float(c) for c in value]

    @property
    def s_max(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, s: int) -> Any:
        return self.coeffs[s]

    def floats(self) -> List[float]:
        return [float(c) for c in self.coeffs]


class StoppingSetSpectrum(BaseModel):
    """Expected stopping-set counts A_s and the minimal spectrum Ã_s."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1, description="Blocklength")
    A: TruncatedSeries
    A_tilde: TruncatedSeries
    s_max: int = Field(ge=1)
    e_max: int = Field(ge=1, description="s_max times the largest variable degree")

    def rows(self) -> List[Tuple[int, float, float]]:
        """(s, A_s, Ã_s) for s = 1..s_max."""
        return [
            (s, float(self.A[s]), float(self.A_tilde[s]))
            for s in range(1, self.s_max + 1)
        ]

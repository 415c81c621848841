from typing import Dict

from pydantic import BaseModel, ConfigDict, Field


class VarianceComputation(BaseModel):
    """Normalized variance of the erased variable-to-check messages after ℓ rounds."""

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(ge=0.0, le=1.0)
    ell: int = Field(ge=0)
    terms: Dict[str, float] = Field(
        default_factory=dict,
        description="Tree contributions t1..t4 and the size/degree corrections",
    )
    value: float
    big_float: bool = Field(default=False, description="Evaluated with mpmath")

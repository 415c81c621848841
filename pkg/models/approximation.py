from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

ErasureKind = Literal["block", "bit"]

_UNIT = {"ge": 0.0, "le": 1.0}


class ApproximationPoint(BaseModel):
    """Waterfall and error-floor components of the erasure probability at one ε."""

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(**_UNIT)
    pb_block: float = Field(**_UNIT, description="P_B, clipped to [0, 1]")
    pb_bit: float = Field(**_UNIT, description="P_b, clipped to [0, 1]")
    waterfall_block: float = Field(**_UNIT)
    waterfall_bit: float = Field(**_UNIT)
    floor_block: float = Field(**_UNIT)
    floor_bit: float = Field(**_UNIT)

    @model_validator(mode="after")
    def _totals_are_clipped_sums(self) -> "ApproximationPoint":
        for total, parts in (
            (self.pb_block, self.waterfall_block + self.floor_block),
            (self.pb_bit, self.waterfall_bit + self.floor_bit),
        ):
            if abs(total - min(parts, 1.0)) > 1e-12:
                raise ValueError(f"total {total} is not the clipped sum {parts}")
        return self

    def value(self, kind: ErasureKind) -> float:
        return self.pb_block if kind == "block" else self.pb_bit

    def as_row(self) -> dict:
        return self.model_dump()

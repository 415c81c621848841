"""Per-subcommand options, read from a config block and overridden by flags."""

from typing import Any, Dict, List, Literal, Mapping, Optional, Type, TypeVar

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from shared.errors import ConfigError

_UNIT = {"ge": 0.0, "le": 1.0}


class _Options(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class _Grid(_Options):
    eps_min: float = Field(default=0.0, **_UNIT)
    eps_max: float = Field(default=1.0, **_UNIT)
    points: int = Field(default=101, ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> "_Grid":
        if self.eps_min >= self.eps_max:
            raise ValueError("eps_min must be smaller than eps_max")
        return self

    def grid(self) -> List[float]:
        step = (self.eps_max - self.eps_min) / (self.points - 1)
        return [self.eps_min + i * step for i in range(self.points)]


class ThresholdOptions(_Options):
    tol: Optional[float] = Field(default=None, gt=0.0)


class R1CurveOptions(_Options):
    epsilon: float = Field(**_UNIT)
    points: int = Field(default=201, ge=2)


class ScalingOptions(_Options):
    pass


class FloorOptions(_Options):
    n: int = Field(ge=1)
    s_min: int = Field(default=6, ge=1)
    s_max: Optional[int] = Field(default=None, ge=1)


class CurveOptions(_Grid):
    n: int = Field(ge=1)
    s_min: int = Field(default=1, ge=1)
    s_max: Optional[int] = Field(default=None, ge=1)


class OptimizeOptions(_Options):
    starts: int = Field(default=1, ge=1, description="Random restarts; 1 = single run")
    workers: int = Field(default=1, ge=1)
    check_gradients: bool = True


class SimulateOptions(_Options):
    n: int = Field(ge=1)
    epsilons: List[float] = Field(min_length=1)
    trials: int = Field(ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    expurgate_below: Optional[int] = Field(default=None, ge=2)
    trials_per_graph: int = Field(default=1, ge=1)
    workers: int = Field(default=1, ge=1)
    gamma_split: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    trajectories: int = Field(
        default=0, ge=0, description="Trajectory samples per epsilon; 0 = none"
    )
    bins: int = Field(default=50, ge=2)

    @model_validator(mode="after")
    def _epsilons_in_range(self) -> "SimulateOptions":
        if any(not 0.0 <= e <= 1.0 for e in self.epsilons):
            raise ValueError("every epsilon must lie in [0, 1]")
        return self


class VarianceOptions(_Grid):
    ells: List[int] = Field(default_factory=lambda: list(range(10)), min_length=1)
    limit: bool = Field(default=False, description="Also emit the ell -> inf curve")


class ReproduceOptions(_Options):
    case: Literal["optim-example"] = "optim-example"
    with_optimization: bool = False


OptionsT = TypeVar("OptionsT", bound=BaseModel)


def resolve_options(
    model: Type[OptionsT],
    block: Optional[Mapping[str, Any]],
    overrides: Dict[str, Any],
    key: str,
) -> OptionsT:
    """
    Validate a config block with explicit flag values layered on top.

    Args:
        model: Options model of the subcommand
        block: The subcommand's block from the config file, if any
        overrides: Flag values; None means "not given"
        key: Config key of the block, used in error pointers

    Returns:
        Validated options
    """
    if block is not None and not isinstance(block, Mapping):
        raise ConfigError("expected a JSON object", (key,))
    merged = dict(block or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return model.model_validate(merged)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(first["msg"], (key, *first["loc"])) from e

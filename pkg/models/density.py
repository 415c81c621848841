"""Density-evolution result types."""

from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from shared.errors import ScalingError


class DETrajectory(BaseModel):
    """Erased-message fractions x_i (variable-to-check) and y_i (check-to-variable)."""

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(ge=0.0, le=1.0)
    xs: Tuple[float, ...] = Field(description="x_i = eps * lambda(y_i)")
    ys: Tuple[float, ...] = Field(description="y_0 = 1, y_(i+1) = 1 - rho(1 - x_i)")
    iterations: int = Field(ge=0)

    @property
    def final_x(self) -> float:
        return self.xs[-1]


class CriticalPoint(BaseModel):
    """Interior point where f(y) = y - 1 + rho(1 - eps* lambda(y)) and f' vanish."""

    model_config = ConfigDict(frozen=True)

    y_star: float = Field(gt=0.0, le=1.0)
    x_star: float
    x_bar_star: float
    nu_star: float = Field(description="eps* L(y*), fraction of bits left at failure")
    f_value: float = Field(default=0.0, description="f(y*) at the refined point")
    f_slope: float = Field(default=0.0, description="f'(y*) at the refined point")


class DensityEvolutionSummary(BaseModel):
    """Threshold and critical points of an ensemble."""

    model_config = ConfigDict(frozen=True)

    eps_star: float = Field(ge=0.0, le=1.0)
    critical_points: Tuple[CriticalPoint, ...] = ()
    single_critical: bool = False
    stability_eps: Optional[float] = Field(
        default=None,
        description="1 / (lambda'(0) rho'(1)); None when lambda_2 = 0",
    )
    degenerate: bool = Field(
        default=False,
        description="No interior minimum of f at eps*; critical points not refined",
    )

    @property
    def critical(self) -> CriticalPoint:
        """The unique critical point; raises when there is not exactly one."""
        if not self.single_critical or len(self.critical_points) != 1:
            raise ScalingError(
                f"expected a single critical point, found {len(self.critical_points)}"
            )
        return self.critical_points[0]

    def as_report(self) -> dict:
        point: Optional[CriticalPoint] = (
            self.critical_points[0] if self.critical_points else None
        )
        return {
            "eps_star": self.eps_star,
            "y_star": point.y_star if point else None,
            "x_star": point.x_star if point else None,
            "nu_star": point.nu_star if point else None,
            "single_critical": self.single_critical,
            "degenerate": self.degenerate,
            "stability_eps": self.stability_eps,
            "critical_points": [p.model_dump() for p in self.critical_points],
        }

from pydantic import BaseModel, ConfigDict, Field


class ScalingParams(BaseModel):
    """Waterfall scaling parameters of one critical point."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=0, description="Width of the waterfall")
    beta: float = Field(description="Finite-length threshold shift (times omega)")
    omega: float = Field(default=1.0, gt=0)
    gamma_const: float = Field(gt=0, description="Variance divergence constant")
    eps_star: float
    y_star: float
    x_star: float
    nu_star: float

    def as_report(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma_const,
            "eps_star": self.eps_star,
            "y_star": self.y_star,
            "x_star": self.x_star,
            "nu_star": self.nu_star,
        }

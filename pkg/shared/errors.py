"""Exception hierarchy shared by the analysis, optimization and simulation layers."""

from typing import Optional, Sequence, Union


class LdpcError(Exception):
    """Base class for domain errors; the CLI maps these to exit code 1."""


class EnsembleError(LdpcError):
    """Invalid degree distribution, perturbation, or unsupported degree structure."""


class ThresholdError(LdpcError):
    """Density evolution has no nontrivial fixed point where one was required."""


class ScalingError(LdpcError):
    """A scaling closed form cannot be evaluated for the given ensemble."""


class SpectrumError(LdpcError):
    """Numerical failure while building a stopping-set spectrum."""


class LPError(LdpcError):
    """Base class for linear programming failures."""


class LPInfeasibleError(LPError):
    """The linear program has no feasible point."""


class LPUnboundedError(LPError):
    """The linear program objective is unbounded."""


class OptimizationError(LdpcError):
    """The degree-distribution optimizer could not proceed."""


class SimulationError(LdpcError):
    """Graph sampling, expurgation or trial execution failed."""


class ConfigError(Exception):
    """Malformed configuration; the CLI maps this to exit code 2."""

    def __init__(
        self, message: str, key_path: Optional[Sequence[Union[str, int]]] = None
    ):
        self.key_path = tuple(key_path or ())
        if self.key_path:
            pointer = ".".join(str(part) for part in self.key_path)
            message = f"{message} (at '{pointer}')"
        super().__init__(message)

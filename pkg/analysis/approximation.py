"""Finite-length erasure probability: waterfall plus error floor.

P_B ≈ Σ_critical Q(√n (ε* − β n^(−2/3) − ε) / α) + 1 − exp(−Σ_{s≥s_min} Ã_s ε^s)

The bit version scales each waterfall term by ν* and uses the bit floor.
"""

import logging
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy.special import erfc

from analysis.density_evolution import threshold
from analysis.scaling import scaling_per_critical_point
from analysis.stopping_sets import floor_bit, floor_block, spectrum
from models.approximation import ApproximationPoint, ErasureKind
from models.density import DensityEvolutionSummary
from models.ensemble import DegreePair
from models.scaling import ScalingParams
from models.spectrum import StoppingSetSpectrum
from shared.config import Settings, get_settings

logger = logging.getLogger(__name__)


def q_function(z):
    """Upper standard Gaussian tail Q(z) = erfc(z/√2)/2; vectorised."""
    return 0.5 * erfc(np.asarray(z, dtype=float) / math.sqrt(2.0))


def waterfall(
    n: int, scaling: ScalingParams, epsilon: float, kind: ErasureKind = "block"
) -> float:
    """Q(√n (ε* − β n^(−2/3) − ε) / α), times ν* for the bit probability."""
    shifted = scaling.eps_star - scaling.beta * n ** (-2.0 / 3.0)
    value = float(q_function(math.sqrt(n) * (shifted - epsilon) / scaling.alpha))
    return value * scaling.nu_star if kind == "bit" else value


def _clip(value: float, label: str, epsilon: float) -> float:
    if value > 1.0:
        logger.info(f"{label} = {value:.6g} clipped to 1 at eps = {epsilon:.6g}")
        return 1.0
    if value < 0.0:
        logger.info(f"{label} = {value:.6g} clipped to 0 at eps = {epsilon:.6g}")
        return 0.0
    return value


class ErasureApproximation:
    """Evaluates the approximation for one (n, pair, s_min) at many ε.

    Density evolution, scaling parameters and the stopping-set spectrum are
    computed once on construction.
    """

    def __init__(
        self,
        n: int,
        pair: DegreePair,
        s_min: int,
        settings: Optional[Settings] = None,
        s_max: Optional[int] = None,
        de: Optional[DensityEvolutionSummary] = None,
    ):
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self.settings = settings or get_settings()
        self.n = n
        self.pair = pair
        self.s_min = s_min
        self.de = de or threshold(pair, settings=self.settings)
        self.scalings: List[ScalingParams] = scaling_per_critical_point(
            pair, self.de, self.settings
        )
        s_max = s_max if s_max is not None else self.settings.s_max
        self.spectrum: Optional[StoppingSetSpectrum] = None
        if s_min <= s_max:
            self.spectrum = spectrum(n, pair, s_max, self.settings)
        else:
            self.logger.debug(
                f"[ErasureApproximation] floor disabled, s_min {s_min} > s_max {s_max}"
            )
        if len(self.scalings) > 1:
            self.logger.info(
                f"[ErasureApproximation] summing {len(self.scalings)} waterfall terms"
            )

    def components(self, epsilon: float) -> Tuple[float, float, float, float]:
        """Unclipped (waterfall_block, waterfall_bit, floor_block, floor_bit)."""
        wf_block = math.fsum(waterfall(self.n, s, epsilon) for s in self.scalings)
        wf_bit = math.fsum(waterfall(self.n, s, epsilon, "bit") for s in self.scalings)
        if self.spectrum is None or epsilon == 0.0:
            return wf_block, wf_bit, 0.0, 0.0
        return (
            wf_block,
            wf_bit,
            floor_block(self.spectrum, self.s_min, epsilon),
            floor_bit(self.spectrum, self.s_min, epsilon),
        )

    def point(self, epsilon: float) -> ApproximationPoint:
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
        wf_block, wf_bit, fl_block, fl_bit = (
            _clip(v, label, epsilon)
            for v, label in zip(
                self.components(epsilon),
                ("waterfall_block", "waterfall_bit", "floor_block", "floor_bit"),
            )
        )
        return ApproximationPoint(
            epsilon=epsilon,
            pb_block=_clip(wf_block + fl_block, "pb_block", epsilon),
            pb_bit=_clip(wf_bit + fl_bit, "pb_bit", epsilon),
            waterfall_block=wf_block,
            waterfall_bit=wf_bit,
            floor_block=fl_block,
            floor_bit=fl_bit,
        )

    def probability(self, epsilon: float, kind: ErasureKind = "block") -> float:
        return self.point(epsilon).value(kind)

    def curve(self, eps_grid: Iterable[float]) -> List[ApproximationPoint]:
        return [self.point(float(eps)) for eps in eps_grid]


def total(
    n: int,
    pair: DegreePair,
    s_min: int,
    epsilon: float,
    settings: Optional[Settings] = None,
) -> ApproximationPoint:
    """Waterfall and floor components and their clipped sum at one ε."""
    return ErasureApproximation(n, pair, s_min, settings).point(epsilon)


def curve(
    n: int,
    pair: DegreePair,
    s_min: int,
    eps_grid: Iterable[float],
    settings: Optional[Settings] = None,
) -> List[ApproximationPoint]:
    """:func:`total` over a grid of channel parameters."""
    return ErasureApproximation(n, pair, s_min, settings).curve(eps_grid)

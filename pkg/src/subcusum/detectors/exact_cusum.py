from __future__ import annotations
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from subcusum.detectors.detector import Detector, DetectorKind, StatisticUpdate
from subcusum.model.spiked_model import SpikedModel
from subcusum.utils.types import DomainError


@dataclass(frozen=True)
class CusumState:
    """State of the CUSUM recursion S_t = (S_{t-1})^+ + increment."""

    s: float = 0.0
    threshold_b: float = math.inf
    t: int = 0


def cusum_step(state: CusumState, increment: float) -> CusumState:
    """One CUSUM update. The clamp at zero applies to the previous statistic only."""
    if not math.isfinite(increment):
        raise ValueError(f"CUSUM increment must be finite, got {increment!r}")
    return CusumState(max(state.s, 0.0) + increment, state.threshold_b, state.t + 1)


def _require_spike(model: SpikedModel) -> None:
    if not model.is_spiked:
        raise DomainError("The exact CUSUM needs a post-change model with rho > 0")


def exact_cusum_drift(model: SpikedModel) -> float:
    """The constant sigma2 (1 + 1/rho) log(1 + rho) subtracted from (u^T x)^2."""
    _require_spike(model)
    rho = model.rho
    return model.sigma2 * (1 + 1 / rho) * math.log1p(rho)


def exact_cusum_increment(x: np.ndarray, model: SpikedModel) -> float:
    """Scaled log-likelihood ratio (u^T x)^2 - sigma2 (1 + 1/rho) log(1 + rho)."""
    drift = exact_cusum_drift(model)
    return float(np.dot(model.u, x)) ** 2 - drift


def exact_cusum_loglr(x: np.ndarray, model: SpikedModel) -> float:
    """Log-likelihood ratio log f0(x) / f_inf(x) of the post- against the pre-change law."""
    scale = model.rho / (2 * model.sigma2 * (1 + model.rho))
    return scale * exact_cusum_increment(x, model)


class ExactCusum(Detector):
    r"""CUSUM with full knowledge of the post-change model.

    The statistic accumulates the log-likelihood ratio `exact_cusum_loglr`, so a threshold
    b gives a false alarm period of order exp(b) and b = log(gamma) targets ARL gamma.

    Parameters:
        model: The post-change spiked model (known u, sigma2, theta).
        threshold_b: Stopping threshold.
    """

    kind = DetectorKind.EXACT_CUSUM

    def __init__(self, model: SpikedModel, threshold_b: float = math.inf) -> None:
        _require_spike(model)
        super().__init__(threshold_b)
        self.model = model
        self._drift = exact_cusum_drift(model)
        self._scale = model.rho / (2 * model.sigma2 * (1 + model.rho))
        self.state = CusumState(threshold_b=threshold_b)

    @property
    def k(self) -> int:
        return self.model.k

    @property
    def lookahead(self) -> int:
        return 0

    @property
    def samples_seen(self) -> int:
        return self.state.t

    def _reset_state(self) -> None:
        self.state = CusumState(threshold_b=self.threshold_b)

    def _step(self, x: np.ndarray) -> Optional[StatisticUpdate]:
        increment = self._scale * (float(np.dot(self.model.u, x)) ** 2 - self._drift)
        self.state = cusum_step(self.state, increment)
        return StatisticUpdate(self.state.t, self.state.s, increment)

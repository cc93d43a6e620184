from __future__ import annotations
import math
from typing import Optional

import numpy as np

from subcusum.detectors.detector import Detector, DetectorKind, StatisticUpdate
from subcusum.eigen.sliding_window import SlidingWindowCov


def largest_eig_statistic(window: SlidingWindowCov) -> float:
    """Largest eigenvalue of the window scatter divided by w."""
    window.require_full()
    return float(np.linalg.eigvalsh(window.scatter)[-1]) / window.w


class LargestEig(Detector):
    r"""Largest-eigenvalue baseline.

    The statistic of sample t is lambda_max(sum_{i=t+1}^{t+w} x_i x_i^T) / w and the
    detector stops as soon as it reaches the threshold. Like Subspace-CUSUM it reports
    sample t once samples t+1..t+w are in, so no stop is possible during the first w samples.

    Parameters:
        k: Dimension of the observations.
        w: Window length.
        threshold_b: Stopping threshold.
    """

    kind = DetectorKind.LARGEST_EIG

    def __init__(self, k: int, w: int, threshold_b: float = math.inf) -> None:
        super().__init__(threshold_b)
        self.window = SlidingWindowCov(k, w)
        self._seen = 0

    @property
    def k(self) -> int:
        return self.window.k

    @property
    def w(self) -> int:
        return self.window.w

    @property
    def lookahead(self) -> int:
        return self.window.w

    @property
    def samples_seen(self) -> int:
        return self._seen

    def _reset_state(self) -> None:
        self.window.reset()
        self._seen = 0

    def _step(self, x: np.ndarray) -> Optional[StatisticUpdate]:
        self.window.push(x)
        self._seen += 1
        t = self._seen - self.window.w
        if t < 1:
            return None
        value = largest_eig_statistic(self.window)
        return StatisticUpdate(t, value, value)

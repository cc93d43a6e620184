from __future__ import annotations
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Optional, Tuple

import numpy as np

from subcusum.detectors.detector import Detector, DetectorKind, StatisticUpdate
from subcusum.eigen.sliding_window import SlidingWindowCov
from subcusum.eigen.top_eigen import DEFAULT_MAX_ITER, DEFAULT_TOL, top_eigenvector


@dataclass
class SubspaceCusumState:
    r"""Mutable state of the Subspace-CUSUM recursion.

    The statistic of sample x_t is updated with u_hat_t, the leading eigenvector of the
    scatter of samples t+1..t+w, so updates lag the input by exactly w samples. `pending`
    holds the samples still waiting for their future window.

    Attributes:
        s: Current statistic.
        drift_d: Drift subtracted from every (u_hat^T x)^2.
        threshold_b: Stopping threshold.
        window: Sliding window over the w most recent samples.
        t: Index of the last sample whose update is complete.
        pending: Samples received but not yet updated (at most w).
        u_hat: Last eigenvector estimate, the warm start of the next power iteration.
        max_iter: Power iteration budget.
        eigen_method: "power" or "eigh".
    """

    drift_d: float
    window: SlidingWindowCov
    threshold_b: float = math.inf
    s: float = 0.0
    t: int = 0
    pending: Deque[np.ndarray] = field(default_factory=deque)
    u_hat: Optional[np.ndarray] = None
    max_iter: int = DEFAULT_MAX_ITER
    eigen_method: str = "power"

    @property
    def samples_seen(self) -> int:
        return self.t + len(self.pending)


def subspace_cusum_step(
    state: SubspaceCusumState, x_new: np.ndarray, tol: float = DEFAULT_TOL
) -> Tuple[SubspaceCusumState, Optional[StatisticUpdate]]:
    r"""Feeds x_new into the Subspace-CUSUM state (in place).

    Once the oldest pending sample x_t has its w future samples in the window, computes
    u_hat_t from them and applies S_t = (S_{t-1})^+ + (u_hat_t^T x_t)^2 - d. Returns the
    state and the completed update, or None during warm-up.
    """
    x_new = np.asarray(x_new, dtype=float)
    if x_new.shape != (state.window.k,):
        raise ValueError(
            f"Expected an observation of shape ({state.window.k},), got {x_new.shape}"
        )
    state.pending.append(x_new)
    state.window.push(x_new)
    if len(state.pending) <= state.window.w:
        return state, None

    x_t = state.pending.popleft()
    estimate = top_eigenvector(
        state.window,
        tol=tol,
        max_iter=state.max_iter,
        start=state.u_hat,
        method=state.eigen_method,
    )
    state.u_hat = estimate.u_hat
    increment = float(np.dot(estimate.u_hat, x_t)) ** 2 - state.drift_d
    state.s = max(state.s, 0.0) + increment
    state.t += 1
    return state, StatisticUpdate(state.t, state.s, increment)


class SubspaceCusum(Detector):
    r"""Subspace-CUSUM: CUSUM on (u_hat_t^T x_t)^2 - d with u_hat_t estimated from the future.

    Parameters:
        k: Dimension of the observations.
        w: Window length of the eigenvector estimate.
        drift_d: Drift d, see `subcusum.tuning.optimal_drift`.
        threshold_b: Stopping threshold.
        tol: Power iteration tolerance.
        max_iter: Power iteration budget.
        eigen_method: "power" (warm-started power iteration) or "eigh" (dense solver).
    """

    kind = DetectorKind.SUBSPACE_CUSUM

    def __init__(
        self,
        k: int,
        w: int,
        drift_d: float,
        threshold_b: float = math.inf,
        tol: float = DEFAULT_TOL,
        max_iter: int = DEFAULT_MAX_ITER,
        eigen_method: str = "power",
    ) -> None:
        super().__init__(threshold_b)
        self.tol = tol
        self.state = SubspaceCusumState(
            drift_d=drift_d,
            window=SlidingWindowCov(k, w),
            threshold_b=threshold_b,
            max_iter=max_iter,
            eigen_method=eigen_method,
        )

    @property
    def k(self) -> int:
        return self.state.window.k

    @property
    def w(self) -> int:
        return self.state.window.w

    @property
    def drift_d(self) -> float:
        return self.state.drift_d

    @property
    def lookahead(self) -> int:
        return self.state.window.w

    @property
    def samples_seen(self) -> int:
        return self.state.samples_seen

    def _reset_state(self) -> None:
        self.state.window.reset()
        self.state.pending.clear()
        self.state.s = 0.0
        self.state.t = 0
        self.state.u_hat = None
        self.state.threshold_b = self.threshold_b

    def _step(self, x: np.ndarray) -> Optional[StatisticUpdate]:
        self.state, update = subspace_cusum_step(self.state, x, self.tol)
        return update

from __future__ import annotations
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional

import numpy as np


class DetectorKind(str, Enum):
    EXACT_CUSUM = "exact_cusum"
    SUBSPACE_CUSUM = "subspace_cusum"
    LARGEST_EIG = "largest_eig"


@dataclass(frozen=True)
class StatisticUpdate:
    """A completed statistic update.

    Attributes:
        t: Index of the sample the update belongs to (1-based).
        statistic: Value of the detection statistic after the update.
        increment: The increment added (the raw statistic for non-recursive detectors).
    """

    t: int
    statistic: float
    increment: float


@dataclass(frozen=True)
class TracePoint:
    t: int
    statistic: float
    stopped: bool


@dataclass(frozen=True)
class StoppingReport:
    """Outcome of running a detector over a stream.

    Attributes:
        stopped: Whether the statistic reached the threshold.
        raw_index: Index t of the last statistic update (the crossing index when stopped).
        effective_time: Samples consumed, raw_index + w for windowed detectors.
        statistic_at_stop: Statistic at raw_index (nan when no update was made).
    """

    stopped: bool
    raw_index: int
    effective_time: int
    statistic_at_stop: float

    def to_dict(self) -> dict:
        return {
            "stopped": self.stopped,
            "raw_index": self.raw_index,
            "effective_time": self.effective_time,
            "statistic_at_stop": self.statistic_at_stop,
        }


class Detector(ABC):
    r"""A generic online change detector.

    Observations are fed one at a time through `update`. Windowed detectors lag
    `lookahead` samples behind the input: the statistic for sample t is only known once
    samples t+1..t+lookahead have arrived.

    Attributes:
        threshold_b: The detector stops once its statistic is >= threshold_b.
    """

    kind: DetectorKind

    def __init__(self, threshold_b: float = math.inf) -> None:
        self.threshold_b = threshold_b
        self._last: Optional[StatisticUpdate] = None

    @property
    @abstractmethod
    def k(self) -> int:
        """Dimension of the observations."""

    @property
    @abstractmethod
    def lookahead(self) -> int:
        """Number of future samples the statistic of sample t depends on."""

    @property
    @abstractmethod
    def samples_seen(self) -> int:
        """Observations consumed since the last reset."""

    @abstractmethod
    def _step(self, x: np.ndarray) -> Optional[StatisticUpdate]:
        """Consumes x and returns the update it completes, if any."""

    @abstractmethod
    def _reset_state(self) -> None:
        """Restores the initial state (statistic 0, nothing consumed)."""

    def reset(self) -> None:
        self._last = None
        self._reset_state()

    def update(self, x: np.ndarray) -> Optional[StatisticUpdate]:
        """Feeds one observation; returns the statistic update it completes, if any."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.k,):
            raise ValueError(f"Expected an observation of shape ({self.k},), got {x.shape}")
        update = self._step(x)
        if update is not None:
            self._last = update
        return update

    @property
    def last_update(self) -> Optional[StatisticUpdate]:
        return self._last

    @property
    def statistic(self) -> float:
        return 0.0 if self._last is None else self._last.statistic

    @property
    def stopped(self) -> bool:
        return self._last is not None and self._last.statistic >= self.threshold_b

    def report(self) -> StoppingReport:
        raw_index = 0 if self._last is None else self._last.t
        return StoppingReport(
            stopped=self.stopped,
            raw_index=raw_index,
            effective_time=self.samples_seen,
            statistic_at_stop=math.nan if self._last is None else self._last.statistic,
        )

    def __repr__(self) -> str:
        return f"{type(self).__name__}(k={self.k}, threshold_b={self.threshold_b})"


def run_detector(
    detector: Detector,
    stream: Iterable[np.ndarray],
    b: float,
    horizon: int,
    trace: Optional[List[TracePoint]] = None,
) -> StoppingReport:
    """Runs `detector` over at most `horizon` samples of `stream` with threshold b.

    The detector is reset first. Running out of samples is not an error: the report
    then has stopped=False. When `trace` is given, one TracePoint is appended per
    statistic update.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    detector.threshold_b = b
    detector.reset()

    for n, x in enumerate(stream, start=1):
        update = detector.update(x)
        if update is not None:
            crossed = update.statistic >= b
            if trace is not None:
                trace.append(TracePoint(update.t, update.statistic, crossed))
            if crossed:
                break
        if n >= horizon:
            break
    return detector.report()

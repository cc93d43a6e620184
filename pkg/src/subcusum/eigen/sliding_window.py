from __future__ import annotations
from typing import Sequence

import numpy as np

from subcusum.utils.types import WindowNotFullError

RECOMPUTE_EVERY = 4096


class SlidingWindowCov:
    r"""Ring buffer of the w most recent observations and their scatter matrix.

    The scatter is the unnormalized sum of outer products over the buffer. Each push
    subtracts the evicted outer product and adds the new one in O(k^2); every
    `RECOMPUTE_EVERY` pushes the scatter is rebuilt from the buffer to shed rounding drift.

    Parameters:
        k: Dimension of the observations.
        w: Window length.
    """

    def __init__(self, k: int, w: int) -> None:
        if k < 1:
            raise ValueError(f"Dimension k must be positive, got {k}")
        if w < 1:
            raise ValueError(f"Window length w must be positive, got {w}")
        self.k = int(k)
        self.w = int(w)
        self._buffer = np.zeros((self.w, self.k))
        self._head = 0  # slot the next push writes to
        self._count = 0
        self._pushes = 0
        self.scatter = np.zeros((self.k, self.k))

    @property
    def count(self) -> int:
        """Number of observations currently held (at most w)."""
        return self._count

    @property
    def is_full(self) -> bool:
        return self._count == self.w

    def push(self, x: Sequence[float]) -> SlidingWindowCov:
        """Adds x, evicting the oldest observation once the buffer holds w of them."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.k,):
            raise ValueError(f"Expected an observation of shape ({self.k},), got {x.shape}")

        if self.is_full:
            old = self._buffer[self._head]
            self.scatter -= np.outer(old, old)
        else:
            self._count += 1
        self._buffer[self._head] = x
        self.scatter += np.outer(x, x)
        self._head = (self._head + 1) % self.w

        self._pushes += 1
        if self._pushes % RECOMPUTE_EVERY == 0:
            self.recompute()
        return self

    def contents(self) -> np.ndarray:
        """Buffered observations as a (count, k) array, oldest first."""
        if not self.is_full:
            return self._buffer[: self._count].copy()
        return np.roll(self._buffer, -self._head, axis=0)

    def oldest(self) -> np.ndarray:
        """The observation the next push evicts (when full)."""
        if not self.is_full:
            raise WindowNotFullError("The window is not full yet")
        return self._buffer[self._head].copy()

    def brute_force_scatter(self) -> np.ndarray:
        data = self._buffer[: self._count]
        return data.T @ data

    def recompute(self) -> None:
        self.scatter = self.brute_force_scatter()

    def require_full(self) -> None:
        if not self.is_full:
            raise WindowNotFullError(
                f"The window holds {self._count} of {self.w} observations"
            )

    def reset(self) -> None:
        self._buffer[:] = 0.0
        self._head = 0
        self._count = 0
        self._pushes = 0
        self.scatter = np.zeros((self.k, self.k))

    @classmethod
    def from_samples(cls, samples: np.ndarray, w: int = None) -> SlidingWindowCov:
        """Window of length w (default: len(samples)) after pushing every row of samples."""
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        window = cls(samples.shape[1], len(samples) if w is None else w)
        for x in samples:
            window.push(x)
        return window

    def __repr__(self) -> str:
        return f"SlidingWindowCov(k={self.k}, w={self.w}, count={self._count})"

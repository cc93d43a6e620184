from __future__ import annotations
import math
from numbers import Integral
from typing import Optional, Sequence

import numpy as np

from subcusum.utils.helpers import SeedLike, as_generator, unit_vector
from subcusum.utils.types import InvalidModelError


class SpikedModel:
    r"""The rank-one spiked Gaussian law N(0, sigma2 * I_k + theta * u u^T).

    With theta = 0 the model is isotropic noise and carries no direction.

    Parameters:
        k: Ambient dimension.
        sigma2: Noise power, strictly positive.
        theta: Spike strength, nonnegative.
        u: Unit-norm spike direction of length k. Required when theta > 0, ignored otherwise.
    """

    def __init__(
        self,
        k: int,
        sigma2: float = 1.0,
        theta: float = 0.0,
        u: Optional[Sequence[float]] = None,
    ) -> None:
        if not isinstance(k, Integral) or k < 1:
            raise InvalidModelError(f"Dimension k must be a positive integer, got {k!r}")
        if not (math.isfinite(sigma2) and sigma2 > 0):
            raise InvalidModelError(f"sigma2 must be finite and positive, got {sigma2!r}")
        if not (math.isfinite(theta) and theta >= 0):
            raise InvalidModelError(f"theta must be finite and nonnegative, got {theta!r}")

        self.k = int(k)
        self.sigma2 = float(sigma2)
        self.theta = float(theta)
        self.u: Optional[np.ndarray] = None

        if self.theta > 0:
            if u is None:
                raise InvalidModelError("A spiked model with theta > 0 needs a direction u")
            vec = unit_vector(u, tol=1e-12)
            if len(vec) != self.k:
                raise InvalidModelError(
                    f"Direction u has length {len(vec)}, expected k={self.k}"
                )
            self.u = vec

    @classmethod
    def noise(cls, k: int, sigma2: float = 1.0) -> SpikedModel:
        """Isotropic model N(0, sigma2 * I_k)."""
        return cls(k, sigma2, 0.0)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def rho(self) -> float:
        """Signal-to-noise ratio theta / sigma2."""
        return self.theta / self.sigma2

    @property
    def is_spiked(self) -> bool:
        return self.theta > 0

    def covariance(self) -> np.ndarray:
        cov = self.sigma2 * np.eye(self.k)
        if self.u is not None:
            cov += self.theta * np.outer(self.u, self.u)
        return cov

    def sample(self, n: int, seed: SeedLike = None) -> np.ndarray:
        """Draws n i.i.d. samples as an (n, k) array.

        Realized as x = sigma * z + sqrt(theta) * g * u with z ~ N(0, I_k) and scalar g ~ N(0, 1).
        """
        rng = as_generator(seed)
        z = rng.standard_normal((n, self.k))
        g = rng.standard_normal(n)
        return self.transform(z, g)

    def transform(self, z: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Maps standard normal draws (z of shape (n, k), g of shape (n,)) to samples of this model."""
        x = self.sigma * z
        if self.u is not None:
            x += math.sqrt(self.theta) * np.outer(g, self.u)
        return x

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpikedModel):
            return False
        if (self.k, self.sigma2, self.theta) != (other.k, other.sigma2, other.theta):
            return False
        if self.u is None or other.u is None:
            return self.u is None and other.u is None
        return bool(np.array_equal(self.u, other.u))

    def __repr__(self) -> str:
        if self.u is None:
            return f"SpikedModel(k={self.k}, sigma2={self.sigma2}, theta={self.theta})"
        return (
            f"SpikedModel(k={self.k}, sigma2={self.sigma2}, theta={self.theta}, "
            f"u={np.array2string(self.u, precision=4)})"
        )

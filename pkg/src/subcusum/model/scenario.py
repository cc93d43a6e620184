from __future__ import annotations
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from subcusum.model.spiked_model import SpikedModel
from subcusum.utils.helpers import SeedLike, as_generator
from subcusum.utils.types import InvalidModelError

STREAM_CHUNK = 1024


class Flavor(str, Enum):
    EMERGING = "emerging"
    SWITCHING = "switching"


class Scenario:
    r"""A pre-change / post-change pair of spiked models with change point tau.

    Samples 1..tau follow `pre`, samples tau+1, tau+2, ... follow `post`.

    Parameters:
        flavor: Flavor.EMERGING (a spike appears in isotropic noise) or
            Flavor.SWITCHING (the spike direction changes from u1 to u2).
        pre: The pre-change model.
        post: The post-change model.
        tau: The change point, a nonnegative integer.
    """

    def __init__(
        self, flavor: Flavor, pre: SpikedModel, post: SpikedModel, tau: int = 0
    ) -> None:
        self.flavor = Flavor(flavor)
        self.pre = pre
        self.post = post
        self.tau = int(tau)
        self.validate()

    @classmethod
    def emerging(
        cls,
        k: int,
        sigma2: float,
        theta: float,
        u: Sequence[float],
        tau: int = 0,
    ) -> Scenario:
        return cls(
            Flavor.EMERGING,
            SpikedModel.noise(k, sigma2),
            SpikedModel(k, sigma2, theta, u),
            tau,
        )

    @classmethod
    def switching(
        cls,
        k: int,
        sigma2: float,
        theta: float,
        u1: Sequence[float],
        u2: Sequence[float],
        tau: int = 0,
    ) -> Scenario:
        return cls(
            Flavor.SWITCHING,
            SpikedModel(k, sigma2, theta, u1),
            SpikedModel(k, sigma2, theta, u2),
            tau,
        )

    def validate(self) -> None:
        """Checks the structural invariants of the flavor, raising InvalidModelError."""
        if self.tau < 0:
            raise InvalidModelError(f"Change point tau must be nonnegative, got {self.tau}")
        if self.pre.k != self.post.k:
            raise InvalidModelError(
                f"Pre- and post-change dimensions differ ({self.pre.k} != {self.post.k})"
            )
        if self.pre.sigma2 != self.post.sigma2:
            raise InvalidModelError(
                f"Pre- and post-change noise powers differ ({self.pre.sigma2} != {self.post.sigma2})"
            )
        if self.flavor is Flavor.EMERGING:
            if self.pre.theta != 0:
                raise InvalidModelError("An emerging scenario needs a pure-noise pre-change model")
        else:
            if not (self.pre.theta > 0 and self.pre.theta == self.post.theta):
                raise InvalidModelError(
                    "A switching scenario needs equal, positive spike strengths before and after the change"
                )

    @property
    def k(self) -> int:
        return self.pre.k

    @property
    def sigma2(self) -> float:
        return self.pre.sigma2

    def with_tau(self, tau: int) -> Scenario:
        """A copy of the scenario with a different change point."""
        return Scenario(self.flavor, self.pre, self.post, tau)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scenario):
            return False
        return (
            self.flavor == other.flavor
            and self.pre == other.pre
            and self.post == other.post
            and self.tau == other.tau
        )

    def __repr__(self) -> str:
        return f"Scenario({self.flavor.value}, pre={self.pre!r}, post={self.post!r}, tau={self.tau})"


def iter_stream(
    scenario: Scenario, seed: SeedLike, chunk: int = STREAM_CHUNK
) -> Iterator[np.ndarray]:
    """Lazily yields consecutive (chunk, k) blocks of the observation stream.

    Each block consumes chunk * k normals for the isotropic part and chunk normals for the
    spike, so the stream is a function of the seed alone, whatever the consumer reads.
    """
    rng = as_generator(seed)
    start = 0  # samples already emitted
    while True:
        z = rng.standard_normal((chunk, scenario.k))
        g = rng.standard_normal(chunk)
        n_pre = min(max(scenario.tau - start, 0), chunk)
        if n_pre == chunk:
            block = scenario.pre.transform(z, g)
        elif n_pre == 0:
            block = scenario.post.transform(z, g)
        else:
            block = np.vstack(
                (
                    scenario.pre.transform(z[:n_pre], g[:n_pre]),
                    scenario.post.transform(z[n_pre:], g[n_pre:]),
                )
            )
        start += chunk
        yield block


def sample_stream(scenario: Scenario, horizon: int, seed: SeedLike) -> np.ndarray:
    """Samples `horizon` observations of the scenario as a (horizon, k) array.

    Samples 1..min(tau, horizon) follow the pre-change law, the rest the post-change law.
    The result is the prefix of `iter_stream` for the same seed.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    scenario.validate()
    blocks = []
    total = 0
    for block in iter_stream(scenario, seed):
        blocks.append(block)
        total += len(block)
        if total >= horizon:
            break
    return np.vstack(blocks)[:horizon]

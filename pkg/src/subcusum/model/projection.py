from __future__ import annotations
from typing import Sequence, Tuple

import numpy as np

from subcusum.model.scenario import Flavor, Scenario
from subcusum.model.spiked_model import SpikedModel
from subcusum.utils.helpers import unit_vector
from subcusum.utils.types import DegenerateChangeError, InvalidModelError

PROJECTION_TOL = 1e-10


class ProjectionOperator:
    r"""An orthonormal map Q from R^k onto the orthogonal complement of u1.

    Q has shape (k-1, k) with Q u1 = 0 and Q Q^T = I_{k-1}. Observations are mapped
    through y_t = Q x_t.

    Parameters:
        q: The (k-1, k) matrix.
        u1: The direction annihilated by q, used to check the invariants.
    """

    def __init__(self, q: np.ndarray, u1: Sequence[float]) -> None:
        self.q = np.asarray(q, dtype=float)
        self.u1 = np.asarray(u1, dtype=float)
        k = len(self.u1)
        if self.q.shape != (k - 1, k):
            raise InvalidModelError(f"Q must have shape {(k - 1, k)}, got {self.q.shape}")
        if np.max(np.abs(self.q @ self.u1)) > PROJECTION_TOL:
            raise InvalidModelError("Q does not annihilate u1")
        if np.linalg.norm(self.q @ self.q.T - np.eye(k - 1)) > PROJECTION_TOL:
            raise InvalidModelError("Q does not have orthonormal rows")

    @property
    def k(self) -> int:
        """Dimension of the original observations."""
        return self.q.shape[1]

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Projects a single k-vector or an (n, k) block of observations."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.k:
            raise ValueError(f"Expected observations of dimension {self.k}, got {x.shape[-1]}")
        return x @ self.q.T

    def __repr__(self) -> str:
        return f"ProjectionOperator(k={self.k})"


def build_projection(u1: Sequence[float]) -> ProjectionOperator:
    """Builds Q from the Householder reflector that maps u1 to a multiple of e1.

    The rows 2..k of the (symmetric, orthogonal) reflector are orthogonal to u1. Each row
    is then flipped so that its first nonzero entry is positive.
    """
    vec = unit_vector(u1, tol=PROJECTION_TOL, name="u1")
    k = len(vec)
    if k < 2:
        raise InvalidModelError(f"A projection needs k >= 2, got k={k}")

    v = vec.copy()
    v[0] += 1.0 if vec[0] >= 0 else -1.0
    reflector = np.eye(k) - 2.0 * np.outer(v, v) / (v @ v)
    q = reflector[1:]

    for row in q:
        nonzero = np.flatnonzero(np.abs(row) > PROJECTION_TOL)
        if len(nonzero) and row[nonzero[0]] < 0:
            row *= -1.0
    return ProjectionOperator(q, vec)


def reduce_switching(scenario: Scenario) -> Tuple[Scenario, ProjectionOperator]:
    r"""Reduces a switching scenario to an emerging scenario in dimension k-1.

    The reduced post-change model has strength theta * (1 - (u1^T u2)^2) along
    Q u2 / |Q u2|. Returns the reduced scenario and the operator Q that maps the
    original stream onto it.
    """
    if scenario.flavor is not Flavor.SWITCHING:
        raise InvalidModelError("reduce_switching expects a switching scenario")
    scenario.validate()

    u1, u2 = scenario.pre.u, scenario.post.u
    overlap = float(u1 @ u2)
    residual = 1.0 - overlap**2
    if residual <= PROJECTION_TOL:
        raise DegenerateChangeError(
            f"u1 and u2 span the same subspace (u1.u2={overlap:.12g}), there is no change to detect"
        )

    projection = build_projection(u1)
    qu2 = projection.apply(u2)
    theta_reduced = scenario.post.theta * residual
    reduced = Scenario(
        Flavor.EMERGING,
        SpikedModel.noise(scenario.k - 1, scenario.sigma2),
        SpikedModel(
            scenario.k - 1, scenario.sigma2, theta_reduced, qu2 / np.linalg.norm(qu2)
        ),
        scenario.tau,
    )
    return reduced, projection

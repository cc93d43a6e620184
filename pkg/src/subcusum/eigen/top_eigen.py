from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from subcusum.eigen.sliding_window import SlidingWindowCov
from subcusum.model.spiked_model import SpikedModel
from subcusum.utils.helpers import fix_sign
from subcusum.utils.types import DomainError, InfeasibleWindowError

_log: logging.Logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 1000
EIGEN_METHODS = ("power", "eigh")


@dataclass
class TopEigenEstimate:
    """Leading eigenpair of a window scatter matrix.

    Attributes:
        u_hat: Unit-norm eigenvector, sign fixed so its largest-magnitude entry is positive.
        lambda_hat: The corresponding (largest) eigenvalue.
        iterations: Power iterations used (0 for the dense solver).
        converged: Whether the residual test passed.
    """

    u_hat: np.ndarray
    lambda_hat: float
    iterations: int
    converged: bool


def cold_start(k: int) -> np.ndarray:
    """Deterministic start e1 + 1/k on every coordinate, normalized."""
    start = np.full(k, 1.0 / k)
    start[0] += 1.0
    return start / np.linalg.norm(start)


def power_iteration(
    matrix: np.ndarray,
    start: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> TopEigenEstimate:
    """Power iteration on a symmetric PSD matrix.

    Stops once |A v - lambda v| <= tol * lambda for the current iterate v, where lambda is its
    Rayleigh quotient. After max_iter iterations the last iterate is returned unconverged.
    """
    v = start / np.linalg.norm(start)
    lam = 0.0
    for it in range(1, max_iter + 1):
        y = matrix @ v
        lam = float(v @ y)
        if np.linalg.norm(y - lam * v) <= tol * lam:
            return TopEigenEstimate(fix_sign(v), lam, it, True)
        v = y / np.linalg.norm(y)
    _log.debug("Power iteration did not converge in %d iterations", max_iter)
    return TopEigenEstimate(fix_sign(v), lam, max_iter, False)


def dense_top_eigen(matrix: np.ndarray) -> TopEigenEstimate:
    eigvals, eigvecs = np.linalg.eigh(matrix)
    return TopEigenEstimate(fix_sign(eigvecs[:, -1]), float(eigvals[-1]), 0, True)


def top_eigenvector(
    window: SlidingWindowCov,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    start: Optional[np.ndarray] = None,
    method: str = "power",
) -> TopEigenEstimate:
    """Unit-norm leading eigenvector of the window scatter.

    Parameters:
        window: A full sliding window.
        tol: Relative residual tolerance of the power iteration.
        max_iter: Iteration budget of the power iteration.
        start: Warm start (usually the previous estimate). Defaults to `cold_start(k)`.
        method: "power" for power iteration, "eigh" for the dense symmetric solver.
    """
    window.require_full()
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if method == "eigh":
        return dense_top_eigen(window.scatter)
    if method != "power":
        raise ValueError(f"Unknown eigen method {method!r}, expected one of {EIGEN_METHODS}")
    if start is None:
        start = cold_start(window.k)
    return power_iteration(window.scatter, start, tol, max_iter)


def unnormalized_eigenvector(estimate: TopEigenEstimate, u: np.ndarray) -> np.ndarray:
    """The estimate rescaled to omega = u_hat / (u^T u_hat), so that omega - u is orthogonal to u."""
    return estimate.u_hat / float(u @ estimate.u_hat)


def eigenvector_error_cov(model: SpikedModel, w: int) -> np.ndarray:
    r"""Asymptotic covariance (1 + rho) / (w rho^2) (I - u u^T) of omega_t - u."""
    if not model.is_spiked:
        raise DomainError("The eigenvector error covariance needs a spiked model (theta > 0)")
    rho = model.rho
    w_min = (model.k - 1) * (1 + rho) / rho**2
    if w <= w_min:
        raise InfeasibleWindowError(w, w_min)
    return (1 + rho) / (w * rho**2) * (np.eye(model.k) - np.outer(model.u, model.u))

import math

import numpy as np
from scipy.optimize import bisect

from subcusum.utils.types import DomainError

ROOT_EPS = 1e-12
ROOT_MAX_ITER = 200


def _check_delta(delta: float, sigma2: float) -> None:
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    if not 0 < delta < 1 / (2 * sigma2):
        raise DomainError(
            f"delta must lie in (0, 1/(2 sigma2)) = (0, {1 / (2 * sigma2):.6g}), got {delta}"
        )


def log_mgf_nominal(delta: float, sigma2: float, d: float) -> float:
    """log E_inf[exp(delta ((u_hat^T x)^2 - d))] = -delta d - log(1 - 2 sigma2 delta) / 2."""
    _check_delta(delta, sigma2)
    return -delta * d - 0.5 * math.log1p(-2 * sigma2 * delta)


def mgf_nominal(delta: float, sigma2: float, d: float) -> float:
    r"""Pre-change moment generating function of the Subspace-CUSUM increment.

    E_inf[exp(delta ((u_hat^T x)^2 - d))] = exp(-delta d) / sqrt(1 - 2 sigma2 delta). It does
    not depend on u_hat, only on its unit norm.
    """
    return math.exp(log_mgf_nominal(delta, sigma2, d))


def drift_from_delta(delta: float, sigma2: float) -> float:
    """The drift d = -log(1 - 2 sigma2 delta) / (2 delta) whose tilt is delta."""
    _check_delta(delta, sigma2)
    return -math.log1p(-2 * sigma2 * delta) / (2 * delta)


def solve_delta_inf(d: float, sigma2: float) -> float:
    """Positive root delta_inf of mgf_nominal(delta, sigma2, d) = 1.

    Bracketed bisection on (eps, 1/(2 sigma2) - eps) applied to the log of the MGF, which is
    negative just right of 0 and diverges to +inf at the right end whenever d > sigma2.
    """
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    if not d > sigma2:
        raise DomainError(
            f"The drift must exceed sigma2={sigma2} for a positive root, got d={d}"
        )
    left = ROOT_EPS
    right = 1 / (2 * sigma2) - ROOT_EPS

    def log_mgf(delta: float) -> float:
        return -delta * d - 0.5 * np.log1p(-2 * sigma2 * delta)

    if log_mgf(left) >= 0:
        raise DomainError(f"No sign change of the MGF on ({left}, {right}) for d={d}")
    if log_mgf(right) <= 0:
        raise DomainError(
            f"The root for d={d} lies beyond {right}, within {ROOT_EPS} of 1/(2 sigma2)"
        )
    return bisect(
        log_mgf, left, right, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=ROOT_MAX_ITER
    )

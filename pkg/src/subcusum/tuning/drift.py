from __future__ import annotations
from dataclasses import dataclass

from subcusum.utils.types import DomainError, InfeasibleWindowError


def _check_params(k: int, rho: float, sigma2: float = 1.0) -> None:
    if k < 2:
        raise DomainError(f"k must be at least 2, got {k}")
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")


def min_window(k: int, rho: float) -> float:
    """Smallest window (exclusive) for which the drift interval is nonempty: (k-1)(1+rho)/rho^2."""
    _check_params(k, rho)
    return (k - 1) * (1 + rho) / rho**2


def spike_factor(k: int, rho: float, w: float) -> float:
    r"""A = (1 + rho)(1 - (k-1)/(w rho)), so that E_0[(u_hat^T x)^2] = sigma2 * A."""
    _check_params(k, rho)
    return (1 + rho) * (1 - (k - 1) / (w * rho))


@dataclass(frozen=True)
class DriftBounds:
    """Interval of drifts giving negative pre-change and positive post-change mean increments.

    Attributes:
        lower: sigma2, the pre-change mean of (u_hat^T x)^2.
        upper: sigma2 * A, its post-change mean under the Gaussian approximation of u_hat.
        w_min: The window must exceed this value for the interval to be nonempty.
        w: The window the bounds were evaluated at.
    """

    lower: float
    upper: float
    w_min: float
    w: float

    @property
    def feasible(self) -> bool:
        return self.w > self.w_min

    def contains(self, d: float) -> bool:
        return self.lower < d < self.upper

    def validate(self) -> DriftBounds:
        if not self.feasible:
            raise InfeasibleWindowError(self.w, self.w_min)
        return self


def drift_bounds(
    k: int, rho: float, sigma2: float, w: float, strict: bool = False
) -> DriftBounds:
    """Lower and upper drift bounds at window w.

    An infeasible window (w <= w_min) is reported through `DriftBounds.feasible`, or raised as
    InfeasibleWindowError when `strict` is set.
    """
    _check_params(k, rho, sigma2)
    if w < 1:
        raise DomainError(f"w must be at least 1, got {w}")
    bounds = DriftBounds(
        lower=sigma2,
        upper=sigma2 * spike_factor(k, rho, w),
        w_min=min_window(k, rho),
        w=w,
    )
    if strict:
        bounds.validate()
    return bounds

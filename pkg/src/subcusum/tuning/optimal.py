r"""First-order performance predictions and optimal Subspace-CUSUM parameters.

Every prediction drops the (1 + o(1)) factors and the unknown constant of the exponential
ARL law, so the values are first-order predictions, not exact expectations.
"""
from __future__ import annotations
import math
from dataclasses import asdict, dataclass

from subcusum.tuning.drift import drift_bounds, min_window, spike_factor
from subcusum.tuning.mgf import solve_delta_inf
from subcusum.utils.types import DomainError, InfeasibleWindowError


def _check_gamma(gamma: float) -> None:
    if not gamma > 1:
        raise DomainError(f"The target ARL gamma must exceed 1, got {gamma}")


def _check_rho(rho: float) -> None:
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")


def _feasible_factor(k: int, rho: float, w: float) -> float:
    a = spike_factor(k, rho, w)
    if a <= 1:
        raise InfeasibleWindowError(w, min_window(k, rho))
    return a


def kl_number(rho: float) -> float:
    """Kullback-Leibler number I_0 = (rho - log(1 + rho)) / 2 of the emerging-spike problem."""
    _check_rho(rho)
    return (rho - math.log1p(rho)) / 2


def predicted_threshold_cusum(gamma: float) -> float:
    """b = log(gamma) for the exact CUSUM (prediction only)."""
    _check_gamma(gamma)
    return math.log(gamma)


def predicted_threshold_subspace(gamma: float, d: float, sigma2: float) -> float:
    """b = log(gamma) / delta_inf(d) for Subspace-CUSUM (prediction only)."""
    _check_gamma(gamma)
    return math.log(gamma) / solve_delta_inf(d, sigma2)


def predicted_edd_cusum(gamma: float, rho: float) -> float:
    """2 log(gamma) / (rho - log(1 + rho)), the delay of the exact CUSUM at ARL gamma."""
    _check_gamma(gamma)
    return math.log(gamma) / kl_number(rho)


def edd_denominator(delta: float, k: int, rho: float, w: float, sigma2: float) -> float:
    r"""sigma2 delta A + log(1 - 2 sigma2 delta) / 2, the rate in the Subspace-CUSUM delay.

    Concave in delta on (0, 1/(2 sigma2)).
    """
    if not 0 < delta < 1 / (2 * sigma2):
        raise DomainError(f"delta must lie in (0, 1/(2 sigma2)), got {delta}")
    return sigma2 * delta * spike_factor(k, rho, w) + 0.5 * math.log1p(-2 * sigma2 * delta)


def predicted_edd_general(
    gamma: float, k: int, rho: float, w: float, sigma2: float, delta: float
) -> float:
    """Subspace-CUSUM delay log(gamma) / edd_denominator(delta) + w for an arbitrary tilt delta."""
    _check_gamma(gamma)
    denominator = edd_denominator(delta, k, rho, w, sigma2)
    if denominator <= 0:
        raise DomainError(
            f"The delay rate is nonpositive ({denominator:.6g}) at delta={delta}, w={w}"
        )
    return math.log(gamma) / denominator + w


def predicted_edd_at_drift(
    gamma: float, k: int, rho: float, w: float, sigma2: float, d: float
) -> float:
    """Subspace-CUSUM delay for a given drift d, through its tilt delta_inf(d)."""
    return predicted_edd_general(gamma, k, rho, w, sigma2, solve_delta_inf(d, sigma2))


def optimal_delta(k: int, rho: float, w: float, sigma2: float) -> float:
    """The tilt (1 - 1/A) / (2 sigma2) maximizing the delay rate at window w."""
    a = _feasible_factor(k, rho, w)
    return (1 - 1 / a) / (2 * sigma2)


def predicted_edd_subspace(gamma: float, k: int, rho: float, w: float) -> float:
    """Minimal Subspace-CUSUM delay at window w: 2 log(gamma) / (A - 1 - log A) + w."""
    _check_gamma(gamma)
    a = spike_factor(k, rho, w)
    if a <= 1:
        raise DomainError(
            f"A = (1+rho)(1-(k-1)/(w rho)) = {a:.6g} <= 1, window w={w} is too small"
        )
    return 2 * math.log(gamma) / (a - 1 - math.log(a)) + w


def optimal_window_exact(gamma: float, k: int, rho: float) -> float:
    """Unrounded w* = sqrt(log gamma) sqrt(2(k-1)) / (rho - log(1 + rho))."""
    if not gamma > math.e:
        raise DomainError(f"optimal_window needs log(gamma) > 1, got gamma={gamma}")
    if k < 2:
        raise DomainError(f"k must be at least 2, got {k}")
    _check_rho(rho)
    return math.sqrt(math.log(gamma)) * math.sqrt(2 * (k - 1)) / (rho - math.log1p(rho))


def optimal_window(gamma: float, k: int, rho: float) -> int:
    """w* rounded to the nearest integer, then raised to at least ceil(w_min) + 1."""
    w_star = round(optimal_window_exact(gamma, k, rho))
    return max(int(w_star), math.ceil(min_window(k, rho)) + 1)


def optimal_drift(k: int, rho: float, sigma2: float, w_star: float) -> float:
    """Optimal drift sigma2 A log(A) / (A - 1) at window w_star."""
    a = _feasible_factor(k, rho, w_star)
    return sigma2 * a * math.log(a) / (a - 1)


def predicted_ratio(gamma: float, k: int) -> float:
    """1 + sqrt((k-1) / (2 log gamma)), the optimized delay over the exact CUSUM delay."""
    _check_gamma(gamma)
    return 1 + math.sqrt((k - 1) / (2 * math.log(gamma)))


@dataclass(frozen=True)
class TuningResult:
    """Optimized Subspace-CUSUM parameters and first-order predictions at target ARL gamma."""

    gamma: float
    k: int
    rho: float
    sigma2: float
    w_star: int
    w_star_exact: float
    d_star: float
    delta_star: float
    predicted_edd_subspace: float
    predicted_edd_cusum: float
    predicted_ratio: float
    predicted_b_subspace: float
    predicted_b_cusum: float

    def to_dict(self) -> dict:
        return asdict(self)


def tune(gamma: float, k: int, rho: float, sigma2: float = 1.0) -> TuningResult:
    """Optimal (w*, d*, delta*) for target ARL gamma and the predictions that go with them."""
    w_star = optimal_window(gamma, k, rho)
    d_star = optimal_drift(k, rho, sigma2, w_star)
    bounds = drift_bounds(k, rho, sigma2, w_star, strict=True)
    if not bounds.contains(d_star):
        raise DomainError(f"d*={d_star} falls outside ({bounds.lower}, {bounds.upper})")
    delta_star = optimal_delta(k, rho, w_star, sigma2)
    return TuningResult(
        gamma=gamma,
        k=k,
        rho=rho,
        sigma2=sigma2,
        w_star=w_star,
        w_star_exact=optimal_window_exact(gamma, k, rho),
        d_star=d_star,
        delta_star=delta_star,
        predicted_edd_subspace=predicted_edd_subspace(gamma, k, rho, w_star),
        predicted_edd_cusum=predicted_edd_cusum(gamma, rho),
        predicted_ratio=predicted_ratio(gamma, k),
        predicted_b_subspace=math.log(gamma) / delta_star,
        predicted_b_cusum=predicted_threshold_cusum(gamma),
    )

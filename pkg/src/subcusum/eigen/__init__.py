from subcusum.eigen.sliding_window import SlidingWindowCov
from subcusum.eigen.top_eigen import (
    TopEigenEstimate,
    top_eigenvector,
    power_iteration,
    cold_start,
    unnormalized_eigenvector,
    eigenvector_error_cov,
)

__all__ = [
    "SlidingWindowCov",
    "TopEigenEstimate",
    "top_eigenvector",
    "power_iteration",
    "cold_start",
    "unnormalized_eigenvector",
    "eigenvector_error_cov",
]

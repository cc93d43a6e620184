from __future__ import annotations
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from subcusum.detectors.detector import Detector, DetectorKind
from subcusum.detectors.exact_cusum import ExactCusum
from subcusum.detectors.largest_eig import LargestEig
from subcusum.detectors.subspace_cusum import SubspaceCusum
from subcusum.eigen.top_eigen import DEFAULT_MAX_ITER, DEFAULT_TOL, EIGEN_METHODS
from subcusum.model.projection import ProjectionOperator, reduce_switching
from subcusum.model.scenario import Flavor, Scenario
from subcusum.tuning.mgf import solve_delta_inf
from subcusum.tuning.optimal import optimal_drift, predicted_threshold_cusum
from subcusum.utils.types import DomainError, InvalidModelError

CENSORED_WARN_FRAC = 0.10
HORIZON_CAP_FACTOR = 50


@dataclass(frozen=True)
class CalibrationSpec:
    """Monte Carlo settings shared by ARL/EDD estimation and threshold calibration.

    Attributes:
        target_gamma: Target ARL.
        rel_tol: Accepted relative ARL error of a calibrated threshold.
        reps: Number of independent replications.
        horizon_cap: Replications are stopped (censored) after this many samples.
            Defaults to 50 * target_gamma.
        master_seed: Replication i draws from the generator derived from (master_seed, i).
    """

    target_gamma: float
    rel_tol: float = 0.05
    reps: int = 2000
    horizon_cap: Optional[int] = None
    master_seed: int = 0

    def __post_init__(self) -> None:
        if not self.target_gamma > 1:
            raise DomainError(f"target_gamma must exceed 1, got {self.target_gamma}")
        if not 0 < self.rel_tol < 1:
            raise DomainError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.reps < 100:
            raise DomainError(f"At least 100 replications are required, got {self.reps}")
        if self.horizon_cap is not None and self.horizon_cap < 1:
            raise DomainError(f"horizon_cap must be positive, got {self.horizon_cap}")

    @property
    def cap(self) -> int:
        if self.horizon_cap is not None:
            return int(self.horizon_cap)
        return int(math.ceil(HORIZON_CAP_FACTOR * self.target_gamma))

    def with_gamma(self, gamma: float) -> CalibrationSpec:
        return replace(self, target_gamma=gamma)

    def with_seed(self, seed: int) -> CalibrationSpec:
        return replace(self, master_seed=seed)


@dataclass(frozen=True)
class DetectorConfig:
    r"""Everything needed to build a detector for a scenario, picklable for worker pools.

    A switching scenario is monitored through its projection: streams are drawn in
    dimension k and mapped by Q before reaching the detector, whose model lives in k-1.

    Parameters:
        kind: Which detector to build.
        scenario: The data model. Its tau is ignored, ARL runs use pure pre-change data
            and EDD runs change at the start.
        w: Window length, required by the windowed detectors.
        d: Subspace-CUSUM drift. None selects the optimal drift at w.
        eigen_method: Eigen solver of Subspace-CUSUM, "eigh" or "power".
        tol: Power iteration tolerance.
        max_iter: Power iteration budget.
    """

    kind: DetectorKind
    scenario: Scenario
    w: Optional[int] = None
    d: Optional[float] = None
    eigen_method: str = "eigh"
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", DetectorKind(self.kind))
        if self.kind is not DetectorKind.EXACT_CUSUM and (self.w is None or self.w < 1):
            raise InvalidModelError(f"{self.kind.value} needs a positive window w")
        if self.eigen_method not in EIGEN_METHODS:
            raise InvalidModelError(
                f"Unknown eigen method {self.eigen_method!r}, expected one of {EIGEN_METHODS}"
            )
        if not self.scenario.post.is_spiked:
            raise InvalidModelError("The post-change model has no spike, there is nothing to detect")

    def working_scenario(self) -> Tuple[Scenario, Optional[ProjectionOperator]]:
        """The emerging scenario the detector monitors and the projection leading to it."""
        if self.scenario.flavor is Flavor.SWITCHING:
            return reduce_switching(self.scenario)
        return self.scenario, None

    @property
    def label(self) -> str:
        return self.kind.value

    def drift(self) -> float:
        if self.d is not None:
            return self.d
        model = self.working_scenario()[0].post
        return optimal_drift(model.k, model.rho, model.sigma2, self.w)

    def build(self, threshold_b: float = math.inf) -> Detector:
        model = self.working_scenario()[0].post
        if self.kind is DetectorKind.EXACT_CUSUM:
            return ExactCusum(model, threshold_b)
        if self.kind is DetectorKind.SUBSPACE_CUSUM:
            return SubspaceCusum(
                model.k,
                self.w,
                self.drift(),
                threshold_b,
                tol=self.tol,
                max_iter=self.max_iter,
                eigen_method=self.eigen_method,
            )
        return LargestEig(model.k, self.w, threshold_b)

    def predicted_threshold(self, gamma: float) -> float:
        """A first-order threshold guess used to start the calibration search."""
        model = self.working_scenario()[0].post
        if self.kind is DetectorKind.EXACT_CUSUM:
            return predicted_threshold_cusum(gamma)
        if self.kind is DetectorKind.SUBSPACE_CUSUM:
            try:
                return math.log(gamma) / solve_delta_inf(self.drift(), model.sigma2)
            except DomainError:
                # no usable root for d <= sigma2 or a drift far above sigma2
                return math.log(gamma)
        # upper edge of the pre-change spectrum of the normalized scatter
        return model.sigma2 * (1 + math.sqrt(model.k / self.w)) ** 2

    def to_dict(self) -> dict:
        scenario = self.scenario
        params = {
            "kind": self.kind.value,
            "flavor": scenario.flavor.value,
            "k": scenario.k,
            "sigma2": scenario.sigma2,
            "theta": scenario.post.theta,
            "w": self.w,
            "eigen_method": self.eigen_method,
        }
        if self.kind is DetectorKind.SUBSPACE_CUSUM:
            params["d"] = self.drift()
        return params


@dataclass(frozen=True)
class RunLengthEstimate:
    """Monte Carlo mean of a stopping time.

    Iterating yields (mean, stderr), so `mean, se = estimate_arl(...)` works.
    """

    mean: float
    stderr: float
    censored_frac: float
    reps: int

    @property
    def reliable(self) -> bool:
        return self.censored_frac <= CENSORED_WARN_FRAC

    def __iter__(self):
        return iter((self.mean, self.stderr))


@dataclass(frozen=True)
class ExperimentResult:
    """Calibrated threshold with its ARL and EDD estimates for one detector."""

    detector_id: str
    threshold_b: float
    arl_hat: float
    arl_se: float
    edd_hat: float
    edd_se: float
    censored_frac: float
    params: dict

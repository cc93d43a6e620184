from subcusum.model.spiked_model import SpikedModel
from subcusum.model.scenario import Flavor, Scenario, sample_stream
from subcusum.model.projection import ProjectionOperator, reduce_switching
from subcusum.eigen.sliding_window import SlidingWindowCov
from subcusum.eigen.top_eigen import top_eigenvector
from subcusum.detectors.detector import DetectorKind, run_detector
from subcusum.detectors.exact_cusum import ExactCusum
from subcusum.detectors.subspace_cusum import SubspaceCusum
from subcusum.detectors.largest_eig import LargestEig
from subcusum.tuning.drift import drift_bounds
from subcusum.tuning.optimal import optimal_drift, optimal_window, tune
from subcusum.montecarlo.spec import CalibrationSpec, DetectorConfig
from subcusum.montecarlo.estimate import estimate_arl, estimate_edd
from subcusum.montecarlo.calibrate import calibrate_threshold
from subcusum.montecarlo.compare import compare_procedures

__all__ = [
    "SpikedModel",
    "Flavor",
    "Scenario",
    "sample_stream",
    "ProjectionOperator",
    "reduce_switching",
    "SlidingWindowCov",
    "top_eigenvector",
    "DetectorKind",
    "run_detector",
    "ExactCusum",
    "SubspaceCusum",
    "LargestEig",
    "drift_bounds",
    "optimal_drift",
    "optimal_window",
    "tune",
    "CalibrationSpec",
    "DetectorConfig",
    "estimate_arl",
    "estimate_edd",
    "calibrate_threshold",
    "compare_procedures",
]

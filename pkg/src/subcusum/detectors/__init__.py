from subcusum.detectors.detector import (
    Detector,
    DetectorKind,
    StatisticUpdate,
    StoppingReport,
    TracePoint,
    run_detector,
)
from subcusum.detectors.exact_cusum import (
    CusumState,
    ExactCusum,
    cusum_step,
    exact_cusum_drift,
    exact_cusum_increment,
    exact_cusum_loglr,
)
from subcusum.detectors.subspace_cusum import (
    SubspaceCusum,
    SubspaceCusumState,
    subspace_cusum_step,
)
from subcusum.detectors.largest_eig import LargestEig, largest_eig_statistic

__all__ = [
    "Detector",
    "DetectorKind",
    "StatisticUpdate",
    "StoppingReport",
    "TracePoint",
    "run_detector",
    "CusumState",
    "ExactCusum",
    "cusum_step",
    "exact_cusum_drift",
    "exact_cusum_increment",
    "exact_cusum_loglr",
    "SubspaceCusum",
    "SubspaceCusumState",
    "subspace_cusum_step",
    "LargestEig",
    "largest_eig_statistic",
]

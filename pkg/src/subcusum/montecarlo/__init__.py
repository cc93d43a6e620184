from subcusum.montecarlo.spec import (
    CENSORED_WARN_FRAC,
    CalibrationSpec,
    DetectorConfig,
    ExperimentResult,
    RunLengthEstimate,
)
from subcusum.montecarlo.replication import (
    Regime,
    ReplicationPath,
    extend_paths,
    simulate_path,
    simulate_paths,
    summarize,
)
from subcusum.montecarlo.estimate import estimate_arl, estimate_edd
from subcusum.montecarlo.calibrate import (
    B_MAX,
    B_MIN,
    CalibrationResult,
    CalibrationStep,
    calibrate_threshold,
)
from subcusum.montecarlo.compare import (
    CSV_HEADER,
    ComparisonRow,
    compare_procedures,
    evaluate_detector,
    optimal_scan_window,
)

__all__ = [
    "CENSORED_WARN_FRAC",
    "CalibrationSpec",
    "DetectorConfig",
    "ExperimentResult",
    "RunLengthEstimate",
    "Regime",
    "ReplicationPath",
    "extend_paths",
    "simulate_path",
    "simulate_paths",
    "summarize",
    "estimate_arl",
    "estimate_edd",
    "B_MAX",
    "B_MIN",
    "CalibrationResult",
    "CalibrationStep",
    "calibrate_threshold",
    "CSV_HEADER",
    "ComparisonRow",
    "compare_procedures",
    "evaluate_detector",
    "optimal_scan_window",
]

from subcusum.tuning.drift import DriftBounds, drift_bounds, min_window, spike_factor
from subcusum.tuning.mgf import (
    drift_from_delta,
    log_mgf_nominal,
    mgf_nominal,
    solve_delta_inf,
)
from subcusum.tuning.optimal import (
    TuningResult,
    edd_denominator,
    kl_number,
    optimal_delta,
    optimal_drift,
    optimal_window,
    optimal_window_exact,
    predicted_edd_at_drift,
    predicted_edd_cusum,
    predicted_edd_general,
    predicted_edd_subspace,
    predicted_ratio,
    predicted_threshold_cusum,
    predicted_threshold_subspace,
    tune,
)

__all__ = [
    "DriftBounds",
    "drift_bounds",
    "min_window",
    "spike_factor",
    "drift_from_delta",
    "log_mgf_nominal",
    "mgf_nominal",
    "solve_delta_inf",
    "TuningResult",
    "edd_denominator",
    "kl_number",
    "optimal_delta",
    "optimal_drift",
    "optimal_window",
    "optimal_window_exact",
    "predicted_edd_at_drift",
    "predicted_edd_cusum",
    "predicted_edd_general",
    "predicted_edd_subspace",
    "predicted_ratio",
    "predicted_threshold_cusum",
    "predicted_threshold_subspace",
    "tune",
]

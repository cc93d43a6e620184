from __future__ import annotations
import logging

from subcusum.montecarlo.replication import Regime, simulate_paths, summarize
from subcusum.montecarlo.spec import (
    CENSORED_WARN_FRAC,
    CalibrationSpec,
    DetectorConfig,
    RunLengthEstimate,
)

_log: logging.Logger = logging.getLogger(__name__)


def _estimate(
    config: DetectorConfig,
    regime: Regime,
    b: float,
    spec: CalibrationSpec,
    workers: int,
) -> RunLengthEstimate:
    paths = simulate_paths(
        config, regime, b, spec.cap, spec.master_seed, range(spec.reps), workers
    )
    estimate = summarize(paths, b, spec.cap)
    if not estimate.reliable:
        _log.warning(
            "%s: %.1f%% of %d replications hit the horizon cap %d at b=%g, "
            "the estimate is biased low; raise horizon_cap (threshold %.0f%%)",
            config.label,
            100 * estimate.censored_frac,
            estimate.reps,
            spec.cap,
            b,
            100 * CENSORED_WARN_FRAC,
        )
    return estimate


def estimate_arl(
    config: DetectorConfig, b: float, spec: CalibrationSpec, workers: int = 1
) -> RunLengthEstimate:
    """Average run length at threshold b: mean effective stopping time on pre-change data."""
    return _estimate(config, Regime.PRE, b, spec, workers)


def estimate_edd(
    config: DetectorConfig, b: float, spec: CalibrationSpec, workers: int = 1
) -> RunLengthEstimate:
    """Expected detection delay at threshold b, the change being in force from the first sample."""
    return _estimate(config, Regime.POST, b, spec, workers)

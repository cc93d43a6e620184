from __future__ import annotations
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

from subcusum.montecarlo.replication import (
    Regime,
    ReplicationPath,
    extend_paths,
    simulate_paths,
    summarize,
)
from subcusum.montecarlo.spec import CalibrationSpec, DetectorConfig, RunLengthEstimate
from subcusum.utils.types import CalibrationError

_log: logging.Logger = logging.getLogger(__name__)

B_MIN = 0.1
B_MAX = 100.0
MAX_PROBES = 40
MAX_BISECTIONS = 100


@dataclass(frozen=True)
class CalibrationStep:
    phase: str
    b: float
    arl_hat: float
    arl_se: float
    censored_frac: float


@dataclass
class CalibrationResult:
    """A calibrated threshold, its ARL estimate and the search transcript."""

    target_gamma: float
    threshold_b: float
    arl: RunLengthEstimate
    transcript: List[CalibrationStep] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "target_gamma": self.target_gamma,
            "threshold_b": self.threshold_b,
            "arl_hat": self.arl.mean,
            "arl_se": self.arl.stderr,
            "censored_frac": self.arl.censored_frac,
            "transcript": [step.__dict__ for step in self.transcript],
        }


def _next_probe(
    paths: List[ReplicationPath], probe: float, arl: float, gamma: float, cap: int
) -> float:
    """Secant step on log(ARL) against b, measured on the paths already simulated."""
    half = summarize(paths, probe / 2, cap).mean
    step = probe
    if arl > half > 0:
        slope = (math.log(arl) - math.log(half)) / (probe / 2)
        step = 1.2 * (math.log(gamma) - math.log(arl)) / slope
        step = min(max(step, 0.1 * probe), probe)
    return min(B_MAX, probe + step)


def calibrate_threshold(
    config: DetectorConfig,
    spec: CalibrationSpec,
    workers: int = 1,
    b_start: Optional[float] = None,
) -> CalibrationResult:
    """Finds b with |ARL(b) / target_gamma - 1| <= rel_tol.

    Replications are run once up to a probe threshold; since stopping times are pathwise
    nondecreasing in b, the same paths give the ARL of every lower threshold, so the
    bisection that follows reuses them (common random numbers). The probe grows by secant
    steps in log(ARL) until it brackets the target.
    """
    gamma = spec.target_gamma
    cap = spec.cap
    result = CalibrationResult(gamma, math.nan, RunLengthEstimate(math.nan, math.nan, 0.0, 0))

    def evaluate(b: float, phase: str) -> RunLengthEstimate:
        estimate = summarize(paths, b, cap)
        result.transcript.append(
            CalibrationStep(phase, b, estimate.mean, estimate.stderr, estimate.censored_frac)
        )
        _log.info(
            "%s %s b=%.6g ARL=%.6g (se %.3g, censored %.1f%%)",
            config.label,
            phase,
            b,
            estimate.mean,
            estimate.stderr,
            100 * estimate.censored_frac,
        )
        return estimate

    def accept(b: float, estimate: RunLengthEstimate) -> CalibrationResult:
        result.threshold_b = b
        result.arl = estimate
        if not estimate.reliable:
            _log.warning(
                "%s: calibrated ARL at b=%.6g is unreliable, %.1f%% of replications censored",
                config.label,
                b,
                100 * estimate.censored_frac,
            )
        return result

    if b_start is None:
        b_start = 0.5 * config.predicted_threshold(gamma)
    probe = min(max(b_start, B_MIN), B_MAX)
    lo = B_MIN
    paths = simulate_paths(
        config, Regime.PRE, probe, cap, spec.master_seed, range(spec.reps), workers
    )
    for _ in range(MAX_PROBES):
        estimate = evaluate(probe, "probe")
        if abs(estimate.mean / gamma - 1) <= spec.rel_tol:
            return accept(probe, estimate)
        if estimate.mean > gamma:
            break
        if probe >= B_MAX:
            raise CalibrationError(
                f"{config.label}: ARL {estimate.mean:.6g} at b={B_MAX} is still below "
                f"the target {gamma:.6g}, no bracket in [{B_MIN}, {B_MAX}]"
            )
        lo = probe
        probe = _next_probe(paths, probe, estimate.mean, gamma, cap)
        paths = extend_paths(
            paths, config, Regime.PRE, probe, cap, spec.master_seed, workers
        )
    else:
        raise CalibrationError(
            f"{config.label}: no bracket for ARL {gamma:.6g} after {MAX_PROBES} probes"
        )

    hi = probe
    if lo == B_MIN:
        estimate = evaluate(B_MIN, "bracket")
        if abs(estimate.mean / gamma - 1) <= spec.rel_tol:
            return accept(B_MIN, estimate)
        if estimate.mean > gamma:
            raise CalibrationError(
                f"{config.label}: ARL {estimate.mean:.6g} at b={B_MIN} already exceeds "
                f"the target {gamma:.6g}, no bracket in [{B_MIN}, {B_MAX}]"
            )

    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        estimate = evaluate(mid, "bisect")
        if abs(estimate.mean / gamma - 1) <= spec.rel_tol:
            return accept(mid, estimate)
        if estimate.mean < gamma:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(
        f"{config.label}: bisection on [{lo:.6g}, {hi:.6g}] did not reach ARL {gamma:.6g} "
        f"within {100 * spec.rel_tol:.1f}%"
    )

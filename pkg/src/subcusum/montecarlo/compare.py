from __future__ import annotations
import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

from subcusum.detectors.detector import DetectorKind
from subcusum.model.scenario import Scenario
from subcusum.montecarlo.calibrate import calibrate_threshold
from subcusum.montecarlo.estimate import estimate_edd
from subcusum.montecarlo.spec import CalibrationSpec, DetectorConfig, ExperimentResult
from subcusum.utils.helpers import fmt_float
from subcusum.utils.types import InfeasibleWindowError, SubspaceCusumError

_log: logging.Logger = logging.getLogger(__name__)

CSV_HEADER = (
    "gamma",
    "detector",
    "w",
    "b",
    "arl_hat",
    "arl_se",
    "edd_hat",
    "edd_se",
    "censored_frac",
    "seed",
)
SCAN_LABEL = "subspace_cusum_scan"
OPT_LABEL = "subspace_cusum_opt"


@dataclass(frozen=True)
class ComparisonRow:
    """One line of the comparison table.

    Failed rows keep their identifying columns, carry nan estimates and the
    failure message in `status`.
    """

    gamma: float
    detector: str
    w: Optional[int]
    b: float
    arl_hat: float
    arl_se: float
    edd_hat: float
    edd_se: float
    censored_frac: float
    seed: int
    d: Optional[float] = None
    status: str = "ok"
    params: dict = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def csv_fields(self) -> List[str]:
        return [
            fmt_float(self.gamma),
            self.detector,
            "" if self.w is None else str(self.w),
            fmt_float(self.b),
            fmt_float(self.arl_hat),
            fmt_float(self.arl_se),
            fmt_float(self.edd_hat),
            fmt_float(self.edd_se),
            fmt_float(self.censored_frac),
            str(self.seed),
        ]

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "detector": self.detector,
            "w": self.w,
            "d": self.d,
            "b": self.b,
            "arl_hat": self.arl_hat,
            "arl_se": self.arl_se,
            "edd_hat": self.edd_hat,
            "edd_se": self.edd_se,
            "censored_frac": self.censored_frac,
            "seed": self.seed,
            "status": self.status,
            "params": self.params,
        }

    def to_result(self) -> ExperimentResult:
        return ExperimentResult(
            detector_id=self.detector,
            threshold_b=self.b,
            arl_hat=self.arl_hat,
            arl_se=self.arl_se,
            edd_hat=self.edd_hat,
            edd_se=self.edd_se,
            censored_frac=self.censored_frac,
            params=self.params,
        )


def evaluate_detector(
    config: DetectorConfig,
    spec: CalibrationSpec,
    label: Optional[str] = None,
    workers: int = 1,
) -> ComparisonRow:
    """Calibrates `config` to ARL spec.target_gamma, then estimates its EDD at that threshold.

    Errors raised by the package are turned into a failed row.
    """
    label = label or config.label
    try:
        d = config.drift() if config.kind is DetectorKind.SUBSPACE_CUSUM else None
        calibration = calibrate_threshold(config, spec, workers)
        edd = estimate_edd(config, calibration.threshold_b, spec, workers)
    except SubspaceCusumError as exc:
        _log.warning("gamma=%g %s w=%s failed: %s", spec.target_gamma, label, config.w, exc)
        return ComparisonRow(
            spec.target_gamma,
            label,
            config.w,
            math.nan,
            math.nan,
            math.nan,
            math.nan,
            math.nan,
            math.nan,
            spec.master_seed,
            status=str(exc),
            params={"kind": config.kind.value, "w": config.w},
        )
    row = ComparisonRow(
        gamma=spec.target_gamma,
        detector=label,
        w=config.w,
        b=calibration.threshold_b,
        arl_hat=calibration.arl.mean,
        arl_se=calibration.arl.stderr,
        edd_hat=edd.mean,
        edd_se=edd.stderr,
        censored_frac=max(calibration.arl.censored_frac, edd.censored_frac),
        seed=spec.master_seed,
        d=d,
        params=config.to_dict(),
    )
    _log.info(
        "gamma=%g %s w=%s b=%.6g ARL=%.6g EDD=%.6g",
        row.gamma,
        row.detector,
        row.w,
        row.b,
        row.arl_hat,
        row.edd_hat,
    )
    return row


def _scan(
    scenario: Scenario,
    spec: CalibrationSpec,
    w_scan: Sequence[int],
    eigen_method: str,
    workers: int,
) -> List[ComparisonRow]:
    rows = []
    for w in w_scan:
        config = DetectorConfig(
            DetectorKind.SUBSPACE_CUSUM, scenario, w=w, eigen_method=eigen_method
        )
        try:
            config.drift()
        except InfeasibleWindowError:
            _log.debug("Scan skips infeasible w=%d", w)
            continue
        rows.append(evaluate_detector(config, spec, SCAN_LABEL, workers))
    return rows


def compare_procedures(
    gammas: Sequence[float],
    scenario: Scenario,
    spec: CalibrationSpec,
    windows: Sequence[int] = (20,),
    w_scan: Optional[Sequence[int]] = None,
    include_largest_eig: bool = True,
    eigen_method: str = "eigh",
    workers: int = 1,
) -> List[ComparisonRow]:
    """Calibrates every procedure to each target ARL and tabulates the detection delays.

    For each gamma the table holds the exact CUSUM row, one Subspace-CUSUM row per window in
    `windows`, and the largest-eigenvalue rows at the same windows. When `w_scan` is given,
    Subspace-CUSUM is also evaluated at every feasible scanned window (with its optimal drift)
    and the scan minimizer is repeated as the `subspace_cusum_opt` row.

    Parameters:
        gammas: Target ARL values, each replacing spec.target_gamma.
        scenario: Emerging or switching data model. Its tau is ignored.
        spec: Monte Carlo settings shared by every row.
        windows: Fixed windows of the windowed detectors.
        w_scan: Windows scanned for the empirically optimal Subspace-CUSUM.
        include_largest_eig: Adds the largest-eigenvalue baseline rows.
        eigen_method: Eigen solver used by Subspace-CUSUM.
        workers: Size of the replication worker pool.
    """
    rows: List[ComparisonRow] = []
    for gamma in gammas:
        gamma_spec = spec.with_gamma(gamma)
        configs = [DetectorConfig(DetectorKind.EXACT_CUSUM, scenario)]
        configs += [
            DetectorConfig(
                DetectorKind.SUBSPACE_CUSUM, scenario, w=w, eigen_method=eigen_method
            )
            for w in windows
        ]
        if include_largest_eig:
            configs += [DetectorConfig(DetectorKind.LARGEST_EIG, scenario, w=w) for w in windows]
        rows += [evaluate_detector(config, gamma_spec, workers=workers) for config in configs]

        if w_scan:
            scan = _scan(scenario, gamma_spec, w_scan, eigen_method, workers)
            rows += scan
            finished = [row for row in scan if row.ok]
            if finished:
                best = min(finished, key=lambda row: row.edd_hat)
                rows.append(replace(best, detector=OPT_LABEL))
    return rows


def optimal_scan_window(rows: Sequence[ComparisonRow], gamma: float) -> Optional[int]:
    """The window of the `subspace_cusum_opt` row for `gamma`, if the table has one."""
    for row in rows:
        if row.detector == OPT_LABEL and row.gamma == gamma:
            return row.w
    return None

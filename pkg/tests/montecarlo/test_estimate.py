import logging

import numpy as np
import pytest

from subcusum.detectors.detector import DetectorKind
from subcusum.model.scenario import Scenario
from subcusum.montecarlo.estimate import estimate_arl, estimate_edd
from subcusum.montecarlo.replication import Regime, simulate_paths, summarize
from subcusum.montecarlo.spec import CalibrationSpec, DetectorConfig
from subcusum.tuning.optimal import kl_number
from subcusum.utils.helpers import basis_vector


@pytest.fixture
def exact():
    return DetectorConfig(
        DetectorKind.EXACT_CUSUM, Scenario.emerging(5, 1.0, 1.0, basis_vector(5, 0))
    )


def test_unreachable_threshold_is_fully_censored(exact, caplog):
    spec = CalibrationSpec(20.0, reps=100, horizon_cap=50)
    with caplog.at_level(logging.WARNING, logger="subcusum.montecarlo.estimate"):
        estimate = estimate_arl(exact, 1e9, spec)
    assert estimate.censored_frac == 1.0
    assert estimate.mean == 50.0
    assert estimate.stderr == 0.0
    assert not estimate.reliable
    assert "horizon cap" in caplog.text


def test_reliable_estimate_does_not_warn(exact, caplog):
    spec = CalibrationSpec(20.0, reps=100)
    with caplog.at_level(logging.WARNING, logger="subcusum.montecarlo.estimate"):
        estimate = estimate_edd(exact, 3.0, spec)
    assert estimate.censored_frac == 0.0
    assert caplog.text == ""


def test_estimates_are_reproducible(exact):
    spec = CalibrationSpec(20.0, reps=100, master_seed=3)
    assert estimate_arl(exact, 2.0, spec) == estimate_arl(exact, 2.0, spec)
    assert estimate_arl(exact, 2.0, spec) != estimate_arl(exact, 2.0, spec.with_seed(4))


def test_workers_do_not_change_estimates(exact):
    spec = CalibrationSpec(20.0, reps=100, master_seed=1)
    assert estimate_edd(exact, 4.0, spec, workers=2) == estimate_edd(exact, 4.0, spec, workers=1)


def test_estimate_agrees_with_records(exact):
    spec = CalibrationSpec(20.0, reps=100, master_seed=2)
    paths = simulate_paths(exact, Regime.PRE, 3.0, spec.cap, 2, range(100))
    assert estimate_arl(exact, 3.0, spec) == summarize(paths, 3.0, spec.cap)


def test_detection_is_faster_than_false_alarm(exact):
    spec = CalibrationSpec(20.0, reps=200, master_seed=5)
    arl = estimate_arl(exact, 4.0, spec)
    edd = estimate_edd(exact, 4.0, spec)
    assert edd.mean < arl.mean
    assert edd.reps == arl.reps == 200


def test_delay_law(exact):
    b = 9.21
    edd = estimate_edd(exact, b, CalibrationSpec(1e4, reps=2000, master_seed=0))
    assert edd.mean == pytest.approx(b / kl_number(1.0), rel=0.15)
    assert edd.censored_frac == 0.0


def test_delay_doubles_with_the_threshold(exact):
    spec = CalibrationSpec(1e4, reps=500, master_seed=2)
    short = estimate_edd(exact, 9.21, spec)
    long = estimate_edd(exact, 18.42, spec)
    assert 1.7 <= long.mean / short.mean <= 2.3


@pytest.mark.slow
def test_false_alarm_law(exact):
    spec = CalibrationSpec(1e4, reps=2000, master_seed=0)
    paths = simulate_paths(exact, Regime.PRE, 8.0, spec.cap, 0, range(spec.reps))
    levels = [4.0, 6.0, 8.0]
    arls = [summarize(paths, b, spec.cap).mean for b in levels]
    slope = np.polyfit(levels, np.log(arls), 1)[0]
    assert 0.85 <= slope <= 1.15

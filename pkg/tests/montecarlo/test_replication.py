import numpy as np
import pytest

from subcusum.detectors.detector import DetectorKind, run_detector
from subcusum.model.scenario import Scenario, iter_stream
from subcusum.montecarlo.replication import (
    Regime,
    ReplicationPath,
    extend_paths,
    simulate_path,
    simulate_paths,
    summarize,
)
from subcusum.montecarlo.spec import DetectorConfig
from subcusum.utils.helpers import basis_vector, replication_rng


@pytest.fixture
def scenario():
    return Scenario.emerging(5, 1.0, 1.0, basis_vector(5, 0))


@pytest.fixture
def exact(scenario):
    return DetectorConfig(DetectorKind.EXACT_CUSUM, scenario)


@pytest.fixture
def subspace(scenario):
    return DetectorConfig(DetectorKind.SUBSPACE_CUSUM, scenario, w=12)


def _flat(scenario, seed, index):
    return (x for block in iter_stream(scenario, replication_rng(seed, index)) for x in block)


def _same(first, second):
    return (
        np.array_equal(first.times, second.times)
        and np.array_equal(first.values, second.values)
        and first.length == second.length
        and first.censored == second.censored
    )


def test_stopping_time_from_records():
    path = ReplicationPath(np.array([3, 7, 12]), np.array([0.5, 2.0, 4.0]), 4.0, 12, False)
    assert path.stopping_time(0.2, 100) == (3, False)
    assert path.stopping_time(0.5, 100) == (3, False)
    assert path.stopping_time(1.0, 100) == (7, False)
    assert path.stopping_time(4.0, 100) == (12, False)
    with pytest.raises(ValueError):
        path.stopping_time(5.0, 100)


def test_censored_path_stops_at_cap():
    path = ReplicationPath(np.array([3]), np.array([0.5]), 9.0, 50, True)
    assert path.stopping_time(0.4, 50) == (3, False)
    assert path.stopping_time(1e9, 50) == (50, True)


@pytest.mark.parametrize("detector", ["exact", "subspace"])
def test_path_matches_direct_run(request, scenario, detector):
    config = request.getfixturevalue(detector)
    path = simulate_path(config, Regime.POST, 6.0, 5000, 11, 3)
    assert not path.censored
    assert np.all(np.diff(path.values) > 0)
    assert np.all(np.diff(path.times) > 0)
    for b in (1.0, 3.0, 6.0):
        report = run_detector(config.build(), _flat(scenario, 11, 3), b, 5000)
        assert report.stopped
        assert path.stopping_time(b, 5000) == (report.effective_time, False)


def test_pre_change_path_is_censored_at_cap(exact):
    path = simulate_path(exact, Regime.PRE, 1e9, 40, 0, 0)
    assert path.censored
    assert path.length == 40
    assert path.stopping_time(1e9, 40) == (40, True)


def test_paths_depend_on_seed_and_index_only(exact):
    paths = simulate_paths(exact, Regime.POST, 5.0, 5000, 4, [2, 0, 1])
    again = [simulate_path(exact, Regime.POST, 5.0, 5000, 4, i) for i in (2, 0, 1)]
    assert all(_same(a, b) for a, b in zip(paths, again))
    other = simulate_path(exact, Regime.POST, 5.0, 5000, 5, 2)
    assert not _same(paths[0], other)


def test_worker_pool_preserves_results(subspace):
    serial = simulate_paths(subspace, Regime.PRE, 4.0, 400, 7, range(12), workers=1)
    pooled = simulate_paths(subspace, Regime.PRE, 4.0, 400, 7, range(12), workers=2)
    assert all(_same(a, b) for a, b in zip(serial, pooled))


def test_extend_paths_equals_direct_simulation(exact):
    low = simulate_paths(exact, Regime.PRE, 2.0, 3000, 1, range(20))
    high = extend_paths(low, exact, Regime.PRE, 5.0, 3000, 1)
    direct = simulate_paths(exact, Regime.PRE, 5.0, 3000, 1, range(20))
    for extended, fresh in zip(high, direct):
        if extended.censored and extended.level == 2.0:
            assert fresh.censored
        else:
            assert _same(extended, fresh)


def test_summarize():
    paths = [
        ReplicationPath(np.array([2, 5]), np.array([1.0, 3.0]), 3.0, 5, False),
        ReplicationPath(np.array([4]), np.array([3.5]), 3.0, 4, False),
        ReplicationPath(np.array([1]), np.array([0.2]), 3.0, 10, True),
    ]
    estimate = summarize(paths, 3.0, 10)
    assert estimate.mean == pytest.approx((5 + 4 + 10) / 3)
    assert estimate.censored_frac == pytest.approx(1 / 3)
    assert estimate.reps == 3
    assert estimate.stderr == pytest.approx(np.std([5, 4, 10], ddof=1) / np.sqrt(3))
    assert summarize(paths, 1.0, 10).mean == pytest.approx((2 + 4 + 10) / 3)

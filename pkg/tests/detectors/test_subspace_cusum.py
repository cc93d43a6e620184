import math

import numpy as np
import pytest

from subcusum.detectors.exact_cusum import CusumState, cusum_step
from subcusum.detectors.subspace_cusum import (
    SubspaceCusum,
    SubspaceCusumState,
    subspace_cusum_step,
)
from subcusum.eigen.sliding_window import SlidingWindowCov
from subcusum.model.spiked_model import SpikedModel
from subcusum.tuning.optimal import optimal_drift
from subcusum.utils.helpers import basis_vector


@pytest.fixture
def model():
    return SpikedModel(5, 1.0, 1.0, basis_vector(5, 2))


def test_warm_up_emits_nothing(model):
    detector = SubspaceCusum(5, 10, 1.2)
    x = model.sample(11, 0)
    for v in x[:10]:
        assert detector.update(v) is None
    assert detector.samples_seen == 10
    assert detector.last_update is None
    update = detector.update(x[10])
    assert update.t == 1
    assert detector.samples_seen == 11
    assert detector.lookahead == 10


def test_statistic_uses_future_window_only(mocker, model):
    """The eigenvector for sample t is computed from samples t+1..t+w."""
    w = 4
    x = model.sample(w + 1, 1)
    spy = mocker.spy(SlidingWindowCov, "push")
    state = SubspaceCusumState(drift_d=1.0, window=SlidingWindowCov(5, w), eigen_method="eigh")
    for v in x[:w]:
        state, update = subspace_cusum_step(state, v)
        assert update is None
    state, update = subspace_cusum_step(state, x[w])
    assert spy.call_count == w + 1
    assert np.array_equal(state.window.contents(), x[1:])
    expected_u = np.linalg.eigh(x[1:].T @ x[1:])[1][:, -1]
    assert update.increment == pytest.approx(float(expected_u @ x[0]) ** 2 - 1.0)


@pytest.mark.parametrize("method", ["power", "eigh"])
def test_forced_direction_reproduces_cusum(method):
    """On a stream along e1 the estimate is e1 and the recursion is plain CUSUM on x_1^2 - d."""
    rng = np.random.default_rng(2)
    scales = rng.uniform(0.5, 2.0, 60)
    stream = np.outer(scales, basis_vector(3, 0))
    d, w = 1.1, 5
    detector = SubspaceCusum(3, w, d, eigen_method=method)
    state = CusumState()
    updates = [detector.update(v) for v in stream]
    for t, update in enumerate(updates[w:], start=1):
        state = cusum_step(state, scales[t - 1] ** 2 - d)
        assert update.t == t
        assert update.statistic == pytest.approx(state.s)


def test_zero_increment_keeps_clamped_statistic():
    stream = np.outer([1.0] * 8, basis_vector(2, 1))
    detector = SubspaceCusum(2, 3, 1.0)
    statistics = [u.statistic for u in map(detector.update, stream) if u is not None]
    assert statistics == [0.0] * 5


def test_dimension_mismatch():
    state = SubspaceCusumState(drift_d=1.0, window=SlidingWindowCov(3, 2))
    with pytest.raises(ValueError):
        subspace_cusum_step(state, np.ones(4))
    with pytest.raises(ValueError):
        SubspaceCusum(3, 2, 1.0).update(np.ones(2))


def test_reset(model):
    detector = SubspaceCusum(5, 6, 1.3)
    x = model.sample(20, 3)
    first = [detector.update(v) for v in x]
    detector.reset()
    assert detector.samples_seen == 0
    assert detector.statistic == 0.0
    assert [detector.update(v) for v in x] == first


def test_sign_of_estimate_does_not_matter():
    x = SpikedModel(5, 1.0, 9.0, basis_vector(5, 3)).sample(40, 4)
    a = SubspaceCusum(5, 8, 1.2, eigen_method="power")
    b = SubspaceCusum(5, 8, 1.2, eigen_method="eigh")
    for v in x:
        ua, ub = a.update(v), b.update(v)
        if ua is not None:
            assert ua.statistic == pytest.approx(ub.statistic, abs=1e-6)


def _increments(model: SpikedModel, w: int, n: int, seed: int, drift: float = 0.0):
    detector = SubspaceCusum(model.k, w, drift, eigen_method="eigh")
    return np.array(
        [u.increment for u in map(detector.update, model.sample(n + w, seed)) if u is not None]
    )


def test_increment_sign_with_optimal_drift():
    w = 200
    d = optimal_drift(5, 1.0, 1.0, w)
    pre = _increments(SpikedModel.noise(5), w, 5000, 5, d)
    post = _increments(SpikedModel(5, 1.0, 1.0, basis_vector(5, 0)), w, 5000, 6, d)
    assert np.mean(pre) < 0 < np.mean(post)


def test_pre_change_mean():
    squares = _increments(SpikedModel.noise(5), 50, 20_000, 7)
    # (u_hat^T x)^2 is chi-square with one degree of freedom, variance 2
    assert np.mean(squares) == pytest.approx(1.0, abs=4 * math.sqrt(2 / len(squares)))


@pytest.mark.slow
def test_pre_change_mean_full_scale():
    squares = _increments(SpikedModel.noise(5), 50, 100_000, 8)
    assert np.mean(squares) == pytest.approx(1.0, abs=0.01)


def test_estimate_is_independent_of_current_sample():
    w = 20
    detector = SubspaceCusum(5, w, 0.0, eigen_method="eigh")
    squares, traces = [], []
    for v in SpikedModel.noise(5).sample(20_000 + w, 9):
        update = detector.update(v)
        if update is not None:
            squares.append(update.increment)
            traces.append(np.trace(detector.state.window.scatter))
    r = np.corrcoef(squares, traces)[0, 1]
    assert abs(r) < 4 / math.sqrt(len(squares))


def test_post_change_mean_of_projection():
    """E_0[(u_hat^T x)^2] = sigma2 (1 + rho (u_hat^T u)^2), averaged over windows, is close to 1.96."""
    k, w = 5, 200
    u = basis_vector(k, 0)
    model = SpikedModel(k, 1.0, 1.0, u)
    rng = np.random.default_rng(10)
    means = []
    for _ in range(2000):
        scatter = SlidingWindowCov.from_samples(model.sample(w, rng)).scatter
        u_hat = np.linalg.eigh(scatter)[1][:, -1]
        means.append(1 + (u_hat @ u) ** 2)
    assert np.mean(means) == pytest.approx(1.96, abs=0.02)

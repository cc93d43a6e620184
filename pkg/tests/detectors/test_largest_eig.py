import numpy as np
import pytest

from subcusum.detectors.largest_eig import LargestEig, largest_eig_statistic
from subcusum.eigen.sliding_window import SlidingWindowCov
from subcusum.model.spiked_model import SpikedModel
from subcusum.utils.helpers import basis_vector
from subcusum.utils.types import WindowNotFullError


def test_rank_one_window():
    window = SlidingWindowCov.from_samples(np.tile(basis_vector(4, 0), (7, 1)))
    assert largest_eig_statistic(window) == pytest.approx(1.0)


def test_partial_window_is_rejected():
    window = SlidingWindowCov(3, 5)
    window.push(np.ones(3))
    with pytest.raises(WindowNotFullError):
        largest_eig_statistic(window)


def test_matches_dense_solver():
    rng = np.random.default_rng(0)
    for _ in range(20):
        samples = rng.standard_normal((12, 4))
        expected = np.linalg.eigvalsh(samples.T @ samples)[-1] / 12
        window = SlidingWindowCov.from_samples(samples)
        assert abs(largest_eig_statistic(window) - expected) <= 1e-8 * expected


def _mean_noise_statistic(w: int, windows: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    noise = SpikedModel.noise(5)
    return np.mean(
        [largest_eig_statistic(SlidingWindowCov.from_samples(noise.sample(w, rng))) for _ in range(windows)]
    )


def test_noise_statistic_is_biased_upward_and_decreases_in_w():
    at_200 = _mean_noise_statistic(200, 1000, 1)
    assert 1.0 < at_200 < 1.5
    assert _mean_noise_statistic(50, 1000, 2) > at_200


def test_detector_emits_after_window():
    detector = LargestEig(3, 4)
    x = SpikedModel.noise(3).sample(6, 3)
    updates = [detector.update(v) for v in x]
    assert updates[:4] == [None] * 4
    assert [u.t for u in updates[4:]] == [1, 2]
    assert updates[5].statistic == pytest.approx(np.linalg.eigvalsh(x[2:].T @ x[2:])[-1] / 4)
    assert detector.samples_seen == 6
    assert detector.lookahead == 4
    assert detector.w == 4

import math

import numpy as np
import pytest

from subcusum.eigen.sliding_window import SlidingWindowCov
from subcusum.eigen.top_eigen import (
    cold_start,
    eigenvector_error_cov,
    power_iteration,
    top_eigenvector,
    unnormalized_eigenvector,
)
from subcusum.model.spiked_model import SpikedModel
from subcusum.utils.helpers import basis_vector
from subcusum.utils.types import DomainError, InfeasibleWindowError, WindowNotFullError


@pytest.fixture
def spiked_window():
    model = SpikedModel(5, 1.0, 2.0, np.ones(5) / math.sqrt(5))
    return SlidingWindowCov.from_samples(model.sample(50, 4))


@pytest.mark.parametrize("method", ["power", "eigh"])
def test_diagonal_scatter(method):
    window = SlidingWindowCov.from_samples(np.diag([math.sqrt(3), 1.0, 1.0]))
    estimate = top_eigenvector(window, method=method)
    assert estimate.converged
    assert np.allclose(estimate.u_hat, basis_vector(3, 0), atol=1e-7)
    assert estimate.lambda_hat == pytest.approx(3.0, rel=1e-10)


@pytest.mark.parametrize("method", ["power", "eigh"])
def test_rank_one_scatter(method):
    window = SlidingWindowCov.from_samples(np.array([[3.0, 4.0]]))
    estimate = top_eigenvector(window, method=method)
    assert np.allclose(estimate.u_hat, [0.6, 0.8], atol=1e-10)
    assert estimate.lambda_hat == pytest.approx(25.0)


def test_power_iteration_matches_dense_solver(spiked_window):
    estimate = top_eigenvector(spiked_window)
    eigvals, eigvecs = np.linalg.eigh(spiked_window.scatter)
    assert estimate.converged
    assert abs(np.linalg.norm(estimate.u_hat) - 1) < 1e-12
    assert abs(estimate.lambda_hat - eigvals[-1]) <= 1e-8 * eigvals[-1]
    assert abs(estimate.u_hat @ eigvecs[:, -1]) >= 1 - 1e-8
    residual = spiked_window.scatter @ estimate.u_hat - estimate.lambda_hat * estimate.u_hat
    assert np.linalg.norm(residual) <= 1e-8 * estimate.lambda_hat


def test_sign_convention(spiked_window):
    u_hat = top_eigenvector(spiked_window).u_hat
    assert u_hat[np.argmax(np.abs(u_hat))] > 0
    assert np.allclose(u_hat, top_eigenvector(spiked_window, method="eigh").u_hat, atol=1e-7)


def test_warm_and_cold_start_agree(spiked_window):
    cold = top_eigenvector(spiked_window)
    start = cold.u_hat + 0.3 * basis_vector(5, 1)
    warm = top_eigenvector(spiked_window, start=start / np.linalg.norm(start))
    assert abs(cold.u_hat @ warm.u_hat) >= 1 - 1e-6


def test_isotropic_scatter_returns_start():
    window = SlidingWindowCov.from_samples(2.0 * np.eye(4))
    estimate = top_eigenvector(window)
    assert estimate.converged
    assert estimate.iterations == 1
    assert np.allclose(estimate.u_hat, cold_start(4))


def test_unconverged_iteration_returns_last_iterate():
    matrix = np.diag([1.0, 0.999999, 0.5])
    estimate = power_iteration(matrix, cold_start(3), tol=1e-12, max_iter=3)
    assert not estimate.converged
    assert estimate.iterations == 3
    assert abs(np.linalg.norm(estimate.u_hat) - 1) < 1e-12


def test_top_eigenvector_errors():
    window = SlidingWindowCov(2, 3)
    window.push([1.0, 0.0])
    with pytest.raises(WindowNotFullError):
        top_eigenvector(window)
    full = SlidingWindowCov.from_samples(np.eye(2))
    with pytest.raises(ValueError):
        top_eigenvector(full, tol=0.0)
    with pytest.raises(ValueError):
        top_eigenvector(full, method="lanczos")


def test_cold_start():
    start = cold_start(4)
    assert abs(np.linalg.norm(start) - 1) < 1e-12
    assert start[0] > start[1] == start[2] == start[3]


def test_unnormalized_eigenvector(spiked_window):
    estimate = top_eigenvector(spiked_window)
    u = np.ones(5) / math.sqrt(5)
    omega = unnormalized_eigenvector(estimate, u)
    assert omega @ u == pytest.approx(1.0)
    assert (omega - u) @ u == pytest.approx(0.0, abs=1e-12)


def test_eigenvector_error_cov():
    model = SpikedModel(2, 1.0, 1.0, basis_vector(2, 0))
    assert np.allclose(eigenvector_error_cov(model, 100), np.diag([0.0, 0.02]))

    model = SpikedModel(5, 2.0, 3.0, np.ones(5) / math.sqrt(5))
    cov = eigenvector_error_cov(model, 40)
    assert np.allclose(cov @ model.u, 0)


def test_eigenvector_error_cov_errors():
    with pytest.raises(DomainError):
        eigenvector_error_cov(SpikedModel.noise(3), 100)
    # w_min = 4 * 2 / 1 = 8
    with pytest.raises(InfeasibleWindowError):
        eigenvector_error_cov(SpikedModel(5, 1.0, 1.0, basis_vector(5, 0)), 8)


def _clt_frobenius_error(n_windows: int, seed: int) -> float:
    k, w = 5, 500
    u = basis_vector(k, 0)
    model = SpikedModel(k, 1.0, 1.0, u)
    rng = np.random.default_rng(seed)
    errors = np.empty((n_windows, k))
    for i in range(n_windows):
        window = SlidingWindowCov.from_samples(model.sample(w, rng))
        estimate = top_eigenvector(window, method="eigh")
        errors[i] = math.sqrt(w) * (unnormalized_eigenvector(estimate, u) - u)
    empirical = errors.T @ errors / n_windows
    theory = w * eigenvector_error_cov(model, w)
    return np.linalg.norm(empirical - theory) / np.linalg.norm(theory)


def test_eigenvector_clt():
    assert _clt_frobenius_error(2000, 0) < 0.15


@pytest.mark.slow
def test_eigenvector_clt_full_scale():
    assert _clt_frobenius_error(10_000, 1) < 0.10

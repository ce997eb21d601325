import numpy as np
import pytest
from hypothesis import given, strategies as st

from melasso.errors import ConfigError, ValidationError
from melasso.lasso import (
    LassoConfig, kkt_residual_naive, lambda_grid, lambda_max, lasso_path, naive_lasso,
)
from oracles import lasso_enumerate


def _data(seed, n=40, p=8, s0=3):
    r = np.random.default_rng(seed)
    W = r.standard_normal((n, p))
    b = np.zeros(p)
    b[:s0] = r.normal(0, 2, s0)
    y = W @ b + 0.5 * r.standard_normal(n)
    return W, y


def test_zero_above_lambda_max():
    W, y = _data(0)
    lm = lambda_max(W, y)
    assert lm == pytest.approx(2 / len(y) * np.max(np.abs(W.T @ y)))
    fit = naive_lasso(W, y, lm)
    assert fit.nnz == 0 and fit.converged
    assert kkt_residual_naive(W, y, fit) == 0.0
    assert naive_lasso(W, y, 3 * lm).nnz == 0


def test_orthonormal_design_soft_threshold():
    n, p = 64, 6
    r = np.random.default_rng(1)
    Qm, _ = np.linalg.qr(r.standard_normal((n, p)))
    W = Qm * np.sqrt(n)  # W'W / n = I
    y = r.standard_normal(n) * 3
    lam = 0.7
    z = W.T @ y / n
    expected = np.sign(z) * np.maximum(np.abs(z) - lam / 2, 0)
    fit = naive_lasso(W, y, lam)
    np.testing.assert_allclose(fit.beta, expected, atol=1e-8)


def test_lambda_zero_least_squares():
    W, y = _data(2, n=50, p=5)
    fit = naive_lasso(W, y, 0.0, LassoConfig(tol=1e-10))
    ls = np.linalg.lstsq(W, y, rcond=None)[0]
    np.testing.assert_allclose(fit.beta, ls, atol=1e-8)


@pytest.mark.parametrize("seed", range(6))
def test_matches_enumeration_oracle(seed):
    W, y = _data(seed, n=30, p=5)
    lam = 0.3 * lambda_max(W, y)
    fit = naive_lasso(W, y, lam, LassoConfig(tol=1e-10))
    np.testing.assert_allclose(fit.beta, lasso_enumerate(W, y, lam), atol=1e-7)


def test_kkt_residual_detects_perturbation():
    W, y = _data(3)
    lam = 0.2 * lambda_max(W, y)
    fit = naive_lasso(W, y, lam)
    assert kkt_residual_naive(W, y, fit) <= 1e-7
    j = fit.active_set[0]
    fit.beta[j] += 0.1
    assert kkt_residual_naive(W, y, fit) > 1e-3


def test_objective_monotone_across_sweeps():
    W, y = _data(4, n=60, p=100)
    fit = naive_lasso(W, y, 0.05 * lambda_max(W, y))
    h = fit.history
    assert np.all(np.diff(h) <= 1e-12 * np.abs(h[:-1]))


def test_path_single_lambda_max():
    W, y = _data(5)
    fits = lasso_path(W, y, [lambda_max(W, y)])
    assert len(fits) == 1 and fits[0].nnz == 0


def test_path_matches_cold_start():
    W, y = _data(6, n=40, p=60)
    grid = lambda_grid(W, y, 30)
    path = lasso_path(W, y, grid)
    for lam, f in zip(grid[::7], path[::7]):
        cold = naive_lasso(W, y, lam)
        assert np.max(np.abs(cold.beta - f.beta)) <= 1e-6


def test_path_active_set_monotone_orthonormal():
    n, p = 64, 10
    r = np.random.default_rng(7)
    W = np.linalg.qr(r.standard_normal((n, p)))[0] * np.sqrt(n)
    y = W @ r.normal(0, 1, p) + r.standard_normal(n)
    sizes = [f.nnz for f in lasso_path(W, y, lambda_grid(W, y, 40))]
    assert all(a <= b for a, b in zip(sizes, sizes[1:]))


def test_path_grid_must_decrease():
    W, y = _data(8)
    with pytest.raises(ConfigError):
        lasso_path(W, y, [0.1, 0.2])


def test_lambda_grid_shape():
    W, y = _data(9, n=20, p=50)
    g = lambda_grid(W, y, 100)
    assert g.size == 100 and g[0] == pytest.approx(lambda_max(W, y))
    assert g[-1] == pytest.approx(0.01 * g[0])
    assert np.all(np.diff(g) < 0)


def test_validation():
    W, y = _data(10)
    with pytest.raises(ValidationError):
        naive_lasso(W, y[:-1], 0.1)
    W2 = W.copy()
    W2[0, 0] = np.inf
    with pytest.raises(ValidationError):
        naive_lasso(W2, y, 0.1)
    with pytest.raises((ConfigError, ValidationError)):
        naive_lasso(W, y, -1.0)


def test_nonconvergence_is_flagged_not_raised():
    W, y = _data(11, n=40, p=80)
    fit = naive_lasso(W, y, 1e-4 * lambda_max(W, y), LassoConfig(max_iter=2))
    assert not fit.converged


@given(st.integers(0, 10_000), st.sampled_from([20, 200]), st.floats(0.01, 0.9))
def test_converged_fits_satisfy_kkt(seed, p, frac):
    W, y = _data(seed, n=50, p=p, s0=5)
    fit = naive_lasso(W, y, frac * lambda_max(W, y))
    assert fit.converged
    assert kkt_residual_naive(W, y, fit) <= 1e-6
    np.testing.assert_array_equal(fit.active_set, np.flatnonzero(fit.beta))

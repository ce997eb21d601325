import numpy as np
import pytest
from hypothesis import given, strategies as st

from melasso.covariance import CovarianceSpec
from melasso.errors import ConfigError
from melasso.simulate import TrueModel, replicate_seed, simulate_linear
from melasso.tuning import CvPlan, cv_select, elbow_grid, elbow_select, fold_assignment, kappa_grid


def _data(seed, n=60, p=30):
    r = np.random.default_rng(seed)
    W = r.standard_normal((n, p))
    b = np.zeros(p)
    b[:3] = [2.0, -1.5, 1.0]
    return W, W @ b + 0.5 * r.standard_normal(n)


def test_single_value_grid():
    W, y = _data(0)
    res = cv_select("naive-lasso", W, y, CvPlan(grid=[0.3], folds=5))
    assert res.best == 0.3 and res.curve.shape == (1,)
    res = cv_select("corrected-ccl", W, y, CvPlan(grid=[2.0], folds=5), sigma_uu=np.zeros((30, 30)))
    assert res.best == 2.0


def test_curve_finite_and_aligned():
    W, y = _data(1)
    grid = kappa_grid(10.0, 20)
    res = cv_select("corrected-ccl", W, y, CvPlan(grid=grid, folds=5, seed=3), sigma_uu=0.1 * np.eye(30))
    assert res.curve.shape == grid.shape and np.all(np.isfinite(res.curve))
    assert res.best in grid


def test_signal_is_recovered_by_cv():
    W, y = _data(2, n=100)
    res = cv_select("naive-lasso", W, y, CvPlan(grid=np.geomspace(2, 0.01, 30), folds=5))
    assert res.best < 1.0


def test_pure_noise_selects_small_kappa():
    # beta0 = 0: the held-out loss only grows with the constraint radius
    hits = 0
    m = TrueModel(beta0=np.zeros(50), sigma_eps=1.0, sigma_uu=CovarianceSpec.identity(50, 0.2))
    grid = kappa_grid(2.0, 100)
    for r in range(50):
        ss = replicate_seed(11, r)
        ds = simulate_linear(m, 100, seed=ss)
        res = cv_select("corrected-ccl", ds.W, ds.y, CvPlan(grid=grid, folds=10, seed=r), sigma_uu=0.2 * np.eye(50))
        hits += res.best_index < 10
    assert hits >= 40


def test_zero_variance_fold_warns_and_is_skipped():
    W, y = _data(3, n=20, p=5)
    y = np.zeros(20)
    y[0] = 1.0
    with pytest.warns(UserWarning, match="zero variance"):
        res = cv_select("naive-lasso", W, y, CvPlan(grid=[0.1, 0.01], folds=4))
    assert res.folds_used == 1


def test_kappa_grid_spacing():
    R = 7.3
    g = kappa_grid(R)
    assert g.size == 100 and g[0] == pytest.approx(1e-3 * R) and g[-1] == R
    np.testing.assert_allclose(np.diff(g), (R - 1e-3 * R) / 99, rtol=1e-9)


@given(st.integers(2, 300), st.integers(2, 12), st.integers(0, 2**31))
def test_fold_sizes_balanced_and_deterministic(n, k, seed):
    if n < k:
        with pytest.raises(ConfigError):
            fold_assignment(n, k, seed)
        return
    a = fold_assignment(n, k, seed)
    sizes = np.bincount(a, minlength=k)
    assert sizes.max() - sizes.min() <= 1 and sizes.sum() == n
    np.testing.assert_array_equal(a, fold_assignment(n, k, seed))


def test_elbow_constant_counts_gives_largest():
    g = elbow_grid(1.0)
    ch = elbow_select(g, np.full(g.size, 4))
    assert ch.kappa == g[0] and not ch.low_confidence


def test_elbow_plateau_fixture():
    scale = 3.7
    g = elbow_grid(scale)  # 3.0, 2.9, ..., 0.1 times scale
    mult = g / scale
    nnz = np.where(mult > 1.5 + 1e-9, 11 + np.round((mult - 1.5) * 20).astype(int), 0)
    flat = (mult <= 1.5 + 1e-9) & (mult >= 0.5 - 1e-9)
    nnz[flat] = np.where(np.arange(flat.sum()) % 2 == 0, 11, 10)
    tail = mult < 0.5 - 1e-9
    nnz[tail] = np.linspace(8, 1, tail.sum()).round().astype(int)
    ch = elbow_select(g, nnz)
    assert ch.kappa == pytest.approx(1.5 * scale, rel=1e-12)
    assert not ch.low_confidence


def test_elbow_without_plateau_is_low_confidence():
    g = elbow_grid(1.0)
    nnz = 3 * np.arange(g.size)
    ch = elbow_select(g, nnz)
    assert ch.low_confidence and ch.kappa in g


def test_elbow_short_grid():
    with pytest.raises(ConfigError):
        elbow_select([3.0, 2.0, 1.0], [1, 1, 1])


@given(st.lists(st.integers(0, 40), min_size=4, max_size=40))
def test_elbow_output_in_grid(nnz):
    g = np.linspace(5, 0.1, len(nnz))
    ch = elbow_select(g, nnz)
    assert ch.kappa == g[ch.index]


def test_corrected_loss_subtracts_quadratic_term():
    W, y = _data(4)
    grid = kappa_grid(6.0, 12)
    S = 0.3 * np.eye(30)
    a = cv_select("corrected-ccl", W, y, CvPlan(grid=grid, folds=5, seed=1), sigma_uu=S)
    b = cv_select("corrected-ccl", W, y, CvPlan(grid=grid, folds=5, seed=1, loss="corrected"), sigma_uu=S)
    assert np.all(b.curve <= a.curve) and np.all(np.diff(a.curve - b.curve)[3:] >= -1e-12)
    zero = np.zeros((30, 30))
    c = cv_select("corrected-ccl", W, y, CvPlan(grid=grid, folds=5, seed=1), sigma_uu=zero)
    d = cv_select("corrected-ccl", W, y, CvPlan(grid=grid, folds=5, seed=1, loss="corrected"), sigma_uu=zero)
    np.testing.assert_array_equal(c.curve, d.curve)
    with pytest.raises(ConfigError):
        CvPlan(grid=grid, loss="absolute")

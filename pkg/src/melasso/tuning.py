"""Tuning-parameter selection: K-fold CV for the linear solvers, grid
builders, and a plateau detector for the elbow rule."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .corrected import CorrectedConfig, CorrectedProblem
from .errors import ConfigError
from .lasso import LassoConfig, _check_data, _Gram, _solve
from .simulate import as_generator

SOLVERS = ("naive-lasso", "corrected-ccl")
LOSSES = ("squared-error", "corrected")


def fold_assignment(n: int, folds: int, seed) -> np.ndarray:
    """Fold index per observation: a seeded permutation of 0..n-1 taken mod K."""
    if folds < 2:
        raise ConfigError(f"need at least 2 folds, got {folds}")
    if n < folds:
        raise ConfigError(f"cannot split {n} observations into {folds} folds")
    perm = as_generator(seed).permutation(n)
    out = np.empty(n, dtype=int)
    out[perm] = np.arange(n) % folds
    return out


@dataclass
class CvPlan:
    grid: np.ndarray
    folds: int = 10
    seed: int = 0
    loss: str = "squared-error"
    assignment: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.grid = np.atleast_1d(np.asarray(self.grid, dtype=float))
        if self.grid.size == 0:
            raise ConfigError("tuning grid is empty")
        if self.loss not in LOSSES:
            raise ConfigError(f"CV loss must be one of {LOSSES}, got {self.loss!r}")

    def assign(self, n: int) -> np.ndarray:
        if self.assignment is None or self.assignment.size != n:
            self.assignment = fold_assignment(n, self.folds, self.seed)
        return self.assignment


@dataclass
class CvResult:
    best: float
    best_index: int
    grid: np.ndarray
    curve: np.ndarray
    folds_used: int


def kappa_grid(radius: float, num: int = 100, lo_frac: float = 1e-3) -> np.ndarray:
    """`num` equally spaced constraint values on [lo_frac * R, R]."""
    if not radius > 0:
        raise ConfigError(f"radius must be > 0, got {radius}")
    return np.linspace(lo_frac * radius, radius, num)


def elbow_grid(scale: float, hi: float = 3.0, lo: float = 0.1, step: float = 0.1) -> np.ndarray:
    """Descending grid hi*scale, (hi-step)*scale, ..., lo*scale."""
    k = int(round((hi - lo) / step))
    return scale * (hi - step * np.arange(k + 1))


def _fit_path(solver, W_tr, y_tr, sigma_uu, order, grid, lasso_config, corrected_config):
    """Warm-started coefficient vectors for grid[order] (order runs from sparse to dense)."""
    p = W_tr.shape[1]
    betas = np.zeros((grid.size, p))
    beta = np.zeros(p)
    if solver == "naive-lasso":
        gram = _Gram(W_tr, y_tr)
        for i in order:
            beta = _solve(gram, grid[i], beta, lasso_config).beta
            betas[i] = beta
    else:
        prob = CorrectedProblem(W_tr, y_tr, sigma_uu)
        for i in order:
            beta = prob.solve(grid[i], 0.0, corrected_config, beta)[0]
            betas[i] = beta
    return betas


def cv_select(solver: str, W, y, plan: CvPlan, sigma_uu=None,
              lasso_config: LassoConfig | None = None,
              corrected_config: CorrectedConfig | None = None) -> CvResult:
    """K-fold CV over `plan.grid`; returns the minimizer of the mean held-out loss.

    loss "squared-error": (1/n_k)||y_k - W_k b||^2. loss "corrected": the same
    minus b' sigma_uu b, an unbiased estimate of the error-free prediction
    loss; it needs sigma_uu.

    Fits along the grid are warm-started from the sparsest end. Ties go to
    the sparser model (larger lambda, smaller kappa). Folds whose held-out
    response has zero variance are skipped with a warning.
    """
    if solver not in SOLVERS:
        raise ConfigError(f"solver must be one of {SOLVERS}, got {solver!r}")
    W, y = _check_data(W, y)
    n, p = W.shape
    grid = plan.grid
    if solver == "corrected-ccl":
        if sigma_uu is None:
            raise ConfigError("corrected-ccl needs sigma_uu")
        if np.any(grid <= 0):
            raise ConfigError("kappa grid must be positive")
        order = np.argsort(grid, kind="stable")
    else:
        if np.any(grid < 0):
            raise ConfigError("lambda grid must be non-negative")
        order = np.argsort(-grid, kind="stable")
    if plan.loss == "corrected" and sigma_uu is None:
        raise ConfigError("the corrected CV loss needs sigma_uu")
    lasso_config = lasso_config or LassoConfig()
    corrected_config = corrected_config or CorrectedConfig()

    assign = plan.assign(n)
    total = np.zeros(grid.size)
    used = 0
    for k in range(plan.folds):
        test = assign == k
        y_te = y[test]
        if np.var(y_te) == 0.0:
            warnings.warn(f"fold {k}: held-out response has zero variance; fold skipped", stacklevel=2)
            continue
        betas = _fit_path(solver, W[~test], y[~test], sigma_uu, order, grid,
                          lasso_config, corrected_config)
        resid = y_te[None, :] - betas @ W[test].T
        loss = np.mean(resid**2, axis=1)
        if plan.loss == "corrected":
            loss -= np.einsum("gi,ij,gj->g", betas, np.asarray(sigma_uu, dtype=float), betas)
        total += loss
        used += 1
    if used == 0:
        raise ConfigError("every CV fold was skipped")
    curve = total / used
    best_val = np.min(curve)
    ties = np.flatnonzero(curve == best_val)
    if solver == "corrected-ccl":
        idx = ties[np.argmin(grid[ties])]
    else:
        idx = ties[np.argmax(grid[ties])]
    return CvResult(best=float(grid[idx]), best_index=int(idx), grid=grid, curve=curve, folds_used=used)


@dataclass
class ElbowChoice:
    kappa: float
    index: int
    low_confidence: bool


def elbow_select(kappa_grid, nnz, flat_tol: int = 1, run: int = 3) -> ElbowChoice:
    """Pick the constraint level where the nonzero-count curve turns flat.

    The grid is descending. Returns the largest kappa_i from which `run`
    consecutive forward differences |nnz_i - nnz_{i+1}| are all <= flat_tol.
    Without such a plateau, returns the kappa with the smallest discrete
    second difference and flags the choice as low-confidence.
    """
    kappa_grid = np.asarray(kappa_grid, dtype=float)
    nnz = np.asarray(nnz)
    if kappa_grid.shape != nnz.shape or kappa_grid.ndim != 1:
        raise ConfigError("kappa grid and nonzero counts must be aligned 1-d sequences")
    if kappa_grid.size < run + 1:
        raise ConfigError(f"elbow rule needs at least {run + 1} grid points, got {kappa_grid.size}")
    if np.any(np.diff(kappa_grid) >= 0):
        raise ConfigError("kappa grid must be strictly decreasing")
    if np.any(nnz < 0) or np.any(nnz != np.round(nnz)):
        raise ConfigError("nonzero counts must be non-negative integers")
    flat = np.abs(np.diff(nnz.astype(float))) <= flat_tol
    for i in range(flat.size - run + 1):
        if np.all(flat[i:i + run]):
            return ElbowChoice(float(kappa_grid[i]), i, False)
    second = nnz[:-2] - 2.0 * nnz[1:-1] + nnz[2:]
    i = int(np.argmin(second)) + 1
    return ElbowChoice(float(kappa_grid[i]), i, True)

"""Naive lasso on the observed design.

Objective: ``(1/n)||y - W b||_2^2 + lam ||b||_1``, minimized by cyclic
coordinate descent with covariance updates. With this scaling the
smallest penalty giving an all-zero solution is ``(2/n)||W'y||_inf``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, ValidationError
from .results import FitResult


@dataclass
class LassoConfig:
    tol: float = 1e-7
    max_iter: int = 100_000


def _check_data(W, y):
    W = np.asarray(W, dtype=float)
    y = np.asarray(y, dtype=float)
    if W.ndim != 2:
        raise ValidationError(f"W must be 2-d, got shape {W.shape}")
    if y.shape != (W.shape[0],):
        raise ValidationError(f"y has shape {y.shape}, expected ({W.shape[0]},)")
    if not (np.all(np.isfinite(W)) and np.all(np.isfinite(y))):
        raise ValidationError("W and y must be finite")
    return W, y


def lambda_max(W, y) -> float:
    W, y = _check_data(W, y)
    return float(2.0 / W.shape[0] * np.max(np.abs(W.T @ y), initial=0.0))


def lambda_grid(W, y, num: int = 100, min_ratio: float | None = None) -> np.ndarray:
    """Log-spaced descending grid from lambda_max, glmnet style.

    min_ratio defaults to 0.01 when n < p and 1e-4 otherwise.
    """
    n, p = np.shape(W)
    if min_ratio is None:
        min_ratio = 0.01 if n < p else 1e-4
    top = lambda_max(W, y)
    if top == 0.0:
        return np.zeros(1)
    return top * np.logspace(0.0, np.log10(min_ratio), num)


class _Gram:
    """Sufficient statistics of (W, y) for the coordinate-descent kernel."""

    def __init__(self, W, y):
        self.n = W.shape[0]
        self.G = np.ascontiguousarray(W.T @ W)
        self.c = W.T @ y
        self.yy = float(y @ y)


def _solve(gram: _Gram, lam: float, beta: np.ndarray, config: LassoConfig) -> FitResult:
    if not lam >= 0:
        raise ConfigError(f"lambda must be >= 0, got {lam}")
    beta = np.array(beta, dtype=float)
    sweeps, converged, hist = _kernels.cd_lasso(
        gram.G, gram.c, gram.yy, float(gram.n), float(lam), beta, float(config.tol), int(config.max_iter)
    )
    return FitResult(
        beta=beta,
        tuning_name="lambda",
        tuning=float(lam),
        iterations=int(sweeps),
        converged=bool(converged),
        objective=float(hist[-1]),
        method="naive",
        history=hist,
        diagnostic="" if converged else f"max_iter={config.max_iter} sweeps reached",
    )


def naive_lasso(W, y, lam: float, config: LassoConfig | None = None, beta_start=None) -> FitResult:
    W, y = _check_data(W, y)
    config = config or LassoConfig()
    start = np.zeros(W.shape[1]) if beta_start is None else beta_start
    return _solve(_Gram(W, y), lam, start, config)


def lasso_path(W, y, lambdas, config: LassoConfig | None = None) -> list[FitResult]:
    """Warm-started fits along a strictly decreasing penalty grid."""
    W, y = _check_data(W, y)
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.ndim != 1 or lambdas.size == 0:
        raise ConfigError("lambda grid must be a non-empty 1-d sequence")
    if np.any(np.diff(lambdas) >= 0):
        raise ConfigError("lambda grid must be strictly decreasing")
    config = config or LassoConfig()
    gram = _Gram(W, y)
    beta = np.zeros(W.shape[1])
    fits = []
    for lam in lambdas:
        fit = _solve(gram, lam, beta, config)
        beta = fit.beta
        fits.append(fit)
    return fits


def kkt_residual_naive(W, y, fit: FitResult) -> float:
    """Largest violation of the lasso optimality conditions at `fit.beta`.

    With grad = -(2/n) W'(y - W b): active coordinates need
    grad_j + lam sign(b_j) = 0, inactive ones |grad_j| <= lam.
    """
    W, y = _check_data(W, y)
    beta = np.asarray(fit.beta, dtype=float)
    if beta.shape != (W.shape[1],):
        raise ValidationError(f"fit has {beta.size} coefficients, W has {W.shape[1]} columns")
    lam = float(fit.tuning)
    grad = -2.0 / W.shape[0] * (W.T @ (y - W @ beta))
    active = beta != 0
    viol = np.where(active, np.abs(grad + lam * np.sign(beta)), np.abs(grad) - lam)
    return float(max(np.max(viol, initial=0.0), 0.0))

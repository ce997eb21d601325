"""Corrected lasso for linear models with additive measurement error.

The squared-error loss on W is biased by ``b' Sigma_uu b``; subtracting it
gives the corrected loss

    L(b) = (1/n)||y - W b||_2^2 - b' Sigma_uu b

which is non-convex once p > n. Two estimators are built on it:

* constrained (CCL): minimize L over the l1-ball of radius kappa;
* regularized (RCL): minimize L + lam ||b||_1 over the l1-ball of radius R.

Both are solved by projected (composite) gradient descent. The solver
returns one stationary point per starting value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, ContractError, ValidationError
from .lasso import _check_data
from .results import FitResult
from .simulate import as_generator


@dataclass
class CorrectedConfig:
    """Solver options.

    step: "backtracking" (default, starting from 1/Lip) or a fixed float.
    tol: relative parameter change threshold.
    pg_tol: threshold on the gradient-mapping norm, relative to max(1, ||b||).
    divergence_window: consecutive objective increases (fixed step only)
        after which the run is abandoned.
    step_growth: with backtracking, each iteration first tries the previous
        step times this factor (1.0 keeps the step non-increasing).
    """

    step: float | str = "backtracking"
    max_iter: int = 5000
    tol: float = 1e-7
    pg_tol: float = 1e-6
    divergence_window: int = 50
    step_growth: float = 1.5


class CorrectedProblem:
    """Precomputed quadratic form of the corrected loss for one (W, y, Sigma_uu).

    L(b) = yy/n - 2 b'r + b'Q b with Q = W'W/n - Sigma_uu and r = W'y/n.
    Reusing one instance across a tuning grid avoids recomputing Q and the
    Lipschitz bound.
    """

    def __init__(self, W, y, sigma_uu):
        W, y = _check_data(W, y)
        n, p = W.shape
        S = np.asarray(sigma_uu, dtype=float)
        if S.ndim == 0:
            S = float(S) * np.eye(p)
        if S.shape != (p, p):
            raise ValidationError(f"sigma_uu must be {p}x{p}, got {S.shape}")
        if not np.all(np.isfinite(S)):
            raise ValidationError("sigma_uu has non-finite entries")
        self.W, self.y, self.sigma_uu = W, y, S
        self.n, self.p = n, p
        self.Q = np.ascontiguousarray(W.T @ W / n - S)
        self.r = W.T @ y / n
        self.yy_n = float(y @ y) / n
        self._lip = None

    @property
    def lipschitz(self) -> float:
        """2 (sigma_max(W)^2 / n + sigma_max(Sigma_uu)), an upper bound on the
        gradient's Lipschitz constant."""
        if self._lip is None:
            smax_w = np.linalg.norm(self.W, 2) if self.W.size else 0.0
            smax_u = float(np.max(np.abs(np.linalg.eigvalsh(self.sigma_uu)), initial=0.0))
            self._lip = 2.0 * (smax_w**2 / self.n + smax_u)
        return self._lip

    def loss(self, beta) -> float:
        beta = np.asarray(beta, dtype=float)
        return float(self.yy_n - 2.0 * beta @ self.r + beta @ self.Q @ beta)

    def gradient(self, beta) -> np.ndarray:
        beta = np.asarray(beta, dtype=float)
        return 2.0 * (self.Q @ beta - self.r)

    def solve(self, radius: float, lam: float, config: CorrectedConfig, beta_start=None):
        if config.step == "backtracking":
            lip = self.lipschitz
            step0, backtrack = (1.0 / lip if lip > 0 else 1.0), True
        elif isinstance(config.step, (int, float)) and config.step > 0:
            step0, backtrack = float(config.step), False
        else:
            raise ConfigError(f"step must be 'backtracking' or a positive number, got {config.step!r}")
        start = np.zeros(self.p) if beta_start is None else np.array(beta_start, dtype=float)
        if start.shape != (self.p,):
            raise ValidationError(f"start has shape {start.shape}, expected ({self.p},)")
        beta, iters, status, hist, step = _kernels.pgd_quadratic(
            self.Q, self.r, self.yy_n, start, float(radius), float(lam), step0, backtrack,
            int(config.max_iter), float(config.tol), float(config.pg_tol), int(config.divergence_window),
            float(config.step_growth),
        )
        if status == _kernels.STATUS_CONVERGED:
            diag = ""
        elif status == _kernels.STATUS_DIVERGED:
            diag = f"diverged: objective rose for {config.divergence_window} consecutive steps at step {step:.3g}"
        else:
            diag = f"max_iter={config.max_iter} reached"
        return beta, int(iters), status == _kernels.STATUS_CONVERGED, hist, diag, step


def _check_sigma_psd(S):
    if not np.array_equal(S, S.T):
        raise ValidationError("sigma_uu must be symmetric")
    if S.size:
        eig = np.linalg.eigvalsh(S)
        if eig[0] < -1e-10 * max(abs(eig[-1]), 1e-300):
            raise ValidationError(f"sigma_uu is not PSD (smallest eigenvalue {eig[0]:.3g})")


def _as_problem(W, y, sigma_uu):
    if isinstance(W, CorrectedProblem):
        return W
    prob = CorrectedProblem(W, y, sigma_uu)
    _check_sigma_psd(prob.sigma_uu)
    return prob


def corrected_lasso_constrained(W, y, sigma_uu, kappa: float, config: CorrectedConfig | None = None,
                                beta_start=None) -> FitResult:
    """Stationary point of the corrected loss over the l1-ball of radius kappa.

    `W` may also be a prepared CorrectedProblem (then `y`, `sigma_uu` are ignored).
    """
    if not kappa > 0:
        raise ConfigError(f"kappa must be > 0, got {kappa}")
    config = config or CorrectedConfig()
    prob = _as_problem(W, y, sigma_uu)
    beta, iters, conv, hist, diag, step = prob.solve(kappa, 0.0, config, beta_start)
    return FitResult(
        beta=beta, tuning_name="kappa", tuning=float(kappa), iterations=iters, converged=conv,
        objective=float(hist[-1]), method="corrected-ccl", radius=float(kappa), history=hist,
        diagnostic=diag, extra={"step": step},
    )


def corrected_lasso_regularized(W, y, sigma_uu, lam: float, radius: float,
                                config: CorrectedConfig | None = None, beta_start=None) -> FitResult:
    """Stationary point of L(b) + lam ||b||_1 over the l1-ball of radius R.

    Each iteration takes a gradient step on L, soft-thresholds at step*lam
    (the gradient already carries the factor 2 of the squared loss), then
    projects onto B(R). Soft-thresholding followed by the ball projection is
    the exact proximal map of lam||.||_1 plus the ball indicator.
    """
    if not lam >= 0:
        raise ConfigError(f"lambda must be >= 0, got {lam}")
    if not radius > 0:
        raise ConfigError(f"radius must be > 0, got {radius}")
    config = config or CorrectedConfig()
    prob = _as_problem(W, y, sigma_uu)
    beta, iters, conv, hist, diag, step = prob.solve(radius, lam, config, beta_start)
    return FitResult(
        beta=beta, tuning_name="lambda", tuning=float(lam), iterations=iters, converged=conv,
        objective=float(hist[-1]), method="corrected-rcl", radius=float(radius), history=hist,
        diagnostic=diag, extra={"step": step},
    )


def random_ball_start(p: int, radius: float, rng) -> np.ndarray:
    """A random point strictly inside B(radius): Gaussian direction, uniform l1 size."""
    v = rng.standard_normal(p)
    return v / np.abs(v).sum() * radius * rng.uniform(0.0, 1.0)


def corrected_multistart(W, y, sigma_uu, kappa: float, n_starts: int = 10, seed=0,
                         config: CorrectedConfig | None = None) -> list[FitResult]:
    """Constrained corrected lasso from `n_starts` random points in B(kappa)."""
    prob = _as_problem(W, y, sigma_uu)
    rng = as_generator(seed)
    return [
        corrected_lasso_constrained(prob, None, None, kappa, config,
                                    beta_start=random_ball_start(prob.p, kappa, rng))
        for _ in range(n_starts)
    ]


def kkt_residual_corrected(W, y, sigma_uu, fit: FitResult) -> float:
    """Largest violation of the interior stationarity conditions.

    g = -(2/n) W'(y - W b) - 2 Sigma_uu b; active coordinates need
    g_j + lam sign(b_j) = 0 and inactive ones |g_j| <= lam, where lam is the
    fit's penalty (0 for a constrained fit). Only meaningful for points
    strictly inside the feasible ball.
    """
    W, y = _check_data(W, y)
    beta = np.asarray(fit.beta, dtype=float)
    if beta.shape != (W.shape[1],):
        raise ValidationError(f"fit has {beta.size} coefficients, W has {W.shape[1]} columns")
    if fit.interior is False:
        raise ContractError(
            "fit lies on the boundary of its feasible ball; the KKT conditions do not characterize it"
        )
    lam = float(fit.tuning) if fit.tuning_name == "lambda" else 0.0
    S = np.asarray(sigma_uu, dtype=float)
    if S.ndim == 0:
        S = float(S) * np.eye(W.shape[1])
    g = -2.0 / W.shape[0] * (W.T @ (y - W @ beta)) - 2.0 * (S @ beta)
    active = beta != 0
    viol = np.where(active, np.abs(g + lam * np.sign(beta)), np.abs(g) - lam)
    return float(max(np.max(viol, initial=0.0), 0.0))

"""Conditional-scores lasso for logistic and Poisson regression.

Given w = x + u with u ~ N(0, Sigma_uu), the statistic
``delta = w + y Sigma_uu beta`` is sufficient for x, and conditioning on it
gives an exponential family in y with natural parameter
``eta* = mu + beta' delta`` and cumulant ``D*(eta*, q)`` where
``q = beta' Sigma_uu beta``. The estimating equations

    sum_i (y_i - dD*/deta*_i) (1, delta_i) = 0

are unbiased. The lasso version ascends them with a fixed step, projecting
the slopes onto the l1-ball after each step; the intercept is neither
penalized nor projected.

Dispersion is 1 for both families.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln, logsumexp

from . import _kernels
from .errors import ConfigError, NumericError, ValidationError
from .lasso import _check_data
from .projection import project_l1
from .results import FitResult

FAMILIES = ("logistic", "poisson")

POISSON_MIN_TERMS = 50
POISSON_MAX_TERMS = 500
POISSON_TAIL_TOL = 1e-14


@dataclass(frozen=True)
class GlmFamily:
    kind: str
    phi: float = 1.0

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.kind!r}")
        if self.phi != 1.0:
            raise ConfigError("only dispersion phi = 1 is supported")


def _family(family) -> str:
    kind = family.kind if isinstance(family, GlmFamily) else family
    if kind not in FAMILIES:
        raise ConfigError(f"family must be one of {FAMILIES}, got {kind!r}")
    return kind


def poisson_horizon(eta_star) -> int:
    """Truncation point Z of the Poisson series: max(50, ceil(10 exp(eta*))), capped at 500."""
    top = float(np.max(eta_star, initial=-np.inf))
    if top > np.log(POISSON_MAX_TERMS / 10.0):
        return POISSON_MAX_TERMS
    return int(min(POISSON_MAX_TERMS, max(POISSON_MIN_TERMS, np.ceil(10.0 * np.exp(top)))))


def _poisson_mean(eta, quad, horizon):
    z = np.arange(horizon + 1, dtype=float)
    logt = np.multiply.outer(eta, z) - 0.5 * quad * z**2 - gammaln(z + 1.0)
    lse = logsumexp(logt, axis=-1)
    # log of sum z t_z; the z = 0 term contributes nothing
    lse_z = logsumexp(logt[..., 1:] + np.log(z[1:]), axis=-1)
    mean = np.exp(lse_z - lse)

    # terms shrink at least geometrically past Z with ratio
    # r = exp(eta - (2Z + 1) q / 2) / (Z + 1)
    Z = float(horizon)
    log_r = eta - 0.5 * (2.0 * Z + 1.0) * quad - np.log(Z + 1.0)
    ok = log_r < 0
    log_next = logt[..., -1] + log_r
    with np.errstate(divide="ignore"):
        log_tail = log_next - np.log1p(-np.exp(np.minimum(log_r, -1e-300)))
    rel_tail = np.exp(log_tail + np.log(Z + 2.0) - np.minimum(lse, lse_z))
    bad = ~ok | ~(rel_tail < POISSON_TAIL_TOL)
    if np.any(bad):
        i = int(np.flatnonzero(np.atleast_1d(bad))[0])
        e = float(np.atleast_1d(eta)[i])
        raise NumericError(
            f"Poisson series truncated at Z={horizon} is not accurate for eta*={e:.4g}, q={quad:.4g} (index {i})"
        )
    return mean


def dstar_mean(family, eta_star, quad: float, horizon: int | None = None):
    """dD*/deta*: the conditional mean of y given delta.

    logistic: H(eta* - q/2). poisson: ratio of the series
    sum_z z exp(z eta* - z^2 q/2)/z! over sum_z exp(z eta* - z^2 q/2)/z!,
    evaluated in log space; for q = 0 it is exp(eta*) exactly.
    Accepts scalars or arrays of eta*.
    """
    kind = _family(family)
    eta = np.asarray(eta_star, dtype=float)
    quad = float(quad)
    if not np.isfinite(quad) or quad < 0:
        raise ValidationError(f"quadratic form must be finite and >= 0, got {quad}")
    if not np.all(np.isfinite(eta)):
        i = int(np.flatnonzero(~np.isfinite(np.atleast_1d(eta)))[0])
        raise NumericError(f"non-finite eta* at observation {i}")
    if kind == "logistic":
        out = expit(eta - 0.5 * quad)
    elif quad == 0.0:
        out = np.exp(eta)
    else:
        Z = poisson_horizon(eta) if horizon is None else int(horizon)
        out = _poisson_mean(eta, quad, Z)
    return float(out) if np.ndim(out) == 0 else out


def dstar(family, eta_star, quad: float):
    """D*(eta*, q) for the logistic family: log(1 + exp(eta* - q/2))."""
    if _family(family) != "logistic":
        raise ConfigError("closed-form D* is only provided for the logistic family")
    return np.logaddexp(0.0, np.asarray(eta_star, dtype=float) - 0.5 * quad)


@dataclass
class ConditionalScoreState:
    mu: float
    beta: np.ndarray
    eta_star: np.ndarray
    delta: np.ndarray
    quad: float


def _sigma(sigma_uu, p):
    S = np.asarray(sigma_uu, dtype=float)
    if S.ndim == 0:
        S = float(S) * np.eye(p)
    if S.shape != (p, p):
        raise ValidationError(f"sigma_uu must be {p}x{p}, got {S.shape}")
    return S


def score_state(mu: float, beta, W, y, sigma_uu) -> ConditionalScoreState:
    """delta_i = w_i + y_i Sigma_uu beta and eta*_i = mu + beta' delta_i."""
    W, y = _check_data(W, y)
    beta = np.asarray(beta, dtype=float)
    S = _sigma(sigma_uu, W.shape[1])
    Sb = S @ beta
    delta = W + np.outer(y, Sb)
    return ConditionalScoreState(mu=float(mu), beta=beta, eta_star=mu + delta @ beta,
                                 delta=delta, quad=float(beta @ Sb))


def _compact(S):
    # a diagonal Sigma_uu is kept as its diagonal to avoid p x p products
    d = np.diag(S)
    return d if np.array_equal(S, np.diag(d)) else S


def _score_parts(kind, mu, beta, W, y, S, horizon=None):
    Sb = S * beta if S.ndim == 1 else S @ beta
    quad = float(beta @ Sb)
    eta = mu + W @ beta + y * quad
    if not np.all(np.isfinite(eta)):
        i = int(np.flatnonzero(~np.isfinite(eta))[0])
        raise NumericError(f"non-finite eta* at observation {i}")
    resid = y - dstar_mean(kind, eta, quad, horizon)
    s_mu = float(resid.sum())
    s_beta = W.T @ resid + float(resid @ y) * Sb
    return s_mu, s_beta


def conditional_score(family, mu: float, beta, W, y, sigma_uu, horizon: int | None = None):
    """(sum_i r_i, sum_i r_i delta_i) with r_i = y_i - dD*/deta*_i."""
    kind = _family(family)
    W, y = _check_data(W, y)
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (W.shape[1],):
        raise ValidationError(f"beta has shape {beta.shape}, expected ({W.shape[1]},)")
    return _score_parts(kind, float(mu), beta, W, y, _sigma(sigma_uu, W.shape[1]), horizon)


@dataclass
class GlmConfig:
    """Options for the projected score ascent.

    n_iter: run exactly this many iterations (replication mode) instead of
        stopping on `tol`.
    halve_on_increase: halve the step whenever the score norm increases.
    divergence_factor: abandon the run once the score norm exceeds this
        multiple of its running minimum.
    """

    step: float = 0.01
    max_iter: int = 5000
    tol: float = 1e-6
    n_iter: int | None = None
    halve_on_increase: bool = False
    divergence_factor: float = 10.0


def _check_response(kind, y):
    if kind == "logistic":
        if not np.all((y == 0.0) | (y == 1.0)):
            raise ValidationError("logistic response must be exactly 0 or 1")
    else:
        if np.any(y < 0) or np.any(y != np.floor(y)):
            raise ValidationError("Poisson response must be a non-negative integer")


def conditional_score_lasso(family, W, y, sigma_uu, kappa: float, config: GlmConfig | None = None,
                            beta_start=None, mu_start: float = 0.0) -> FitResult:
    """Projected ascent on the conditional score equations.

        mu   <- mu + step * sum_i r_i
        beta <- P_kappa(beta + step * sum_i r_i delta_i)

    Both updates use the residuals r_i at the current (mu, beta).
    """
    kind = _family(family)
    W, y = _check_data(W, y)
    _check_response(kind, y)
    if not kappa >= 0:
        raise ConfigError(f"kappa must be >= 0, got {kappa}")
    config = config or GlmConfig()
    if not config.step > 0:
        raise ConfigError(f"step must be > 0, got {config.step}")
    n, p = W.shape
    S = _compact(_sigma(sigma_uu, p))
    beta = project_l1(np.zeros(p) if beta_start is None else np.asarray(beta_start, dtype=float), kappa)
    mu = float(mu_start)
    step = float(config.step)
    budget = config.n_iter if config.n_iter is not None else config.max_iter

    if kind == "logistic":
        mu, beta, it, converged, diag, norms, step = _ascent_compiled(W, y, S, kappa, mu, beta, step, budget,
                                                                      config)
    else:
        mu, beta, it, converged, diag, norms, step = _ascent(kind, W, y, S, kappa, mu, beta, step, budget,
                                                             config)
    norm = float(norms[-1])
    return FitResult(
        beta=beta, tuning_name="kappa", tuning=float(kappa), intercept=mu, iterations=it,
        converged=converged, objective=norm, method=f"cs-{kind}", radius=float(kappa),
        history=np.asarray(norms), diagnostic=diag,
        extra={"score_norm": norm, "step": step},
    )


def _ascent_compiled(W, y, S, kappa, mu, beta, step, budget, config):
    diag_only = S.ndim == 1
    Sd = S if diag_only else np.zeros(0)
    Sm = np.zeros((0, 0)) if diag_only else np.ascontiguousarray(S)
    mu, beta, it, status, norms, step = _kernels.cs_logistic(
        np.ascontiguousarray(W), y, Sd, Sm, diag_only, float(kappa), mu, beta, step, int(budget),
        config.n_iter is not None, float(config.tol), bool(config.halve_on_increase),
        float(config.divergence_factor),
    )
    if status == 3:
        raise NumericError(f"non-finite eta* after {it} iterations")
    diag = ""
    if status == _kernels.STATUS_DIVERGED:
        diag = f"diverged: score norm {norms[-1]:.4g} exceeds {config.divergence_factor}x its minimum"
    elif status != _kernels.STATUS_CONVERGED:
        diag = f"iteration budget {budget} exhausted"
    return mu, beta, int(it), status == _kernels.STATUS_CONVERGED, diag, norms, step


def _ascent(kind, W, y, S, kappa, mu, beta, step, budget, config):
    norms = []
    best = np.inf
    converged = False
    diag = ""
    it = 0
    s_mu, s_beta = _score_parts(kind, mu, beta, W, y, S)
    while it < budget:
        norm = float(np.sqrt(s_mu**2 + s_beta @ s_beta))
        norms.append(norm)
        if norm > config.divergence_factor * best:
            diag = f"diverged: score norm {norm:.4g} exceeds {config.divergence_factor}x its minimum {best:.4g}"
            break
        if config.halve_on_increase and len(norms) > 1 and norm > norms[-2]:
            step *= 0.5
        best = min(best, norm)
        new_mu = mu + step * s_mu
        new_beta = _kernels.project_l1(beta + step * s_beta, float(kappa))
        change = max(abs(new_mu - mu), float(np.max(np.abs(new_beta - beta), initial=0.0)))
        mu, beta = new_mu, new_beta
        it += 1
        s_mu, s_beta = _score_parts(kind, mu, beta, W, y, S)
        converged = change < config.tol
        if converged and config.n_iter is None:
            break
    norms.append(float(np.sqrt(s_mu**2 + s_beta @ s_beta)))
    if not converged and not diag:
        diag = f"iteration budget {budget} exhausted"
    return mu, beta, it, converged, diag, np.asarray(norms), step


def naive_glm_lasso(W, y, kappa: float, config: GlmConfig | None = None, family="logistic",
                    beta_start=None, mu_start: float = 0.0) -> FitResult:
    """The same projected iteration with Sigma_uu = 0, i.e. the l1-constrained ML fit."""
    W = np.asarray(W, dtype=float)
    fit = conditional_score_lasso(family, W, y, np.zeros((W.shape[1], W.shape[1])), kappa, config,
                                  beta_start, mu_start)
    fit.method = f"naive-{_family(family)}"
    return fit

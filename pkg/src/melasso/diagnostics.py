"""Selection-consistency diagnostics for simulated data.

Index sets are 0-based integer arrays. Sample covariances use the 1/n
convention (C_ww = W'W / n). Block inverses go through a condition-number
guard: past COND_MAX the routines raise instead of regularizing.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import NumericError, ValidationError

COND_MAX = 1e12


def sample_cov(A, B=None) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    B = A if B is None else np.asarray(B, dtype=float)
    return A.T @ B / A.shape[0]


def _split(p: int, support):
    S = np.asarray(support, dtype=int).ravel()
    if S.size and (S.min() < 0 or S.max() >= p):
        raise ValidationError(f"support indices must lie in [0, {p})")
    Sc = np.setdiff1d(np.arange(p), S)
    return S, Sc


def _guarded_solve(A, B, what: str):
    if A.size == 0:
        return np.zeros_like(B, dtype=float)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_MAX:
        raise NumericError(f"{what} is singular or ill-conditioned (condition number {cond:.3g})")
    return np.linalg.solve(A, B)


def _inf_norm(v) -> float:
    return float(np.max(np.abs(v), initial=0.0))


def ic_me(C_ww, support, sign_beta) -> float:
    """||C_ww(S0c, S0) C_ww(S0, S0)^-1 sign(beta0_S0)||_inf; IC-ME holds when < 1."""
    C = np.asarray(C_ww, dtype=float)
    S, Sc = _split(C.shape[0], support)
    if S.size == 0 or Sc.size == 0:
        return 0.0
    sgn = np.sign(np.asarray(sign_beta, dtype=float))
    x = _guarded_solve(C[np.ix_(S, S)], sgn, "C_ww(S0, S0)")
    return _inf_norm(C[np.ix_(Sc, S)] @ x)


def ic_cl(C_ww, sigma_uu, support, sign_beta) -> float:
    """The irrepresentable constant of the corrected lasso: IC-ME on C_ww - Sigma_uu."""
    C = np.asarray(C_ww, dtype=float) - np.asarray(sigma_uu, dtype=float)
    S, Sc = _split(C.shape[0], support)
    if S.size == 0 or Sc.size == 0:
        return 0.0
    sgn = np.sign(np.asarray(sign_beta, dtype=float))
    x = _guarded_solve(C[np.ix_(S, S)], sgn, "C_ww(S0, S0) - Sigma_uu(S0, S0)")
    return _inf_norm(C[np.ix_(Sc, S)] @ x)


def mec_residual(sigma_ww, sigma_uu, support) -> float:
    """||Sigma_ww(S0c,S0) Sigma_ww(S0,S0)^-1 Sigma_uu(S0,S0) - Sigma_uu(S0c,S0)||_inf (entrywise max)."""
    Sww = np.asarray(sigma_ww, dtype=float)
    Suu = np.asarray(sigma_uu, dtype=float)
    S, Sc = _split(Sww.shape[0], support)
    if S.size == 0 or Sc.size == 0:
        return 0.0
    x = _guarded_solve(Sww[np.ix_(S, S)], Suu[np.ix_(S, S)], "Sigma_ww(S0, S0)")
    return _inf_norm(Sww[np.ix_(Sc, S)] @ x - Suu[np.ix_(Sc, S)])


def detectable_set(C_ww, C_wu, support, beta0, lam: float) -> np.ndarray:
    """Relevant covariates large enough to be found by the noiseless naive lasso.

    j in S0 is detectable when |beta0_j| > (lam/2) ||C_ww(S0,S0)^-1||_inf + |v_j|,
    with v = C_ww(S0,S0)^-1 C_wu(S0,S0) beta0_S0. The sup over ||tau||_inf <= 1
    is the max absolute row sum of the inverse.
    """
    C = np.asarray(C_ww, dtype=float)
    Cu = np.asarray(C_wu, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    S, _ = _split(C.shape[0], support)
    if S.size == 0:
        return S
    b = beta0[S]
    rhs = np.column_stack([np.eye(S.size), Cu[np.ix_(S, S)] @ b])
    sol = _guarded_solve(C[np.ix_(S, S)], rhs, "C_ww(S0, S0)")
    inv, v = sol[:, :-1], sol[:, -1]
    bound = 0.5 * lam * np.max(np.abs(inv).sum(axis=1))
    return S[np.abs(b) > bound + np.abs(v)]


def beta_min_condition(sigma_ww, sigma_uu, support, beta0) -> bool:
    """|beta0_S0| > |Sigma_ww(S0,S0)^-1 Sigma_uu(S0,S0) beta0_S0| coordinatewise."""
    Sww = np.asarray(sigma_ww, dtype=float)
    S, _ = _split(Sww.shape[0], support)
    if S.size == 0:
        return True
    b = np.asarray(beta0, dtype=float)[S]
    rhs = np.asarray(sigma_uu, dtype=float)[np.ix_(S, S)] @ b
    return bool(np.all(np.abs(b) > np.abs(_guarded_solve(Sww[np.ix_(S, S)], rhs, "Sigma_ww(S0, S0)"))))


@dataclass
class SelectionMetrics:
    tp: int
    fp: int
    sign_correct: bool
    l1_err: float
    l2_err: float


def selection_metrics(beta_hat, beta0) -> SelectionMetrics:
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    if beta_hat.shape != beta0.shape:
        raise ValidationError(f"shape mismatch: {beta_hat.shape} vs {beta0.shape}")
    sel = beta_hat != 0
    true = beta0 != 0
    d = beta_hat - beta0
    return SelectionMetrics(
        tp=int(np.sum(sel & true)),
        fp=int(np.sum(sel & ~true)),
        sign_correct=bool(np.array_equal(np.sign(beta_hat), np.sign(beta0))),
        l1_err=float(np.abs(d).sum()),
        l2_err=float(np.sqrt(d @ d)),
    )


@dataclass
class DiagnosticsReport:
    """Diagnostics for one data set.

    mec_residual is the population value when the simulator's truth is known
    and the plug-in value (C_ww in place of Sigma_ww) otherwise;
    mec_residual_plugin is always the plug-in value.
    """

    theta_ic_me: float | None = None
    theta_ic_cl: float | None = None
    mec_residual: float | None = None
    mec_residual_plugin: float | None = None
    detectable_set: list[int] | None = None
    beta_min_ok: bool | None = None
    kkt_residual: float | None = None
    support: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def diagnose(W, sigma_uu, support, sign_beta, *, U=None, beta0=None, sigma_xx=None,
             lam: float | None = None, kkt_residual: float | None = None) -> DiagnosticsReport:
    """Evaluate every computable diagnostic.

    `support`/`sign_beta` are the truth on simulated data, or an estimated
    active set and its signs on real data. `U` and `beta0` enable the
    detectable set; `sigma_xx` enables the population MEC and the
    beta-min condition.
    """
    W = np.asarray(W, dtype=float)
    Suu = np.asarray(sigma_uu, dtype=float)
    S = np.asarray(support, dtype=int)
    C = sample_cov(W)
    rep = DiagnosticsReport(support=[int(j) for j in S], kkt_residual=kkt_residual)
    rep.theta_ic_me = ic_me(C, S, sign_beta)
    rep.theta_ic_cl = ic_cl(C, Suu, S, sign_beta)
    rep.mec_residual_plugin = mec_residual(C, Suu, S)
    rep.mec_residual = rep.mec_residual_plugin
    if sigma_xx is not None:
        Sww = np.asarray(sigma_xx, dtype=float) + Suu
        rep.mec_residual = mec_residual(Sww, Suu, S)
        if beta0 is not None:
            rep.beta_min_ok = beta_min_condition(Sww, Suu, S, beta0)
    if U is not None and beta0 is not None and lam is not None:
        det = detectable_set(C, sample_cov(W, U), S, beta0, lam)
        rep.detectable_set = [int(j) for j in det]
    return rep

"""Compiled inner loops. Everything here is sequential so results do not
depend on the number of worker threads."""

import numpy as np
from numba import njit

# tolerance on the "already inside the ball" test; keeps projection idempotent
BALL_RTOL = 1e-12

STATUS_MAXITER = 0
STATUS_CONVERGED = 1
STATUS_DIVERGED = 2


@njit(cache=True)
def l1_norm(v):
    s = 0.0
    for i in range(v.size):
        s += abs(v[i])
    return s


@njit(cache=True)
def soft_threshold(z, t):
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


@njit(cache=True)
def l1_threshold(v, kappa):
    """Soft-threshold level theta >= 0 whose shrinkage lands on the l1-sphere."""
    p = v.size
    u = np.sort(np.abs(v))[::-1]
    css = 0.0
    rho = 0
    css_rho = 0.0
    for j in range(p):
        css += u[j]
        if u[j] - (css - kappa) / (j + 1) > 0.0:
            rho = j + 1
            css_rho = css
    if rho == 0:
        return u[0] if p > 0 else 0.0
    theta = (css_rho - kappa) / rho
    return theta if theta > 0.0 else 0.0


@njit(cache=True)
def project_l1(v, kappa):
    p = v.size
    out = np.empty(p)
    if l1_norm(v) <= kappa * (1.0 + BALL_RTOL):
        for i in range(p):
            out[i] = v[i]
        return out
    if kappa == 0.0:
        for i in range(p):
            out[i] = 0.0
        return out
    theta = l1_threshold(v, kappa)
    _shrink(v, theta, out)
    # theta carries the cancellation error of (sum - kappa); when kappa is
    # tiny next to |v| that can leave the result just outside the ball.
    # The l1 norm is piecewise linear in theta, so Newton steps are exact
    # up to rounding; a final rescale settles the last ulps.
    for _ in range(3):
        s = l1_norm(out)
        if s <= kappa * (1.0 + BALL_RTOL):
            return out
        k = 0
        for i in range(p):
            if out[i] != 0.0:
                k += 1
        theta += (s - kappa) / k
        _shrink(v, theta, out)
    s = l1_norm(out)
    if s > kappa * (1.0 + BALL_RTOL):
        f = kappa / s
        for i in range(p):
            out[i] *= f
    return out


@njit(cache=True)
def _shrink(v, theta, out):
    for i in range(v.size):
        a = abs(v[i]) - theta
        if a > 0.0:
            out[i] = a if v[i] > 0 else -a
        else:
            out[i] = 0.0


# ---------------------------------------------------------------------------
# naive lasso: coordinate descent with covariance updates


@njit(cache=True)
def _naive_kkt(g, beta, lam):
    # gradient of (1/n)||y - W b||^2 is -2 g with g = W'(y - W b)/n
    worst = 0.0
    for j in range(beta.size):
        grad = -2.0 * g[j]
        if beta[j] != 0.0:
            r = abs(grad + lam * (1.0 if beta[j] > 0 else -1.0))
        else:
            r = abs(grad) - lam
        if r > worst:
            worst = r
    return worst


@njit(cache=True)
def _gram_residual(G, c, beta, n):
    p = c.size
    g = c.copy()
    for k in range(p):
        bk = beta[k]
        if bk != 0.0:
            for j in range(p):
                g[j] -= G[k, j] * bk
    for j in range(p):
        g[j] /= n
    return g


@njit(cache=True)
def _naive_objective(yy, c, g, beta, lam, n):
    # Gb = c - n g  =>  b'Gb = b'c - n b'g
    bc = 0.0
    bg = 0.0
    for j in range(beta.size):
        bc += beta[j] * c[j]
        bg += beta[j] * g[j]
    return (yy - bc) / n - bg + lam * l1_norm(beta)


@njit(cache=True)
def _cd_sweep(G, g, beta, n, half, active_only):
    p = beta.size
    for j in range(p):
        bj = beta[j]
        if active_only and bj == 0.0:
            continue
        a = G[j, j] / n
        if a <= 0.0:
            new = 0.0
        else:
            new = soft_threshold(g[j] + a * bj, half) / a
        d = new - bj
        if d != 0.0:
            beta[j] = new
            dn = d / n
            for k in range(p):
                g[k] -= G[j, k] * dn


@njit(cache=True)
def cd_lasso(G, c, yy, n, lam, beta, tol, max_sweeps):
    """Cyclic coordinate descent for (1/n)||y - Wb||^2 + lam ||b||_1.

    Works on G = W'W, c = W'y, yy = y'y; `beta` is updated in place.
    Full sweeps alternate with sweeps restricted to the current active set
    until the active coordinates satisfy their optimality conditions.
    Returns (sweeps, converged, objective after each sweep).
    """
    p = c.size
    g = _gram_residual(G, c, beta, n)
    hist = np.empty(max_sweeps + 1)
    hist[0] = _naive_objective(yy, c, g, beta, lam, n)
    half = 0.5 * lam
    sweeps = 0
    converged = False
    if _naive_kkt(g, beta, lam) <= tol:
        return 0, True, hist[:1]
    active_only = False
    while sweeps < max_sweeps:
        _cd_sweep(G, g, beta, n, half, active_only)
        sweeps += 1
        hist[sweeps] = _naive_objective(yy, c, g, beta, lam, n)
        if active_only:
            # leave the inner loop once the active coordinates are settled
            worst = 0.0
            for j in range(p):
                if beta[j] != 0.0:
                    r = abs(-2.0 * g[j] + lam * (1.0 if beta[j] > 0 else -1.0))
                    if r > worst:
                        worst = r
            if worst <= 0.5 * tol:
                active_only = False
            continue
        if _naive_kkt(g, beta, lam) <= tol:
            g = _gram_residual(G, c, beta, n)
            if _naive_kkt(g, beta, lam) <= tol:
                converged = True
                break
        active_only = True
    return sweeps, converged, hist[: sweeps + 1]


# ---------------------------------------------------------------------------
# corrected lasso: projected (composite) gradient on a quadratic loss
#   L(b) = yy_n - 2 b'r + b'Q b,   grad = 2 (Q b - r)


@njit(cache=True)
def _sparse_matvec(Q, beta):
    p = beta.size
    out = np.zeros(p)
    for k in range(p):
        bk = beta[k]
        if bk != 0.0:
            for j in range(p):
                out[j] += Q[k, j] * bk
    return out


@njit(cache=True)
def _quad_loss(yy_n, r, beta, Qb):
    s = yy_n
    for j in range(beta.size):
        s += beta[j] * (Qb[j] - 2.0 * r[j])
    return s


@njit(cache=True)
def _prox_step(beta, grad, step, lam, radius):
    p = beta.size
    z = np.empty(p)
    t = step * lam
    for j in range(p):
        z[j] = soft_threshold(beta[j] - step * grad[j], t)
    return project_l1(z, radius)


@njit(cache=True)
def pgd_quadratic(Q, r, yy_n, beta, radius, lam, step0, backtrack, max_iter,
                  tol_rel, tol_pg, div_window, growth):
    """Projected composite gradient for min L(b) + lam ||b||_1 over ||b||_1 <= radius.

    Returns (beta, iterations, status, objective history, final step).
    Stops when the relative change is below tol_rel and the gradient
    mapping norm ||b+ - b|| / step is below tol_pg * max(1, ||b||).
    """
    p = beta.size
    beta = project_l1(beta, radius)
    Qb = _sparse_matvec(Q, beta)
    loss = _quad_loss(yy_n, r, beta, Qb)
    hist = np.empty(max_iter + 1)
    hist[0] = loss + lam * l1_norm(beta)
    step = step0
    status = STATUS_MAXITER
    n_up = 0
    it = 0
    grad = np.empty(p)
    while it < max_iter:
        for j in range(p):
            grad[j] = 2.0 * (Qb[j] - r[j])
        if backtrack and it > 0:
            step *= growth
        while True:
            new = _prox_step(beta, grad, step, lam, radius)
            Qn = _sparse_matvec(Q, new)
            new_loss = _quad_loss(yy_n, r, new, Qn)
            if not backtrack:
                break
            lin = 0.0
            dd = 0.0
            for j in range(p):
                dj = new[j] - beta[j]
                lin += grad[j] * dj
                dd += dj * dj
            if new_loss <= loss + lin + dd / (2.0 * step) + 1e-15 * abs(loss):
                break
            step *= 0.5
            if step < 1e-300:
                break
        dd = 0.0
        bb = 0.0
        for j in range(p):
            dj = new[j] - beta[j]
            dd += dj * dj
            bb += beta[j] * beta[j]
        dn = np.sqrt(dd)
        scale = max(1.0, np.sqrt(bb))
        obj_old = hist[it]
        it += 1
        beta = new
        Qb = Qn
        loss = new_loss
        hist[it] = loss + lam * l1_norm(beta)
        if hist[it] > obj_old:
            n_up += 1
        else:
            n_up = 0
        if dn / scale < tol_rel and dn / step <= tol_pg * scale:
            status = STATUS_CONVERGED
            break
        if not backtrack and n_up >= div_window:
            status = STATUS_DIVERGED
            break
        if not np.isfinite(hist[it]):
            status = STATUS_DIVERGED
            break
    return beta, it, status, hist[: it + 1], step


# ---------------------------------------------------------------------------
# conditional-score ascent, logistic family


@njit(cache=True)
def _expit(x):
    if x >= 0.0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


@njit(cache=True)
def _logistic_score(mu, beta, W, y, Sd, Sm, diag, s_beta):
    """Fills s_beta, returns (s_mu, ok). ok is False on a non-finite eta*."""
    n, p = W.shape
    if diag:
        Sb = Sd * beta
    else:
        Sb = _sparse_matvec(Sm, beta)
    quad = 0.0
    for j in range(p):
        quad += beta[j] * Sb[j]
    resid = np.empty(n)
    s_mu = 0.0
    ry = 0.0
    for i in range(n):
        eta = mu + y[i] * quad
        for j in range(p):
            if beta[j] != 0.0:
                eta += W[i, j] * beta[j]
        if not np.isfinite(eta):
            return 0.0, False
        r = y[i] - _expit(eta - 0.5 * quad)
        resid[i] = r
        s_mu += r
        ry += r * y[i]
    for j in range(p):
        s_beta[j] = ry * Sb[j]
    for i in range(n):
        r = resid[i]
        for j in range(p):
            s_beta[j] += W[i, j] * r
    return s_mu, True


@njit(cache=True)
def cs_logistic(W, y, Sd, Sm, diag, kappa, mu, beta, step, budget, fixed_iters, tol,
                halve, div_factor):
    """Projected ascent mu += step*s_mu, beta = P(beta + step*s_beta).

    Returns (mu, beta, iterations, status, score norms, step) where status is
    1 converged, 0 budget exhausted, 2 diverged, 3 non-finite linear predictor.
    """
    p = beta.size
    norms = np.empty(budget + 1)
    s_beta = np.empty(p)
    s_mu, ok = _logistic_score(mu, beta, W, y, Sd, Sm, diag, s_beta)
    if not ok:
        return mu, beta, 0, 3, norms[:0], step
    best = np.inf
    it = 0
    k = 0
    status = STATUS_MAXITER
    while it < budget:
        nrm = s_mu * s_mu
        for j in range(p):
            nrm += s_beta[j] * s_beta[j]
        nrm = np.sqrt(nrm)
        norms[k] = nrm
        k += 1
        if nrm > div_factor * best:
            status = STATUS_DIVERGED
            break
        if halve and k > 1 and nrm > norms[k - 2]:
            step *= 0.5
        if nrm < best:
            best = nrm
        new_mu = mu + step * s_mu
        z = np.empty(p)
        for j in range(p):
            z[j] = beta[j] + step * s_beta[j]
        new_beta = project_l1(z, kappa)
        change = abs(new_mu - mu)
        for j in range(p):
            d = abs(new_beta[j] - beta[j])
            if d > change:
                change = d
        mu = new_mu
        beta = new_beta
        it += 1
        s_mu, ok = _logistic_score(mu, beta, W, y, Sd, Sm, diag, s_beta)
        if not ok:
            return mu, beta, it, 3, norms[:k], step
        if change < tol:
            status = STATUS_CONVERGED
            if not fixed_iters:
                break
        else:
            status = STATUS_MAXITER
    nrm = s_mu * s_mu
    for j in range(p):
        nrm += s_beta[j] * s_beta[j]
    norms[k] = np.sqrt(nrm)
    k += 1
    return mu, beta, it, status, norms[:k], step

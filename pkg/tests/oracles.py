"""Slow, independent reference implementations used only by the tests.

None of these share code with the package: they use bisection, exhaustive
enumeration, Newton's method or plain summation instead of the production
algorithms.
"""

import itertools
import math

import numpy as np


def project_l1_bisect(v, kappa, iters=200):
    """Projection onto the l1-ball by bisection on the soft-threshold level."""
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    if a.sum() <= kappa:
        return v.copy()
    lo, hi = 0.0, float(a.max())
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.maximum(a - mid, 0.0).sum() > kappa:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    return np.sign(v) * np.maximum(a - theta, 0.0)


def lasso_enumerate(W, y, lam):
    """Exact naive lasso for small p by enumerating active sets and signs.

    Minimizes (1/n)||y - W b||^2 + lam ||b||_1. For each candidate (A, s) the
    stationarity equations on A are linear; the first candidate that also
    satisfies every sign and subgradient condition is the solution.
    """
    W = np.asarray(W, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = W.shape
    G = W.T @ W / n
    c = W.T @ y / n
    best, best_obj = None, np.inf
    for k in range(p + 1):
        for A in itertools.combinations(range(p), k):
            A = list(A)
            for signs in itertools.product((-1.0, 1.0), repeat=k):
                b = np.zeros(p)
                if k:
                    s = np.array(signs)
                    try:
                        bA = np.linalg.solve(G[np.ix_(A, A)], c[A] - 0.5 * lam * s)
                    except np.linalg.LinAlgError:
                        continue
                    if np.any(np.sign(bA) != s):
                        continue
                    b[A] = bA
                grad = 2.0 * (G @ b - c)
                inactive = [j for j in range(p) if j not in A]
                if inactive and np.max(np.abs(grad[inactive])) > lam * (1 + 1e-9) + 1e-12:
                    continue
                obj = np.mean((y - W @ b) ** 2) + lam * np.abs(b).sum()
                if obj < best_obj:
                    best, best_obj = b, obj
    return best


def grid_minimize_2d(fun, lo=-3.0, hi=3.0, num=2001):
    """Exhaustive search of a function of two variables on a square grid."""
    g = np.linspace(lo, hi, num)
    B1, B2 = np.meshgrid(g, g, indexing="ij")
    vals = fun(B1, B2)
    i = np.unravel_index(np.argmin(vals), vals.shape)
    return np.array([B1[i], B2[i]]), float(vals[i])


def logistic_newton(X, y, iters=100):
    """Unpenalized logistic MLE with intercept by Newton-Raphson."""
    X = np.asarray(X, dtype=float)
    Z = np.column_stack([np.ones(X.shape[0]), X])
    theta = np.zeros(Z.shape[1])
    for _ in range(iters):
        m = 1.0 / (1.0 + np.exp(-(Z @ theta)))
        grad = Z.T @ (y - m)
        H = (Z * (m * (1 - m))[:, None]).T @ Z
        step = np.linalg.solve(H, grad)
        theta += step
        if np.max(np.abs(step)) < 1e-13:
            break
    return theta[0], theta[1:]


def poisson_mean_direct(eta, quad, terms=400):
    """Conditional Poisson mean by direct summation of `terms` terms in float arithmetic."""
    num = 0.0
    den = 0.0
    # shift by the largest log term so nothing overflows
    logs = [z * eta - 0.5 * quad * z * z - math.lgamma(z + 1) for z in range(terms)]
    m = max(logs)
    for z, lt in enumerate(logs):
        t = math.exp(lt - m)
        den += t
        num += z * t
    return num / den


def scalar_corrected(w, y, s2, kappa):
    """Constrained corrected lasso for one covariate (requires w'w/n > s2)."""
    n = len(y)
    a = w @ w / n - s2
    b = w @ y / n
    return float(np.clip(b / a, -kappa, kappa))


def constrained_quadratic_enumerate(Q, r, kappa):
    """min b'Qb - 2 r'b over ||b||_1 <= kappa for positive definite Q (small p).

    Interior solution if it is feasible; otherwise bisection on the l1 multiplier
    nu with the penalized minimizer found by sign enumeration.
    """
    p = len(r)
    b_free = np.linalg.solve(Q, r)
    if np.abs(b_free).sum() <= kappa:
        return b_free

    def penalized(nu):
        best, best_obj = np.zeros(p), 0.0
        for k in range(1, p + 1):
            for A in itertools.combinations(range(p), k):
                A = list(A)
                for signs in itertools.product((-1.0, 1.0), repeat=k):
                    s = np.array(signs)
                    bA = np.linalg.solve(Q[np.ix_(A, A)], r[A] - 0.5 * nu * s)
                    if np.any(np.sign(bA) != s):
                        continue
                    b = np.zeros(p)
                    b[A] = bA
                    obj = b @ Q @ b - 2 * r @ b + nu * np.abs(b).sum()
                    if obj < best_obj:
                        best, best_obj = b, obj
        return best

    lo, hi = 0.0, 2.0 * np.max(np.abs(r)) + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.abs(penalized(mid)).sum() > kappa:
            lo = mid
        else:
            hi = mid
    return penalized(hi)

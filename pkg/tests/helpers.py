"""Independent reference computations shared by the test modules.

Everything here deliberately avoids the library's incremental code
paths: the batch solver goes through the weighted normal equations,
transition products are formed by direct multiplication, and box images
are hulled by exhaustive vertex enumeration.
"""

import numpy as np

from ivrls.rls import rls_init, rls_step


def batch_rls(X, y, lam, theta0, P0, t):
    """Weighted least squares the recursion must reproduce at time t:

        G(t) = sum_{k=1}^{t} lam^(t-k) x(k) x(k)' + lam^t P0^{-1}
        theta(t) = G(t)^{-1} (sum_k lam^(t-k) x(k) y(k) + lam^t P0^{-1} theta0)

    Returns (theta_t, P_t) with P_t = G(t)^{-1}.
    """
    theta0 = np.asarray(theta0, dtype=float)
    P0inv = np.linalg.inv(np.asarray(P0, dtype=float))
    G = lam**t * P0inv
    b = lam**t * (P0inv @ theta0)
    for k in range(1, t + 1):
        w = lam ** (t - k)
        x = np.asarray(X[k - 1], dtype=float)
        G = G + w * np.outer(x, x)
        b = b + w * x * float(y[k - 1])
    return np.linalg.solve(G, b), np.linalg.inv(G)


def box_image_minmax(M, lower, upper):
    """Hull of {M z : z in box} by enumerating every vertex."""
    M = np.asarray(M, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    d = lower.shape[0]
    lo = np.full(M.shape[0], np.inf)
    hi = np.full(M.shape[0], -np.inf)
    for mask in range(1 << d):
        z = np.where([(mask >> j) & 1 for j in range(d)], upper, lower)
        img = M @ z
        lo = np.minimum(lo, img)
        hi = np.maximum(hi, img)
    return lo, hi


def collect_run(config, X, y):
    """RLS trajectory; returns (thetas, Ps, As, qs) indexed by step 1..t."""
    state = rls_init(config)
    thetas, Ps, As, qs = [], [], [], []
    for k in range(len(y)):
        state = rls_step(state, X[k], y[k])
        thetas.append(state.theta)
        Ps.append(state.P)
        As.append(state.last_A)
        qs.append(state.last_q)
    return thetas, Ps, As, qs


def phi_product(As, t, t0):
    """Phi(t, t0) = A(t) ... A(t0+1); identity when t == t0."""
    n = As[0].shape[0]
    out = np.eye(n)
    for k in range(t0 + 1, t + 1):
        out = As[k - 1] @ out
    return out


def random_spd(rng, n, scale=1.0):
    B = rng.normal(size=(n, n))
    return scale * (B @ B.T + n * np.eye(n))

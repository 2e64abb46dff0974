"""Independent reference implementations used to check the production code.

Nothing here shares code paths with the package internals: the QP oracle is
a projected-gradient solver with its own projection and its own bias rule,
and the metric oracles are naive loops.
"""

import math

import numpy as np


def rbf_matrix_ref(X, Y, gamma):
    d2 = ((X[:, None, :] - Y[None, :, :]) ** 2).sum(axis=2)
    return np.exp(-gamma * d2)


def project_box_hyperplane(b, C, z):
    """Euclidean projection onto {0 <= x <= C, z.x = 0} by bisection on the
    hyperplane multiplier."""
    span = C + float(np.abs(b).max())
    lo, hi = -span, span
    for _ in range(90):
        lam = 0.5 * (lo + hi)
        if z @ np.clip(b - lam * z, 0.0, C) > 0:
            lo = lam
        else:
            hi = lam
    return np.clip(b - 0.5 * (lo + hi) * z, 0.0, C)


def qp_oracle(K, y, C, eps, max_iter=15_000):
    """Barzilai-Borwein projected gradient on the 2m-variable dual QP.

    Returns (theta, bias, dual_objective, duality_gap): the gap certifies
    the oracle's own optimality via a primal-feasible construction.
    """
    m = len(y)
    z = np.concatenate([np.ones(m), -np.ones(m)])
    p = np.concatenate([eps - y, eps + y])

    def grad(b):
        kt = K @ (b[:m] - b[m:])
        return np.concatenate([kt, -kt]) + p

    def fval(b):
        theta = b[:m] - b[m:]
        return 0.5 * theta @ (K @ theta) + p @ b

    L = float(np.linalg.eigvalsh(np.block([[K, -K], [-K, K]])).max())
    safe_step = 1.0 / max(L, 1e-12)

    def stationary(b, g):
        # fixed-point residual of the safe-step projected gradient map
        return float(np.max(np.abs(project_box_hyperplane(b - safe_step * g, C, z) - b)))

    b = project_box_hyperplane(np.zeros(2 * m), C, z)
    g = grad(b)
    alpha = 1.0
    best, fbest = b.copy(), fval(b)
    for it in range(max_iter):
        bn = project_box_hyperplane(b - alpha * g, C, z)
        s = bn - b
        sn = float(s @ s)
        if sn < 1e-32:
            break
        gn = grad(bn)
        sy = float(s @ (gn - g))
        alpha = min(max(sn / sy, 1e-10), 1e10) if sy > 1e-30 else 1.0
        b, g = bn, gn
        fb = fval(b)
        if fb < fbest - 1e-16 * max(1.0, abs(fbest)):
            fbest, best = fb, b.copy()
        if it % 25 == 24 and stationary(b, g) <= 1e-14 * max(1.0, C):
            break
    # monotone polish from the best point seen
    b = best
    for _ in range(2000):
        bn = project_box_hyperplane(b - safe_step * grad(b), C, z)
        if float(np.max(np.abs(bn - b))) <= 1e-16 * max(1.0, C):
            break
        b = bn
    theta = b[:m] - b[m:]
    dual_obj = -fval(b)

    bias = primal_bias(K, y, C, eps, theta)
    gap = primal_objective(K, y, C, eps, theta, bias) - dual_obj
    return theta, bias, dual_obj, gap


def primal_objective(K, y, C, eps, theta, bias):
    f = K @ theta + bias
    slack = np.maximum(0.0, np.abs(y - f) - eps)
    return 0.5 * theta @ (K @ theta) + C * float(slack.sum())


def primal_bias(K, y, C, eps, theta):
    """Exact primal-optimal bias: the slack sum is piecewise linear in the
    bias, so scanning segment midpoints and breakpoints is exhaustive."""
    r = y - K @ theta
    bps = np.unique(np.concatenate([r - eps, r + eps]))
    cands = np.concatenate([bps, (bps[:-1] + bps[1:]) / 2.0]) if len(bps) > 1 else bps
    costs = [float(np.maximum(0.0, np.abs(r - b) - eps).sum()) for b in cands]
    return float(cands[int(np.argmin(costs))])


def two_sample_brute_force(K, y, C, eps, grid=2_000_001):
    """1D brute force for the 2-sample dual: theta = (t, -t), t in [-C, C]."""
    t = np.linspace(-C, C, grid)
    quad = K[0, 0] + K[1, 1] - 2.0 * K[0, 1]
    obj = -0.5 * quad * t**2 - 2.0 * eps * np.abs(t) + (y[0] - y[1]) * t
    tb = float(t[int(np.argmax(obj))])
    return np.array([tb, -tb]), float(obj.max())


def mae_ref(pred, actual):
    total = 0.0
    for p, a in zip(pred, actual):
        total += abs(p - a)
    return total / len(pred)


def mape_ref(pred, actual):
    total, n = 0.0, 0
    for p, a in zip(pred, actual):
        if a != 0.0:
            total += abs((p - a) / a) * 100.0
            n += 1
    return total / n if n else 0.0


def pearson_ref(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y)) / n
    vx = sum((a - mx) ** 2 for a in x) / n
    vy = sum((b - my) ** 2 for b in y) / n
    return cov / math.sqrt(vx * vy)

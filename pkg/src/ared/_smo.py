"""Compiled kernels: the SMO dual solver, RBF evaluation, and the
cross-validation grid scan.

The dual problem is posed over 2m box-constrained variables (the positive
multipliers first, their starred twins second) tied by one equality
constraint; each iteration optimizes the maximal-KKT-violating pair
exactly, LIBSVM-style. No fastmath anywhere: results must be bit-stable
for session replay.
"""

import warnings

import numpy as np
from numba import njit, prange

# numba probes TBB first and grumbles when the system copy is old; the
# fallback layer it picks is fine for this workload
warnings.filterwarnings("ignore", message=".*TBB threading layer.*")

TAU = 1e-12


@njit(cache=True)
def smo_solve(K, y, C, eps, tol, max_iter):
    """Solve the epsilon-insensitive SVR dual for one kernel matrix.

    Minimizes 0.5*b'Qb + p'b over 0 <= b <= C with z'b = 0, where
    z = (+1..,-1..), Q[s,t] = z_s z_t K[s%m, t%m] and
    p[t] = eps - y[t] (t < m), eps + y[t-m] (t >= m).

    Returns (theta, bias, gap, iterations, converged, objective):
    theta = alpha - alpha*, objective is the maximized dual value, gap is
    the final KKT violation (gmax - gmin).
    """
    m = y.shape[0]
    n2 = 2 * m
    beta = np.zeros(n2)
    G = np.empty(n2)
    for t in range(m):
        G[t] = eps - y[t]
        G[t + m] = eps + y[t]

    it = 0
    converged = False
    gmax = -1e300
    gmin = 1e300
    while True:
        # maximal violating pair: i over I_up, j over I_low
        gmax = -1e300
        gmin = 1e300
        i = -1
        j = -1
        for t in range(n2):
            if t < m:
                mzg = -G[t]
                in_up = beta[t] < C
                in_low = beta[t] > 0.0
            else:
                mzg = G[t]
                in_up = beta[t] > 0.0
                in_low = beta[t] < C
            if in_up and mzg > gmax:
                gmax = mzg
                i = t
            if in_low and mzg < gmin:
                gmin = mzg
                j = t
        if gmax - gmin <= tol or i < 0 or j < 0:
            converged = True
            break
        if it >= max_iter:
            break
        it += 1

        ib = i if i < m else i - m
        jb = j if j < m else j - m
        zi = 1.0 if i < m else -1.0
        zj = 1.0 if j < m else -1.0
        quad = K[ib, ib] + K[jb, jb] - 2.0 * K[ib, jb]
        if quad <= 0.0:
            quad = TAU
        old_bi = beta[i]
        old_bj = beta[j]
        if zi != zj:
            delta = (-G[i] - G[j]) / quad
            diff = beta[i] - beta[j]
            beta[i] += delta
            beta[j] += delta
            if diff > 0.0:
                if beta[j] < 0.0:
                    beta[j] = 0.0
                    beta[i] = diff
                if beta[i] > C:
                    beta[i] = C
                    beta[j] = C - diff
            else:
                if beta[i] < 0.0:
                    beta[i] = 0.0
                    beta[j] = -diff
                if beta[j] > C:
                    beta[j] = C
                    beta[i] = C + diff
        else:
            delta = (G[i] - G[j]) / quad
            ssum = beta[i] + beta[j]
            beta[i] -= delta
            beta[j] += delta
            if ssum > C:
                if beta[i] > C:
                    beta[i] = C
                    beta[j] = ssum - C
                if beta[j] > C:
                    beta[j] = C
                    beta[i] = ssum - C
            else:
                if beta[j] < 0.0:
                    beta[j] = 0.0
                    beta[i] = ssum
                if beta[i] < 0.0:
                    beta[i] = 0.0
                    beta[j] = ssum

        dbi = beta[i] - old_bi
        dbj = beta[j] - old_bj
        si = zi * dbi
        sj = zj * dbj
        for t in range(m):
            u = K[t, ib] * si + K[t, jb] * sj
            G[t] += u
            G[t + m] -= u

    # bias: mean of -z_t * G_t over free variables, else the KKT midpoint
    nfree = 0
    bsum = 0.0
    for t in range(n2):
        if 0.0 < beta[t] < C:
            bsum += -G[t] if t < m else G[t]
            nfree += 1
    if nfree > 0:
        bias = bsum / nfree
    else:
        bias = (gmax + gmin) / 2.0

    # maximized dual objective: -(0.5*b'Qb + p'b) with b'Qb = b'(G - p)
    fval = 0.0
    for t in range(m):
        fval += 0.5 * (beta[t] * (G[t] + (eps - y[t]))
                       + beta[t + m] * (G[t + m] + (eps + y[t])))
    objective = -fval

    theta = np.empty(m)
    for t in range(m):
        theta[t] = beta[t] - beta[t + m]
    gap = gmax - gmin
    return theta, bias, gap, it, converged, objective


@njit(cache=True)
def rbf_matrix(X, Y, gamma):
    """Kernel matrix exp(-gamma * ||x_i - y_j||^2), shape (len(X), len(Y))."""
    a = X.shape[0]
    b = Y.shape[0]
    n = X.shape[1]
    out = np.empty((a, b))
    for i in range(a):
        for j in range(b):
            d2 = 0.0
            for k in range(n):
                diff = X[i, k] - Y[j, k]
                d2 += diff * diff
            out[i, j] = np.exp(-gamma * d2)
    return out


@njit(cache=True)
def rbf_decision(Xsv, theta, bias, gamma, Xq):
    """Decision values sum_j theta_j K(x_j, q) + bias for each query row."""
    nq = Xq.shape[0]
    m = Xsv.shape[0]
    n = Xsv.shape[1]
    out = np.empty(nq)
    for i in range(nq):
        acc = bias
        for j in range(m):
            d2 = 0.0
            for k in range(n):
                diff = Xq[i, k] - Xsv[j, k]
                d2 += diff * diff
            acc += theta[j] * np.exp(-gamma * d2)
        out[i] = acc
    return out


@njit(cache=True, parallel=True)
def grid_cv_scan(K_all, y, Cs, eps, fold_ids, n_folds, tol, max_iter):
    """Mean per-fold validation MAE for every (gamma, C) cell.

    K_all[g] is the full kernel matrix at the g-th gamma; fold_ids assigns
    each sample to a fold. Cells are pure and independent, so the parallel
    schedule cannot change any result.

    Returns (mae, all_converged) of shape (len(K_all), len(Cs)).
    """
    n_g = K_all.shape[0]
    n_c = Cs.shape[0]
    m = y.shape[0]
    mae = np.empty((n_g, n_c))
    allconv = np.empty((n_g, n_c), dtype=np.uint8)
    total = n_g * n_c
    for cell in prange(total):
        g = cell // n_c
        ci = cell - g * n_c
        C = Cs[ci]
        Kg = K_all[g]
        fold_sum = 0.0
        conv_all = True
        for f in range(n_folds):
            ntr = 0
            for t in range(m):
                if fold_ids[t] != f:
                    ntr += 1
            nva = m - ntr
            tr = np.empty(ntr, np.int64)
            va = np.empty(nva, np.int64)
            a = 0
            b = 0
            for t in range(m):
                if fold_ids[t] == f:
                    va[b] = t
                    b += 1
                else:
                    tr[a] = t
                    a += 1
            Ksub = np.empty((ntr, ntr))
            for s in range(ntr):
                for t in range(ntr):
                    Ksub[s, t] = Kg[tr[s], tr[t]]
            ysub = np.empty(ntr)
            for s in range(ntr):
                ysub[s] = y[tr[s]]
            theta, bias, gap, iters, conv, obj = smo_solve(
                Ksub, ysub, C, eps, tol, max_iter
            )
            if not conv:
                conv_all = False
            err = 0.0
            for s in range(nva):
                acc = bias
                for t in range(ntr):
                    acc += theta[t] * Kg[va[s], tr[t]]
                err += abs(acc - y[va[s]])
            fold_sum += err / nva
        mae[g, ci] = fold_sum / n_folds
        allconv[g, ci] = 1 if conv_all else 0
    return mae, allconv

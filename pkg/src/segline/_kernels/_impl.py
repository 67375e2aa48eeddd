"""Hot numeric kernels, written once in nopython-compatible form.

These functions are compiled with numba when the accelerated backend is
active and run as-is under the pure-numpy fallback. Keep every kernel
self-contained (no calls into the rest of the package) so the same source
object can be handed to ``numba.njit``.
"""

from __future__ import annotations

import numpy as np

INF = np.inf


def cd_weighted_l1(G, b, lam, theta, max_sweeps, tol):
    """Cyclic coordinate descent for a quadratic plus weighted-L1 objective.

    Minimizes theta' G theta - 2 b' theta + sum_j lam[j] |theta_j| in place.
    lam[j] = 0 leaves coordinate j unpenalized; lam[j] = inf pins it to zero.
    Returns (kkt_residual, sweeps, converged) where converged is 1/0.

    The running gradient uses an incrementally maintained v = G @ theta;
    v is recomputed exactly before convergence is declared so the reported
    KKT residual is drift-free.
    """
    p = b.shape[0]
    v = G @ theta
    kkt = INF
    sweeps = 0
    # alternate: full sweeps establish the active set, then cheap sweeps
    # over the nonzero coordinates until they settle, then a full sweep
    # re-checks the zeros; convergence requires a clean full-sweep KKT.
    # during active-only sweeps the running gradient v is maintained only
    # at active positions (O(a) per update instead of O(p)) and recomputed
    # exactly on every mode switch, so it is never read where it is stale
    active_only = False
    idx = np.empty(p, np.int64)
    na = 0
    while sweeps < max_sweeps:
        sweeps += 1
        if active_only:
            for ii in range(na):
                j = idx[ii]
                gjj = G[j, j]
                if gjj <= 0.0:
                    continue
                lj = lam[j]
                rho = b[j] - v[j] + gjj * theta[j]
                if lj > 0.0:
                    t = abs(rho) - 0.5 * lj
                    if t > 0.0:
                        new = t / gjj
                        if rho < 0.0:
                            new = -new
                    else:
                        new = 0.0
                else:
                    new = rho / gjj
                delta = new - theta[j]
                if delta != 0.0:
                    theta[j] = new
                    for kk in range(na):
                        i = idx[kk]
                        v[i] += G[i, j] * delta
            kkt = 0.0
            for ii in range(na):
                j = idx[ii]
                lj = lam[j]
                g2 = 2.0 * (v[j] - b[j])
                if theta[j] > 0.0:
                    r = abs(g2 + lj)
                elif theta[j] < 0.0:
                    r = abs(g2 - lj)
                else:
                    r = abs(g2) - lj
                    if r < 0.0:
                        r = 0.0
                if r > kkt:
                    kkt = r
            if kkt > tol:
                continue
            # the active set settled; go back to full sweeps with an
            # exact gradient (inactive entries of v are stale by now)
            v = G @ theta
            active_only = False
            continue
        for j in range(p):
            lj = lam[j]
            if lj == INF:
                continue
            gjj = G[j, j]
            if gjj <= 0.0:
                continue
            rho = b[j] - v[j] + gjj * theta[j]
            if lj > 0.0:
                t = abs(rho) - 0.5 * lj
                if t > 0.0:
                    new = t / gjj
                    if rho < 0.0:
                        new = -new
                else:
                    new = 0.0
            else:
                new = rho / gjj
            delta = new - theta[j]
            if delta != 0.0:
                theta[j] = new
                for i in range(p):
                    v[i] += G[i, j] * delta
        # KKT residual from the maintained gradient
        kkt = 0.0
        for j in range(p):
            lj = lam[j]
            if lj == INF:
                continue
            g2 = 2.0 * (v[j] - b[j])
            if theta[j] > 0.0:
                r = abs(g2 + lj)
            elif theta[j] < 0.0:
                r = abs(g2 - lj)
            else:
                r = abs(g2) - lj
                if r < 0.0:
                    r = 0.0
            if r > kkt:
                kkt = r
        if kkt > tol:
            na = 0
            for j in range(p):
                if theta[j] != 0.0 and lam[j] != INF:
                    idx[na] = j
                    na += 1
            if na > 0:
                active_only = True
            continue
        # confirm with an exact gradient before declaring convergence
        v = G @ theta
        kkt = 0.0
        for j in range(p):
            lj = lam[j]
            if lj == INF:
                continue
            g2 = 2.0 * (v[j] - b[j])
            if theta[j] > 0.0:
                r = abs(g2 + lj)
            elif theta[j] < 0.0:
                r = abs(g2 - lj)
            else:
                r = abs(g2) - lj
                if r < 0.0:
                    r = 0.0
            if r > kkt:
                kkt = r
        if kkt <= tol:
            return kkt, sweeps, 1
    return kkt, sweeps, 0


def cusum_scan(xw, yw, refactor_every):
    """Max-over-splits regression CUSUM statistic on one window.

    xw is (N, q), yw is (N,). Split offsets t run over q .. N-1-q (0-based,
    the left part being rows 0..t). Partial Gram inverses are maintained by
    rank-one updates with a full refactorization every ``refactor_every``
    steps. Returns (T, t_hat, skipped): the max statistic, the smallest
    maximizing offset, and the number of offsets skipped because a partial
    Gram was numerically singular. T is -1.0 if every offset was skipped.
    """
    n, q = xw.shape
    lo = q
    hi = n - 1 - q

    c_full = xw.T @ xw
    beta = np.linalg.pinv(c_full) @ (xw.T @ yw)
    resid = yw - xw @ beta

    ck = np.zeros((q, q))
    s = np.zeros(q)
    for i in range(lo + 1):
        for a in range(q):
            s[a] += xw[i, a] * resid[i]
            for bb in range(q):
                ck[a, bb] += xw[i, a] * xw[i, bb]
    c0 = c_full - ck

    a_ok = 0
    b_ok = 0
    ainv = np.zeros((q, q))
    binv = np.zeros((q, q))

    best_t = -1.0
    best_k = -1
    skipped = 0
    steps = 0

    for t in range(lo, hi + 1):
        if t > lo:
            for a in range(q):
                s[a] += xw[t, a] * resid[t]
                for bb in range(q):
                    ck[a, bb] += xw[t, a] * xw[t, bb]
                    c0[a, bb] -= xw[t, a] * xw[t, bb]
            if a_ok == 1:
                u = ainv @ xw[t]
                den = 1.0 + xw[t] @ u
                if abs(den) < 1e-12:
                    a_ok = 0
                else:
                    for a in range(q):
                        for bb in range(q):
                            ainv[a, bb] -= u[a] * u[bb] / den
            if b_ok == 1:
                u = binv @ xw[t]
                den = 1.0 - xw[t] @ u
                if abs(den) < 1e-12:
                    b_ok = 0
                else:
                    for a in range(q):
                        for bb in range(q):
                            binv[a, bb] += u[a] * u[bb] / den

        steps += 1
        if steps >= refactor_every:
            steps = 0
            a_ok = 0
            b_ok = 0

        if a_ok == 0:
            if abs(np.linalg.det(ck)) > 1e-300:
                ainv = np.linalg.inv(ck)
                a_ok = 1
        if b_ok == 0:
            if abs(np.linalg.det(c0)) > 1e-300:
                binv = np.linalg.inv(c0)
                b_ok = 1

        if a_ok == 0 or b_ok == 0:
            skipped += 1
            continue

        w = binv @ s
        w = c_full @ w
        w = ainv @ w
        t_stat = s @ w
        if t_stat > best_t:
            best_t = t_stat
            best_k = t

    return best_t, best_k, skipped


def split_rss_scan(xw, yw):
    """Best two-regime split of a window by total least-squares RSS.

    Rows 0..t form the left regime; both sides must have at least q+1
    observations. Returns (t_best, rss_best) with the smallest offset
    winning ties. Rank-deficient sides use the minimum-norm fit.
    """
    n, q = xw.shape
    lo = q
    hi = n - 2 - q

    # left-side prefix statistics
    cl = np.zeros((q, q))
    bl = np.zeros(q)
    yyl = 0.0
    for i in range(lo + 1):
        yyl += yw[i] * yw[i]
        for a in range(q):
            bl[a] += xw[i, a] * yw[i]
            for bb in range(q):
                cl[a, bb] += xw[i, a] * xw[i, bb]

    # right-side suffix statistics for every admissible split
    nsplit = hi - lo + 1
    rss_r = np.zeros(nsplit)
    cr = np.zeros((q, q))
    br = np.zeros(q)
    yyr = 0.0
    for i in range(n - 1, hi, -1):
        yyr += yw[i] * yw[i]
        for a in range(q):
            br[a] += xw[i, a] * yw[i]
            for bb in range(q):
                cr[a, bb] += xw[i, a] * xw[i, bb]
    for idx in range(nsplit - 1, -1, -1):
        t = lo + idx
        if idx < nsplit - 1:
            i = t + 1
            yyr += yw[i] * yw[i]
            for a in range(q):
                br[a] += xw[i, a] * yw[i]
                for bb in range(q):
                    cr[a, bb] += xw[i, a] * xw[i, bb]
        beta = np.linalg.pinv(cr) @ br
        r = yyr - br @ beta
        if r < 0.0:
            r = 0.0
        rss_r[idx] = r

    best_t = -1
    best_rss = INF
    for idx in range(nsplit):
        t = lo + idx
        if idx > 0:
            i = t
            yyl += yw[i] * yw[i]
            for a in range(q):
                bl[a] += xw[i, a] * yw[i]
                for bb in range(q):
                    cl[a, bb] += xw[i, a] * xw[i, bb]
        beta = np.linalg.pinv(cl) @ bl
        r = yyl - bl @ beta
        if r < 0.0:
            r = 0.0
        total = r + rss_r[idx]
        if total < best_rss:
            best_rss = total
            best_t = t

    return best_t, best_rss

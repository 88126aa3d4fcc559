"""Bounded-variable two-phase simplex, dense, pure-python backend.

Pivoting rules mirror the compiled kernel exactly: Dantzig pricing with a
lowest-index tie break, ratio test keeping the smallest basis index among
ties, a bound flip when it ties the best basic ratio, and a permanent switch
to Bland's rule after a non-improving streak of 2*(n+r) pivots.
"""

import numpy as np

BACKEND = "python"

OPTIMAL, INFEASIBLE, UNBOUNDED, BREAKDOWN = 0, 1, 2, 3

_AT_LO, _AT_UP, _BASIC = 0, 1, 2
_PIV_TOL = 1e-10


def solve_bounded_lp(c, G, g, lower, upper, pivot_limit=0, rc_tol=1e-9):
    """Minimize c@x s.t. G@x <= g, lower <= x <= upper (all bounds finite).

    Returns (status, x, objective, pivots, row_duals).
    """
    c = np.ascontiguousarray(c, dtype=np.float64)
    G = np.ascontiguousarray(np.atleast_2d(np.asarray(G, dtype=np.float64)))
    g = np.ascontiguousarray(g, dtype=np.float64)
    lo_x = np.ascontiguousarray(lower, dtype=np.float64)
    up_x = np.ascontiguousarray(upper, dtype=np.float64)
    n = c.shape[0]
    if G.size == 0:
        G = np.zeros((0, n))
    r = G.shape[0]
    limit = int(pivot_limit) if pivot_limit > 0 else 50 * (n + r)

    # Columns: structurals, slacks, artificials (one per row that the
    # all-at-lower starting point leaves infeasible).
    resid = g - G @ lo_x
    art_rows = np.flatnonzero(resid < 0.0)
    na = art_rows.size
    m = n + r + na

    A = np.zeros((r, m))
    A[:, :n] = G
    A[np.arange(r), n + np.arange(r)] = 1.0
    A[art_rows, n + r + np.arange(na)] = -1.0

    lo = np.concatenate([lo_x, np.zeros(r + na)])
    up = np.concatenate([up_x, np.full(r + na, np.inf)])

    stat = np.full(m, _AT_LO, dtype=np.int64)
    basis = (n + np.arange(r)).astype(np.int64)
    basis[art_rows] = n + r + np.arange(na)
    stat[basis] = _BASIC
    xval = lo.copy()

    pivots = 0

    def extract(xb):
        xfull = xval.copy()
        xfull[basis] = xb
        return xfull

    def run_phase(cost):
        nonlocal pivots
        bland = False
        streak = 0
        tol_d = rc_tol * max(1.0, float(np.abs(cost).max()) if m else 1.0)
        while True:
            B = A[:, basis]
            try:
                Binv = np.linalg.inv(B)
            except np.linalg.LinAlgError:
                return BREAKDOWN, None
            if not np.all(np.isfinite(Binv)):
                return BREAKDOWN, None
            nonb = stat != _BASIC
            rhs = g - A[:, nonb] @ xval[nonb]
            xb = Binv @ rhs
            y = cost[basis] @ Binv
            d = cost - y @ A

            score = np.where(stat == _AT_LO, d, -d)
            score[stat == _BASIC] = np.inf
            score[lo == up] = np.inf
            if bland:
                elig = np.flatnonzero(score < -tol_d)
                if elig.size == 0:
                    return OPTIMAL, (xb, y)
                q = int(elig[0])
            else:
                q = int(np.argmin(score))
                if score[q] >= -tol_d:
                    return OPTIMAL, (xb, y)

            w = Binv @ A[:, q]
            at_lo = stat[q] == _AT_LO

            t_best = up[q] - lo[q]
            leave = -1
            for i in range(r):
                wi = w[i] if at_lo else -w[i]
                bi = basis[i]
                if wi > _PIV_TOL:
                    ti = (xb[i] - lo[bi]) / wi
                elif wi < -_PIV_TOL:
                    ui = up[bi]
                    if np.isinf(ui):
                        continue
                    ti = (xb[i] - ui) / wi
                else:
                    continue
                if ti < 0.0:
                    ti = 0.0
                if ti < t_best or (ti == t_best and leave >= 0 and bi < basis[leave]):
                    t_best = ti
                    leave = i
            if not np.isfinite(t_best):
                return UNBOUNDED, None

            if leave < 0:
                stat[q] = _AT_UP if at_lo else _AT_LO
                xval[q] = up[q] if at_lo else lo[q]
            else:
                lv = basis[leave]
                wi = w[leave] if at_lo else -w[leave]
                if wi > 0:
                    stat[lv] = _AT_LO
                    xval[lv] = lo[lv]
                else:
                    stat[lv] = _AT_UP
                    xval[lv] = up[lv]
                basis[leave] = q
                stat[q] = _BASIC

            pivots += 1
            if pivots > limit:
                return BREAKDOWN, None
            if score[q] * t_best > -1e-12:
                streak += 1
                if streak > 2 * (n + r):
                    bland = True
            else:
                streak = 0

    zeros_n = np.zeros(n)
    zeros_r = np.zeros(r)

    if na > 0:
        cost1 = np.zeros(m)
        cost1[n + r :] = 1.0
        code, res = run_phase(cost1)
        if code != OPTIMAL:
            return code, zeros_n, np.nan, pivots, zeros_r
        xb, _ = res
        z1 = float(cost1 @ extract(xb))
        scale = max(1.0, float(np.abs(g).max()) if r else 1.0)
        if z1 > 1e-8 * scale:
            return INFEASIBLE, zeros_n, np.nan, pivots, zeros_r
        lo[n + r :] = 0.0
        up[n + r :] = 0.0
        xval[n + r :] = 0.0

    cost2 = np.zeros(m)
    cost2[:n] = c
    code, res = run_phase(cost2)
    if code != OPTIMAL:
        return code, zeros_n, np.nan, pivots, zeros_r
    xb, y = res
    x = extract(xb)[:n].copy()
    return OPTIMAL, x, float(c @ x), pivots, np.asarray(y, dtype=np.float64).copy()

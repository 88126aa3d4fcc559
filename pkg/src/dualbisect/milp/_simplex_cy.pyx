# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Bounded-variable two-phase simplex, dense, compiled backend.

Twin of ``_simplex_py``; see that module for the pivoting rules.  The basis
inverse is refreshed from scratch every pivot (problems are tiny, a fresh
Gauss-Jordan factorization is cheaper than guarding an eta-file update).
"""

import numpy as np

from libc.math cimport INFINITY, fabs, isfinite

BACKEND = "cython"

cdef int _OPTIMAL = 0
cdef int _INFEASIBLE = 1
cdef int _UNBOUNDED = 2
cdef int _BREAKDOWN = 3

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
BREAKDOWN = 3

cdef int _AT_LO = 0
cdef int _AT_UP = 1
cdef int _BASIC = 2
cdef double _PIV_TOL = 1e-10


cdef int _invert(double[:, ::1] A, long[::1] basis, double[:, ::1] M,
                 double[:, ::1] Binv, int r) noexcept nogil:
    cdef int i, j, k, p
    cdef double mx, v, piv
    for i in range(r):
        for j in range(r):
            M[i, j] = A[i, basis[j]]
            Binv[i, j] = 1.0 if i == j else 0.0
    for k in range(r):
        p = k
        mx = fabs(M[k, k])
        for i in range(k + 1, r):
            v = fabs(M[i, k])
            if v > mx:
                mx = v
                p = i
        if mx < 1e-12:
            return 1
        if p != k:
            for j in range(r):
                v = M[k, j]; M[k, j] = M[p, j]; M[p, j] = v
                v = Binv[k, j]; Binv[k, j] = Binv[p, j]; Binv[p, j] = v
        piv = M[k, k]
        for j in range(r):
            M[k, j] /= piv
            Binv[k, j] /= piv
        for i in range(r):
            if i == k:
                continue
            v = M[i, k]
            if v != 0.0:
                for j in range(r):
                    M[i, j] -= v * M[k, j]
                    Binv[i, j] -= v * Binv[k, j]
    return 0


cdef int _run_phase(double[:, ::1] A, double[::1] g,
                    double[::1] lo, double[::1] up,
                    long[::1] stat, long[::1] basis, double[::1] xval,
                    double[::1] cost,
                    double[:, ::1] M, double[:, ::1] Binv,
                    double[::1] xb, double[::1] y, double[::1] d,
                    double[::1] w, double[::1] rhs,
                    int n, int r, int m, long limit, double rc_tol,
                    long* pivots) noexcept nogil:
    cdef bint bland = False, at_lo
    cdef int streak = 0
    cdef int i, j, q, leave
    cdef long bi, lv
    cdef double tol_d, s, ti, t_best, wi, ui, v, enter_score

    tol_d = 1.0
    for j in range(m):
        v = fabs(cost[j])
        if v > tol_d:
            tol_d = v
    tol_d *= rc_tol

    while True:
        if _invert(A, basis, M, Binv, r):
            return _BREAKDOWN

        for i in range(r):
            rhs[i] = g[i]
        for j in range(m):
            if stat[j] != _BASIC:
                v = xval[j]
                if v != 0.0:
                    for i in range(r):
                        rhs[i] -= A[i, j] * v
        for i in range(r):
            s = 0.0
            for j in range(r):
                s += Binv[i, j] * rhs[j]
            if not isfinite(s):
                return _BREAKDOWN
            xb[i] = s
        for j in range(r):
            s = 0.0
            for i in range(r):
                s += cost[basis[i]] * Binv[i, j]
            y[j] = s
        for j in range(m):
            s = cost[j]
            for i in range(r):
                s -= y[i] * A[i, j]
            d[j] = s

        q = -1
        enter_score = -tol_d
        for j in range(m):
            if stat[j] == _BASIC or lo[j] == up[j]:
                continue
            s = d[j] if stat[j] == _AT_LO else -d[j]
            if bland:
                if s < -tol_d:
                    q = j
                    enter_score = s
                    break
            else:
                if s < enter_score:
                    enter_score = s
                    q = j
        if q < 0:
            return _OPTIMAL

        at_lo = stat[q] == _AT_LO
        for i in range(r):
            s = 0.0
            for j in range(r):
                s += Binv[i, j] * A[j, q]
            w[i] = s

        t_best = up[q] - lo[q]
        leave = -1
        for i in range(r):
            wi = w[i] if at_lo else -w[i]
            bi = basis[i]
            if wi > _PIV_TOL:
                ti = (xb[i] - lo[bi]) / wi
            elif wi < -_PIV_TOL:
                ui = up[bi]
                if ui == INFINITY:
                    continue
                ti = (xb[i] - ui) / wi
            else:
                continue
            if ti < 0.0:
                ti = 0.0
            if ti < t_best or (ti == t_best and leave >= 0 and bi < basis[leave]):
                t_best = ti
                leave = i
        if t_best == INFINITY:
            return _UNBOUNDED

        if leave < 0:
            if at_lo:
                stat[q] = _AT_UP
                xval[q] = up[q]
            else:
                stat[q] = _AT_LO
                xval[q] = lo[q]
        else:
            lv = basis[leave]
            wi = w[leave] if at_lo else -w[leave]
            if wi > 0.0:
                stat[lv] = _AT_LO
                xval[lv] = lo[lv]
            else:
                stat[lv] = _AT_UP
                xval[lv] = up[lv]
            basis[leave] = q
            stat[q] = _BASIC

        pivots[0] += 1
        if pivots[0] > limit:
            return _BREAKDOWN
        if enter_score * t_best > -1e-12:
            streak += 1
            if streak > 2 * (n + r):
                bland = True
        else:
            streak = 0


def solve_bounded_lp(c, G, g, lower, upper, pivot_limit=0, rc_tol=1e-9):
    """Minimize c@x s.t. G@x <= g, lower <= x <= upper (all bounds finite).

    Returns (status, x, objective, pivots, row_duals).
    """
    c = np.ascontiguousarray(c, dtype=np.float64)
    Gm = np.ascontiguousarray(np.atleast_2d(np.asarray(G, dtype=np.float64)))
    gv = np.ascontiguousarray(g, dtype=np.float64)
    lo_x = np.ascontiguousarray(lower, dtype=np.float64)
    up_x = np.ascontiguousarray(upper, dtype=np.float64)
    cdef int n = c.shape[0]
    if Gm.size == 0:
        Gm = np.zeros((0, n))
    cdef int r = Gm.shape[0]
    cdef long limit = int(pivot_limit) if pivot_limit > 0 else 50 * (n + r)

    resid = gv - Gm @ lo_x
    art_rows = np.flatnonzero(resid < 0.0)
    cdef int na = art_rows.size
    cdef int m = n + r + na

    A = np.zeros((r, m))
    A[:, :n] = Gm
    A[np.arange(r), n + np.arange(r)] = 1.0
    A[art_rows, n + r + np.arange(na)] = -1.0
    A = np.ascontiguousarray(A)

    lo = np.concatenate([lo_x, np.zeros(r + na)])
    up = np.concatenate([up_x, np.full(r + na, np.inf)])

    stat = np.full(m, _AT_LO, dtype=np.int64)
    basis = (n + np.arange(r)).astype(np.int64)
    basis[art_rows] = n + r + np.arange(na)
    stat[basis] = _BASIC
    xval = lo.copy()

    Mw = np.empty((r, r))
    Binv = np.empty((r, r))
    xb = np.empty(r)
    y = np.zeros(r)
    d = np.empty(m)
    w = np.empty(r)
    rhs = np.empty(r)

    cdef long pivots = 0
    cdef int code
    zeros_n = np.zeros(n)
    zeros_r = np.zeros(r)

    cost = np.zeros(m)
    if na > 0:
        cost[n + r:] = 1.0
        code = _run_phase(A, gv, lo, up, stat, basis, xval, cost,
                          Mw, Binv, xb, y, d, w, rhs,
                          n, r, m, limit, rc_tol, &pivots)
        if code != OPTIMAL:
            return code, zeros_n, float("nan"), pivots, zeros_r
        xfull = xval.copy()
        xfull[basis] = np.asarray(xb)
        z1 = float(cost @ xfull)
        scale = max(1.0, float(np.abs(gv).max()) if r else 1.0)
        if z1 > 1e-8 * scale:
            return INFEASIBLE, zeros_n, float("nan"), pivots, zeros_r
        lo[n + r:] = 0.0
        up[n + r:] = 0.0
        xval[n + r:] = 0.0
        cost[n + r:] = 0.0

    cost[:n] = c
    code = _run_phase(A, gv, lo, up, stat, basis, xval, cost,
                      Mw, Binv, xb, y, d, w, rhs,
                      n, r, m, limit, rc_tol, &pivots)
    if code != OPTIMAL:
        return code, zeros_n, float("nan"), pivots, zeros_r
    xfull = xval.copy()
    xfull[basis] = np.asarray(xb)
    x = np.ascontiguousarray(xfull[:n])
    return _OPTIMAL, x, float(c @ x), pivots, np.asarray(y).copy()

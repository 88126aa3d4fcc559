"""Exact MILP solves: depth-first branch-and-bound and the enumeration
oracle used as ground truth in tests.

Branching rule: most-fractional variable, lowest index on ties, down branch
explored first.  The incumbent is replaced only on strict improvement, so the
returned minimizer is the first optimal point in branching order; together
with the kernel's deterministic pivoting this makes every solve reproducible.
"""

import itertools
import math

import numpy as np

from ..errors import EnumerationTooLarge, NodeLimitExceeded
from .model import INFEASIBLE, OPTIMAL, MipSolution, MixedIntegerProgram
from .simplex import simplex_solve, solve_lp_arrays

_INT_TOL = 1e-7
_PRUNE_TOL = 1e-9


def _check_warm(mip, warm):
    """A warm start must already satisfy bounds, rows and integrality."""
    w = np.asarray(warm, dtype=np.float64)
    lp = mip.lp
    if w.shape != (lp.n,):
        return None
    if np.any(w < lp.lower - _INT_TOL) or np.any(w > lp.upper + _INT_TOL):
        return None
    if lp.n_rows and np.any(lp.ineq_matrix @ w > lp.ineq_rhs + 1e-9):
        return None
    ints = w[mip.integer_mask]
    if ints.size and np.max(np.abs(ints - np.round(ints))) > _INT_TOL:
        return None
    return w


def branch_and_bound(mip: MixedIntegerProgram, node_limit=10**6, warm=None) -> MipSolution:
    """Globally optimal mixed-integer solution via depth-first search.

    ``warm`` may carry a known feasible point used as the initial incumbent
    (its objective prunes the tree; the optimum is unaffected).
    """
    lp = mip.lp
    if mip.n_integer == 0:
        return simplex_solve(lp)

    int_idx = np.flatnonzero(mip.integer_mask)
    cost, G, g = lp.cost, lp.ineq_matrix, lp.ineq_rhs

    best_obj = math.inf
    best_x = None
    if warm is not None:
        w = _check_warm(mip, warm)
        if w is not None:
            best_obj = float(cost @ w)
            best_x = w.copy()
            best_x[int_idx] = np.round(best_x[int_idx])

    stack = [(lp.lower.copy(), lp.upper.copy())]
    nodes = 0
    while stack:
        lo, up = stack.pop()
        nodes += 1
        if nodes > node_limit:
            raise NodeLimitExceeded(f"branch and bound exceeded {node_limit} nodes")
        res = solve_lp_arrays(cost, G, g, lo, up)
        if res.status != OPTIMAL:
            continue
        if res.objective >= best_obj - _PRUNE_TOL:
            continue
        x = res.x
        fracs = np.abs(x[int_idx] - np.round(x[int_idx]))
        if fracs.size == 0 or fracs.max() <= _INT_TOL:
            obj = res.objective
            if obj < best_obj:
                best_obj = obj
                best_x = x.copy()
                best_x[int_idx] = np.round(best_x[int_idx])
            continue
        # most fractional: distance to the nearest integer, ties by index
        j = int(int_idx[int(np.argmax(fracs))])
        xj = x[j]
        f = math.floor(xj)
        down_up = up.copy()
        down_up[j] = f
        up_lo = lo.copy()
        up_lo[j] = f + 1
        if up_lo[j] <= up[j]:
            stack.append((up_lo, up))
        if down_up[j] >= lo[j]:
            stack.append((lo, down_up))

    if best_x is None:
        return MipSolution(INFEASIBLE, np.zeros(lp.n), math.nan)
    return MipSolution(OPTIMAL, best_x, best_obj)


def brute_force(mip: MixedIntegerProgram, enumeration_cap=10**6) -> MipSolution:
    """Enumerate every integer assignment, solve the residual LP, keep the
    best.  First optimal assignment in lexicographic enumeration order wins
    ties, so results are bit-for-bit reproducible."""
    lp = mip.lp
    if mip.n_integer == 0:
        return simplex_solve(lp)

    int_idx = np.flatnonzero(mip.integer_mask)
    ranges = []
    total = 1
    for j in int_idx:
        k = int(lp.upper[j] - lp.lower[j]) + 1
        total *= k
        ranges.append(range(int(lp.lower[j]), int(lp.upper[j]) + 1))
    if total > enumeration_cap:
        raise EnumerationTooLarge(
            f"{total} integer assignments exceed the cap of {enumeration_cap}"
        )

    cost, G, g = lp.cost, lp.ineq_matrix, lp.ineq_rhs
    best_obj = math.inf
    best_x = None
    lo = lp.lower.copy()
    up = lp.upper.copy()
    for assignment in itertools.product(*ranges):
        vals = np.asarray(assignment, dtype=np.float64)
        lo[int_idx] = vals
        up[int_idx] = vals
        res = solve_lp_arrays(cost, G, g, lo, up)
        if res.status != OPTIMAL:
            continue
        if res.objective < best_obj:
            best_obj = res.objective
            best_x = res.x.copy()
            best_x[int_idx] = vals

    if best_x is None:
        return MipSolution(INFEASIBLE, np.zeros(lp.n), math.nan)
    return MipSolution(OPTIMAL, best_x, best_obj)

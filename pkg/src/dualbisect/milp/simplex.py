"""Public LP interface; picks the compiled kernel when available.

Set ``DUALBISECT_PURE_PYTHON=1`` to force the pure-python backend.
"""

import os
from dataclasses import dataclass

import numpy as np

from ..errors import NumericalBreakdown
from . import _simplex_py
from .model import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, MipSolution

if os.environ.get("DUALBISECT_PURE_PYTHON"):
    _impl = _simplex_py
else:
    try:
        from . import _simplex_cy as _impl
    except ImportError:
        _impl = _simplex_py

BACKEND = _impl.BACKEND

_STATUS = {
    _impl.OPTIMAL: OPTIMAL,
    _impl.INFEASIBLE: INFEASIBLE,
    _impl.UNBOUNDED: UNBOUNDED,
}


@dataclass(frozen=True)
class LpResult:
    status: str
    x: np.ndarray
    objective: float
    pivots: int
    row_duals: np.ndarray


def solve_lp_arrays(cost, G, g, lower, upper, pivot_limit=0):
    """Raw-array LP solve; returns an LpResult.

    Raises NumericalBreakdown when the kernel hits its pivot limit or a
    singular basis (cycling / conditioning trouble).
    """
    code, x, obj, pivots, y = _impl.solve_bounded_lp(
        cost, G, g, lower, upper, pivot_limit=pivot_limit
    )
    if code == _impl.BREAKDOWN:
        raise NumericalBreakdown(
            f"LP kernel gave up after {pivots} pivots (limit or singular basis)"
        )
    return LpResult(_STATUS[code], x, obj, int(pivots), y)


def solve_lp(lp: LinearProgram, pivot_limit=0) -> LpResult:
    return solve_lp_arrays(
        lp.cost, lp.ineq_matrix, lp.ineq_rhs, lp.lower, lp.upper, pivot_limit
    )


def simplex_solve(lp: LinearProgram, pivot_limit=0) -> MipSolution:
    """Solve the LP and return a MipSolution (status, x, objective)."""
    res = solve_lp(lp, pivot_limit)
    return MipSolution(res.status, res.x, res.objective)

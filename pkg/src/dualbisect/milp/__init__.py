"""Dense small-scale LP/MILP kernel: two-phase simplex (compiled core with a
pure-python fallback), depth-first branch-and-bound, and the integer
enumeration oracle."""

from .branch_bound import branch_and_bound, brute_force
from .model import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    MipSolution,
    MixedIntegerProgram,
    dump_mip,
    load_mip,
    mip_from_dict,
    mip_to_dict,
)
from .simplex import BACKEND, LpResult, simplex_solve, solve_lp, solve_lp_arrays

__all__ = [
    "BACKEND",
    "INFEASIBLE",
    "OPTIMAL",
    "UNBOUNDED",
    "LinearProgram",
    "LpResult",
    "MipSolution",
    "MixedIntegerProgram",
    "branch_and_bound",
    "brute_force",
    "dump_mip",
    "load_mip",
    "mip_from_dict",
    "mip_to_dict",
    "simplex_solve",
    "solve_lp",
    "solve_lp_arrays",
]

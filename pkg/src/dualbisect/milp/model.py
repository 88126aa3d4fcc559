"""Dense LP/MILP containers and their JSON wire format."""

import json
from dataclasses import dataclass, field, replace

import numpy as np


def _as_f64(a):
    return np.ascontiguousarray(np.asarray(a, dtype=np.float64))


@dataclass(frozen=True)
class LinearProgram:
    """min cost@x  s.t.  ineq_matrix@x <= ineq_rhs,  lower <= x <= upper.

    All bounds must be finite (the feasible set is a compact box slice),
    so the LP is never unbounded.
    """

    cost: np.ndarray
    ineq_matrix: np.ndarray
    ineq_rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "cost", _as_f64(self.cost))
        object.__setattr__(self, "ineq_matrix", _as_f64(np.atleast_2d(self.ineq_matrix)))
        object.__setattr__(self, "ineq_rhs", _as_f64(self.ineq_rhs))
        object.__setattr__(self, "lower", _as_f64(self.lower))
        object.__setattr__(self, "upper", _as_f64(self.upper))
        n = self.cost.shape[0]
        if self.ineq_matrix.size == 0:
            object.__setattr__(self, "ineq_matrix", np.zeros((0, n)))
            object.__setattr__(self, "ineq_rhs", np.zeros(0))
        if self.ineq_matrix.shape[1] != n:
            raise ValueError("constraint matrix width does not match cost length")
        if self.ineq_matrix.shape[0] != self.ineq_rhs.shape[0]:
            raise ValueError("constraint matrix / rhs row mismatch")
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise ValueError("bound vectors must have the cost's length")
        if not (np.isfinite(self.lower).all() and np.isfinite(self.upper).all()):
            raise ValueError("all variable bounds must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def n(self):
        return self.cost.shape[0]

    @property
    def n_rows(self):
        return self.ineq_matrix.shape[0]

    def with_cost(self, cost):
        return replace(self, cost=cost)

    def with_bounds(self, lower, upper):
        return replace(self, lower=lower, upper=upper)


@dataclass(frozen=True)
class MixedIntegerProgram:
    """A LinearProgram plus a mask marking the integer coordinates."""

    lp: LinearProgram
    integer_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        mask = self.integer_mask
        if mask is None:
            mask = np.zeros(self.lp.n, dtype=bool)
        mask = np.ascontiguousarray(np.asarray(mask, dtype=bool))
        if mask.shape != (self.lp.n,):
            raise ValueError("integer mask length mismatch")
        object.__setattr__(self, "integer_mask", mask)
        lo, up = self.lp.lower[mask], self.lp.upper[mask]
        if np.any(lo != np.round(lo)) or np.any(up != np.round(up)):
            raise ValueError("integer variables need integral bounds")

    @property
    def n(self):
        return self.lp.n

    @property
    def n_integer(self):
        return int(self.integer_mask.sum())

    def with_cost(self, cost):
        return MixedIntegerProgram(self.lp.with_cost(cost), self.integer_mask)


@dataclass(frozen=True)
class MipSolution:
    status: str  # "Optimal" | "Infeasible" | "Unbounded"
    x: np.ndarray
    objective: float

    @property
    def is_optimal(self):
        return self.status == "Optimal"


OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"


def mip_to_dict(mip: MixedIntegerProgram) -> dict:
    lp = mip.lp
    return {
        "cost": lp.cost.tolist(),
        "G": lp.ineq_matrix.tolist(),
        "g": lp.ineq_rhs.tolist(),
        "lower": lp.lower.tolist(),
        "upper": lp.upper.tolist(),
        "integer_mask": [bool(b) for b in mip.integer_mask],
    }


def mip_from_dict(d: dict) -> MixedIntegerProgram:
    lp = LinearProgram(
        cost=d["cost"],
        ineq_matrix=d["G"],
        ineq_rhs=d["g"],
        lower=d["lower"],
        upper=d["upper"],
    )
    return MixedIntegerProgram(lp, d["integer_mask"])


def dump_mip(mip: MixedIntegerProgram, path):
    with open(path, "w") as fh:
        json.dump(mip_to_dict(mip), fh, indent=1)


def load_mip(path) -> MixedIntegerProgram:
    with open(path) as fh:
        return mip_from_dict(json.load(fh))

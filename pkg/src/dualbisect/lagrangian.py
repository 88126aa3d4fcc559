"""Oracle abstraction for min f(x) s.t. v(x) <= 0, x in X, and the scalar
dual machinery built on it.

An oracle answers a single question: for a multiplier ``lam >= 0``, which
point of X minimizes f(x) + lam*v(x)?  Everything else (dual values, warm
starts, bisection) is derived from that map.  Implementations must be
deterministic for a fixed ``lam`` (documented tie-break rule) and safe to
call from several threads at once.
"""

import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveLambdaRef, NotStrictlyFeasible, OracleFailure


@dataclass(frozen=True)
class PrimalPoint:
    """A point of X with its cost and scalar constraint value.

    ``v_val`` is negative for slack, positive for violation.
    """

    x: np.ndarray
    f_val: float
    v_val: float

    def __post_init__(self):
        if not (np.isfinite(self.f_val) and np.isfinite(self.v_val)):
            raise ValueError("PrimalPoint requires finite cost and violation")

    @property
    def feasible(self):
        return self.v_val <= 0.0


@dataclass(frozen=True)
class DualEvaluation:
    lam: float
    phi: float
    witness: PrimalPoint


class LagrangianOracle(ABC):
    """Deterministic map lam -> argmin_{x in X} f(x) + lam*v(x).

    Subclasses set ``tie_break`` to a short identifier of their
    deterministic tie-break rule.
    """

    tie_break = "unspecified"

    def __init__(self):
        self._phi0 = None
        self._phi0_lock = threading.Lock()

    @abstractmethod
    def minimize(self, lam: float) -> PrimalPoint:
        """Return a Lagrangian minimizer for multiplier ``lam`` (>= 0)."""

    def phi_at_zero(self) -> DualEvaluation:
        """phi(0), computed once and cached (write-once)."""
        if self._phi0 is None:
            with self._phi0_lock:
                if self._phi0 is None:
                    self._phi0 = evaluate_dual(self, 0.0)
        return self._phi0


def evaluate_dual(oracle: LagrangianOracle, lam: float) -> DualEvaluation:
    """Evaluate the dual function phi(lam) = min_x f(x) + lam*v(x).

    Raises OracleFailure when the oracle cannot produce a minimizer
    (the underlying feasible set is empty: the problem is ill-posed).
    """
    if lam < 0.0:
        raise ValueError("dual function is only evaluated at lam >= 0")
    if lam == 0.0 and getattr(oracle, "_phi0", None) is not None:
        return oracle._phi0
    point = oracle.minimize(lam)
    phi = point.f_val + lam * point.v_val
    if not np.isfinite(phi):
        raise OracleFailure(f"oracle returned a non-finite dual value at lam={lam}")
    return DualEvaluation(lam, phi, point)


def warm_start_lambda_ref(oracle: LagrangianOracle, x_tilde: PrimalPoint) -> float:
    """Multiplier upper bound from a strictly feasible point:
    (phi(0) - f(x_tilde)) / v(x_tilde).

    This value provably exceeds every dual optimizer, so the doubling phase
    of the bisection solver never runs (K = 0).  Raises NotStrictlyFeasible
    when v(x_tilde) >= 0 and NonPositiveLambdaRef when the formula comes out
    <= 0, which means the scalar constraint is redundant and the problem is
    solvable without dualization.
    """
    if x_tilde.v_val >= 0.0:
        raise NotStrictlyFeasible(
            f"warm start needs v(x)<0, got v={x_tilde.v_val!r}"
        )
    phi0 = oracle.phi_at_zero().phi
    lam_ref = (phi0 - x_tilde.f_val) / x_tilde.v_val
    if lam_ref <= 0.0:
        raise NonPositiveLambdaRef(
            f"computed lambda_ref={lam_ref!r}: the scalar constraint looks redundant"
        )
    return lam_ref


class FiniteCandidateOracle(LagrangianOracle):
    """Reference oracle minimizing over an explicit finite candidate set.

    Exact for problems whose Lagrangian attains its minimum on the listed
    points (e.g. linear f, v over a box with the vertices listed).  Ties go
    to the first candidate in the given order.
    """

    tie_break = "first-candidate"

    def __init__(self, points, f, v):
        super().__init__()
        self.points = [np.atleast_1d(np.asarray(p, dtype=np.float64)) for p in points]
        if not self.points:
            raise ValueError("need at least one candidate point")
        self._fv = [(float(f(p)), float(v(p))) for p in self.points]

    def minimize(self, lam: float) -> PrimalPoint:
        best = None
        best_val = np.inf
        for p, (fv, vv) in zip(self.points, self._fv):
            val = fv + lam * vv
            if val < best_val:
                best_val = val
                best = PrimalPoint(p, fv, vv)
        return best

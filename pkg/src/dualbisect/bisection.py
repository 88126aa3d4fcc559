"""Dual bisection on the scalar multiplier.

Two cycles.  The doubling cycle grows the multiplier geometrically from
``lambda_ref`` until the Lagrangian minimizer stops violating the scalar
constraint, which brackets the dual optimum.  The bisection cycle then halves
the bracket, keeping the best feasible minimizer seen; each update can only
lower its cost, so the iterates are feasible with non-increasing cost.  A
probe whose constraint value is (numerically) zero is optimal and returned
immediately together with its certificate multiplier.
"""

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import InfeasibleSuspected
from .lagrangian import LagrangianOracle, PrimalPoint

OPTIMAL_ZERO_VIOLATION = "OptimalZeroViolation"
FEASIBLE_CONVERGED = "FeasibleConverged"
MAX_ITERATIONS = "MaxIterations"
INFEASIBLE_SUSPECTED = "InfeasibleSuspected"

DOUBLING = "doubling"
BISECTION = "bisection"


@dataclass(frozen=True)
class DualBiConfig:
    lambda_ref: float
    interval_tol: float = 1e-5
    v_zero_tol: float = 0.0  # exact zero test by default
    max_doubling: int = 64
    max_bisection: int = 10_000
    keep_history: bool = True

    def __post_init__(self):
        if not self.lambda_ref > 0.0:
            raise ValueError("lambda_ref must be positive")
        if not self.interval_tol > 0.0:
            raise ValueError("interval_tol must be positive")
        if self.v_zero_tol < 0.0:
            raise ValueError("v_zero_tol must be nonnegative")
        if self.max_doubling < 1 or self.max_bisection < 1:
            raise ValueError("iteration caps must be >= 1")


@dataclass(frozen=True)
class DualBiIterate:
    k: int
    phase: str  # "doubling" | "bisection"
    lambda_lo: float
    lambda_hi: float
    lambda_mid: Optional[float]  # probed midpoint; None in the first cycle
    candidate: PrimalPoint
    best_feasible: Optional[PrimalPoint]

    @property
    def lambda_probe(self):
        return self.lambda_hi if self.lambda_mid is None else self.lambda_mid

    @property
    def phi(self):
        lam = self.lambda_probe
        return self.candidate.f_val + lam * self.candidate.v_val


@dataclass(frozen=True)
class DualBiResult:
    status: str
    best: Optional[PrimalPoint]
    K: int
    history: list
    final_interval: tuple

    @property
    def probe_count(self):
        """Total oracle calls, including the initial probe at lambda_ref."""
        return len(self.history)

    @property
    def iterations(self):
        """Doubling plus bisection iterations (the initial probe is setup)."""
        return max(0, len(self.history) - 1)

    def dual_values(self):
        return [(it.lambda_probe, it.phi) for it in self.history]

    @property
    def best_dual(self):
        return max(phi for _, phi in self.dual_values())


@dataclass
class DoublingResult:
    K: int
    bracket: tuple
    probe: PrimalPoint
    probes: list = field(default_factory=list)


def _doubling(oracle, lambda_ref, v_zero_tol, max_doubling):
    lo, hi = 0.0, float(lambda_ref)
    probe = oracle.minimize(hi)
    probes = [(0, lo, hi, probe)]
    k = 0
    while probe.v_val > v_zero_tol:
        if k >= max_doubling or not math.isfinite(2.0 * hi):
            return None, k, lo, hi, probe, probes
        lo, hi = hi, 2.0 * hi
        probe = oracle.minimize(hi)
        k += 1
        probes.append((k, lo, hi, probe))
    return k, k, lo, hi, probe, probes


def doubling_phase(oracle: LagrangianOracle, lambda_ref, v_zero_tol=0.0,
                   max_doubling=64) -> DoublingResult:
    """First cycle alone: bracket the dual optimum by doubling.

    Returns K (number of doublings), the bracket (2^{K-1}*lambda_ref or 0,
    2^K*lambda_ref), and the minimizer probed at the bracket's right end,
    whose constraint value is <= v_zero_tol.  Raises InfeasibleSuspected when
    max_doubling is exhausted with the probe still violating (the problem may
    have no feasible point).
    """
    if lambda_ref <= 0.0:
        raise ValueError("lambda_ref must be positive")
    ok, k, lo, hi, probe, probes = _doubling(oracle, lambda_ref, v_zero_tol, max_doubling)
    if ok is None:
        raise InfeasibleSuspected(
            f"doubling exhausted {k} iterations with v={probe.v_val!r} still positive"
        )
    return DoublingResult(K=k, bracket=(lo, hi), probe=probe, probes=probes)


def solve(oracle: LagrangianOracle, config: DualBiConfig) -> DualBiResult:
    """Run both cycles and return the best feasible point found.

    The final interval provably contains every dual optimizer; the status
    records which stopping rule fired.
    """
    tol = config.v_zero_tol
    history = []

    ok, K, lo, hi, probe, probes = _doubling(
        oracle, config.lambda_ref, tol, config.max_doubling
    )
    if config.keep_history:
        history.extend(
            DualBiIterate(k, DOUBLING, plo, phi_, None, cand, None)
            for k, plo, phi_, cand in probes
        )
    if ok is None:
        return DualBiResult(INFEASIBLE_SUSPECTED, None, K, history, (lo, hi))

    if abs(probe.v_val) <= tol:
        return DualBiResult(OPTIMAL_ZERO_VIOLATION, probe, K, history, (lo, hi))

    best = probe
    k = K
    bis = 0
    while True:
        mid = 0.5 * (lo + hi)
        cand = oracle.minimize(mid)
        bis += 1
        if abs(cand.v_val) <= tol:
            best = cand
            if config.keep_history:
                history.append(DualBiIterate(k, BISECTION, lo, hi, mid, cand, best))
            return DualBiResult(OPTIMAL_ZERO_VIOLATION, best, K, history, (lo, hi))
        if cand.v_val < -tol:
            best = cand
            if config.keep_history:
                history.append(DualBiIterate(k, BISECTION, lo, hi, mid, cand, best))
            hi = mid
        else:
            if config.keep_history:
                history.append(DualBiIterate(k, BISECTION, lo, hi, mid, cand, best))
            lo = mid
        k += 1
        if hi - lo < config.interval_tol:
            return DualBiResult(FEASIBLE_CONVERGED, best, K, history, (lo, hi))
        if bis >= config.max_bisection:
            return DualBiResult(MAX_ITERATIONS, best, K, history, (lo, hi))


def write_trace(result: DualBiResult, path):
    """Iteration trace as CSV for plotting."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "phase", "lambda_lo", "lambda_hi", "lambda_probe", "f", "v", "best_f"])
        for it in result.history:
            w.writerow([
                it.k,
                it.phase,
                repr(it.lambda_lo),
                repr(it.lambda_hi),
                repr(it.lambda_probe),
                repr(it.candidate.f_val),
                repr(it.candidate.v_val),
                "" if it.best_feasible is None else repr(it.best_feasible.f_val),
            ])

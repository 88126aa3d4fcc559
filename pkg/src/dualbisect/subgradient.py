"""Projected-subgradient baseline for the scalar-coupled multi-agent MILP.

Dual ascent with diminishing steps alpha_bar/kappa: each iteration runs one
best response per agent at the current multiplier, steps the multiplier along
the coupling violation, and projects at zero.  Once the multiplier has
practically converged (consecutive changes below ``conv_tol`` for more than
``window_w`` iterations; the flag freezes once set), step-size-weighted
ergodic averages of the primal iterates are accumulated until they settle
too.  The returned mixed-integer point is the cheapest feasible iterate
stored since the averaging window opened; with a scalar non-redundant
coupling such an iterate exists in the stream, and its tightening residual
[sum_i A_i xi_i - b]_+ is exactly zero, so the outer tightening loop of the
scheme this mirrors halts after a single pass.
"""

import bisect
import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .agents import MultiAgentInstance, agent_best_response
from .errors import DidNotConverge, NoFeasibleIterate


@dataclass(frozen=True)
class SubgradientConfig:
    alpha_bar: float = 7e-4
    conv_tol: float = 1e-5
    window_w: int = 10
    max_iter: int = 5000
    lambda0: float = 0.0

    def __post_init__(self):
        if self.alpha_bar <= 0.0 or self.conv_tol <= 0.0:
            raise ValueError("alpha_bar and conv_tol must be positive")
        if self.window_w < 1 or self.max_iter < 1:
            raise ValueError("window_w and max_iter must be >= 1")
        if self.lambda0 < 0.0:
            raise ValueError("lambda0 must be nonnegative")

    def alpha(self, kappa: int) -> float:
        # kappa starts at 1, so the 1/kappa schedule is always defined and
        # satisfies sum alpha = inf, sum alpha^2 < inf.
        return self.alpha_bar / kappa


@dataclass
class SubgradientTrace:
    lambda_seq: list = field(default_factory=list)
    mu_seq: list = field(default_factory=list)
    cost_seq: list = field(default_factory=list)
    feasible_seq: list = field(default_factory=list)
    # iterates repeat heavily near convergence, so points are interned:
    # primal_store maps kappa -> index into the distinct-point table
    primal_store: dict = field(default_factory=dict)
    points: list = field(default_factory=list)  # (x, cost, usage) distinct
    ergodic: Optional[np.ndarray] = None
    tau_star: Optional[int] = None
    lambda_converged_at: Optional[int] = None

    def point(self, kappa):
        """(x, cost, usage) of the iterate stored for ``kappa``."""
        return self.points[self.primal_store[kappa]]


@dataclass(frozen=True)
class CompetitorResult:
    lambda_star: float
    xi_lp: np.ndarray
    xi_feasible: np.ndarray
    f_feasible: float
    iterations: int
    rho1: float
    best_dual: float
    trace: SubgradientTrace


def scaled_alpha_bar(alpha_bar: float, m: int) -> float:
    """Cost and violation grow linearly with the agent count, so the step
    constant is scaled by m/100 relative to its 100-agent reference value."""
    return alpha_bar * (m / 100.0)


class _PieceCache:
    """Best responses of one agent, certified on multiplier intervals.

    The agent's dual value is concave and piecewise linear; the response
    solved at some multiplier traces an affine value line that supports it.
    If the response at the left end of a bracket is still optimal at the
    right end (its line meets the value there), it is optimal on the whole
    bracket, so queries inside are answered without touching the MILP
    kernel.  The dual iterates hover inside a shrinking band near
    convergence, which turns almost every solve into a lookup.
    """

    __slots__ = ("agent", "index", "lams", "recs")

    def __init__(self, agent, index):
        self.agent = agent
        self.index = index
        self.lams = []
        self.recs = []  # parallel to lams: AgentResponse

    def response(self, lam: float):
        lams, recs = self.lams, self.recs
        i = bisect.bisect_left(lams, lam)
        if i < len(lams) and lams[i] == lam:
            return recs[i]
        if 0 < i < len(lams):
            left, right = recs[i - 1], recs[i]
            lam2 = lams[i]
            value2 = right.local_cost + lam2 * right.local_usage
            reach = left.local_cost + lam2 * left.local_usage
            if reach <= value2 + 1e-9 * max(1.0, abs(value2)):
                return left
        warm = None
        if recs:
            near = recs[i - 1] if i > 0 else recs[0]
            warm = near.xi
        r = agent_best_response(self.agent, lam, self.index, warm=warm)
        lams.insert(i, lam)
        recs.insert(i, r)
        return r


def run(instance: MultiAgentInstance, config: SubgradientConfig) -> CompetitorResult:
    """Run the scheme until the ergodic average settles.

    Raises NoFeasibleIterate when no stored iterate satisfies the coupling
    constraint at selection time (window or max_iter too small, or a
    redundant constraint) and DidNotConverge when max_iter runs out first.
    """
    b = instance.budget
    w = config.window_w
    lam = float(config.lambda0)
    caches = [_PieceCache(a, i) for i, a in enumerate(instance.agents)]

    trace = SubgradientTrace()
    store = trace.primal_store
    points = trace.points
    interned = {}  # tuple of response ids -> index into points
    conv_count = 0
    frozen = False
    anchor = None
    wsum = None
    asum = 0.0
    prev_erg = None
    erg_count = 0
    phi_best = -math.inf

    for kappa in range(1, config.max_iter + 1):
        responses = [cache.response(lam) for cache in caches]
        sig = tuple(id(r) for r in responses)  # caches hold the refs alive
        xid = interned.get(sig)
        if xid is None:
            xid = len(points)
            interned[sig] = xid
            points.append(
                (
                    np.concatenate([r.xi for r in responses]),
                    math.fsum(r.local_cost for r in responses),
                    math.fsum(r.local_usage for r in responses),
                )
            )
        x, cost, usage = points[xid]
        mu = usage - b
        phi = cost + lam * mu
        if phi > phi_best:
            phi_best = phi

        store[kappa] = xid
        trace.lambda_seq.append(lam)
        trace.mu_seq.append(mu)
        trace.cost_seq.append(cost)
        trace.feasible_seq.append(mu <= 0.0)

        alpha = config.alpha(kappa)
        lam_next = lam + alpha * mu
        if lam_next < 0.0:
            lam_next = 0.0
        dl = abs(lam_next - lam)
        lam = lam_next

        if not frozen:
            conv_count = conv_count + 1 if dl <= config.conv_tol else 0
            if conv_count > w:
                frozen = True
                anchor = kappa - 1
                trace.lambda_converged_at = kappa
                a_prev = config.alpha(anchor)
                wsum = a_prev * points[store[anchor]][0] + alpha * x
                asum = a_prev + alpha
            else:
                store.pop(kappa - 2, None)  # pre-convergence: keep the last two
                continue
        else:
            wsum += alpha * x
            asum += alpha

        erg = wsum / asum
        if prev_erg is not None:
            if float(np.max(np.abs(erg - prev_erg))) <= config.conv_tol:
                erg_count += 1
            else:
                erg_count = 0
        prev_erg = erg
        trace.ergodic = erg

        if erg_count >= w:
            feasible = [
                tau
                for tau in range(anchor, kappa + 1)
                if points[store[tau]][2] - b <= 0.0
            ]
            if not feasible:
                raise NoFeasibleIterate(
                    f"no feasible iterate among kappa in [{anchor}, {kappa}]"
                )
            tau_star = min(feasible, key=lambda tau: (points[store[tau]][1], tau))
            trace.tau_star = tau_star
            xi_feas, f_feas, usage_star = points[store[tau_star]]
            return CompetitorResult(
                lambda_star=lam,
                xi_lp=erg,
                xi_feasible=xi_feas,
                f_feasible=f_feas,
                iterations=kappa,
                rho1=max(0.0, usage_star - b),
                best_dual=phi_best,
                trace=trace,
            )

    raise DidNotConverge(
        f"multiplier/ergodic convergence not reached within {config.max_iter} iterations"
    )


def check_rho_halt(xi_feasible, instance: MultiAgentInstance) -> float:
    """Tightening residual [sum_i A_i xi_i - b]_+ for a stacked point."""
    return max(0.0, instance.usage_of(np.asarray(xi_feasible)) - instance.budget)


def write_trace(result: CompetitorResult, path):
    """Multiplier/violation trace as CSV (one row per iteration)."""
    t = result.trace
    with open(path, "w", newline="") as fh:
        wtr = csv.writer(fh)
        wtr.writerow(["kappa", "lambda", "mu", "feasible_flag", "cost"])
        for i, (lam, mu, feas, cost) in enumerate(
            zip(t.lambda_seq, t.mu_seq, t.feasible_seq, t.cost_seq), start=1
        ):
            wtr.writerow([i, repr(lam), repr(mu), int(feas), repr(cost)])

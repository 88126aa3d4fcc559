"""Constraint-coupled multi-agent MILP model and its composition into a
scalar-constraint Lagrangian oracle.

Each of the m agents owns a cost vector c_i, a coupling row A_i and a mixed
integer polyhedral set; the only tie between agents is the shared budget in
sum_i A_i xi_i <= b.  Lifting that constraint makes the minimization fall
apart into m independent best responses, so the oracle runs one small MILP
per agent (optionally across a thread pool) and a coordinator merely sums
costs and usages.  Sums are accumulated with math.fsum: the bisection solver
branches on the sign of the violation, and a long chain of naive additions
must not flip it spuriously.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import LocalInfeasible, OracleFailure
from .lagrangian import LagrangianOracle, PrimalPoint
from .milp import (
    LinearProgram,
    MixedIntegerProgram,
    branch_and_bound,
    mip_from_dict,
    mip_to_dict,
)


@dataclass(frozen=True)
class Agent:
    cost: np.ndarray
    coupling_row: np.ndarray
    local_mip_template: MixedIntegerProgram  # template cost is ignored

    def __post_init__(self):
        object.__setattr__(self, "cost", np.asarray(self.cost, dtype=np.float64))
        object.__setattr__(
            self, "coupling_row", np.asarray(self.coupling_row, dtype=np.float64)
        )
        n = self.local_mip_template.n
        if self.cost.shape != (n,) or self.coupling_row.shape != (n,):
            raise ValueError("agent cost/coupling length must match its template")

    @property
    def n(self):
        return self.cost.shape[0]


@dataclass(frozen=True)
class AgentResponse:
    agent_index: int
    xi: np.ndarray
    local_cost: float
    local_usage: float


@dataclass(frozen=True)
class MultiAgentInstance:
    agents: tuple
    budget: float

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "budget", float(self.budget))
        if not self.agents:
            raise ValueError("instance needs at least one agent")

    @property
    def m(self):
        return len(self.agents)

    @property
    def n_total(self):
        return sum(a.n for a in self.agents)

    def split(self, x):
        """Slice a stacked decision vector into per-agent blocks."""
        out, at = [], 0
        for a in self.agents:
            out.append(np.asarray(x[at : at + a.n]))
            at += a.n
        return out

    def cost_of(self, x):
        parts = self.split(x)
        return math.fsum(float(a.cost @ xi) for a, xi in zip(self.agents, parts))

    def usage_of(self, x):
        parts = self.split(x)
        return math.fsum(
            float(a.coupling_row @ xi) for a, xi in zip(self.agents, parts)
        )

    def violation_of(self, x):
        return self.usage_of(x) - self.budget

    def zero_point(self) -> PrimalPoint:
        """The all-zeros point; strictly feasible whenever the budget is
        positive (every generated local set contains the origin)."""
        return PrimalPoint(np.zeros(self.n_total), 0.0, -self.budget)


def agent_best_response(agent: Agent, lam: float, index: int = 0, warm=None,
                        solver=branch_and_bound) -> AgentResponse:
    """argmin over the agent's local set of (c_i + lam*A_i) @ xi."""
    if lam < 0.0:
        raise ValueError("multiplier must be nonnegative")
    weighted = agent.cost + lam * agent.coupling_row
    mip = agent.local_mip_template.with_cost(weighted)
    sol = solver(mip, warm=warm) if solver is branch_and_bound else solver(mip)
    if not sol.is_optimal:
        raise LocalInfeasible(f"agent {index} has an empty local set")
    xi = sol.x
    return AgentResponse(
        index, xi, float(agent.cost @ xi), float(agent.coupling_row @ xi)
    )


class DecentralizedOracle(LagrangianOracle):
    """Lagrangian oracle evaluated as one best response per agent.

    Separability makes the concatenated responses a joint minimizer, so this
    is exact.  ``max_workers`` > 1 runs the agent solves on a thread pool;
    responses are deterministic either way.  When ``response_log`` is a list,
    every solve appends (agent_index, lam, local_cost, local_usage) rows.
    """

    tie_break = "per-agent depth-first branching order"

    def __init__(self, instance: MultiAgentInstance, max_workers=None,
                 response_log=None, solver=branch_and_bound):
        super().__init__()
        self.instance = instance
        self.max_workers = max_workers
        self.response_log = response_log
        self.solver = solver

    def best_responses(self, lam: float):
        agents = self.instance.agents
        if self.max_workers and self.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                responses = list(
                    pool.map(
                        lambda ia: agent_best_response(ia[1], lam, ia[0], solver=self.solver),
                        enumerate(agents),
                    )
                )
        else:
            responses = [
                agent_best_response(a, lam, i, solver=self.solver)
                for i, a in enumerate(agents)
            ]
        if self.response_log is not None:
            for r in responses:
                self.response_log.append(
                    (r.agent_index, lam, r.local_cost, r.local_usage)
                )
        return responses

    def minimize(self, lam: float) -> PrimalPoint:
        responses = self.best_responses(lam)
        x = np.concatenate([r.xi for r in responses])
        f = math.fsum(r.local_cost for r in responses)
        usage = math.fsum(r.local_usage for r in responses)
        return PrimalPoint(x, f, usage - self.instance.budget)


def compose_oracle(instance: MultiAgentInstance, max_workers=None,
                   response_log=None, solver=branch_and_bound) -> DecentralizedOracle:
    return DecentralizedOracle(
        instance, max_workers=max_workers, response_log=response_log, solver=solver
    )


def joint_mip(instance: MultiAgentInstance, include_coupling=False) -> MixedIntegerProgram:
    """Stack the agents into one block-diagonal MILP.

    With ``include_coupling`` the budget row is appended, giving the
    ground-truth whole-problem formulation; without it the feasible set is
    the plain product of the local sets (what the Lagrangian oracle needs).
    """
    n = instance.n_total
    rows = sum(a.local_mip_template.lp.n_rows for a in instance.agents)
    G = np.zeros((rows + (1 if include_coupling else 0), n))
    g = np.zeros(G.shape[0])
    cost = np.zeros(n)
    coupling = np.zeros(n)
    lower = np.zeros(n)
    upper = np.zeros(n)
    mask = np.zeros(n, dtype=bool)
    at_row, at = 0, 0
    for a in instance.agents:
        lp = a.local_mip_template.lp
        nr, na = lp.n_rows, a.n
        G[at_row : at_row + nr, at : at + na] = lp.ineq_matrix
        g[at_row : at_row + nr] = lp.ineq_rhs
        cost[at : at + na] = a.cost
        coupling[at : at + na] = a.coupling_row
        lower[at : at + na] = lp.lower
        upper[at : at + na] = lp.upper
        mask[at : at + na] = a.local_mip_template.integer_mask
        at_row += nr
        at += na
    if include_coupling:
        G[-1] = coupling
        g[-1] = instance.budget
    lp = LinearProgram(cost, G, g, lower, upper)
    return MixedIntegerProgram(lp, mask)


class JointMipOracle(LagrangianOracle):
    """Whole-problem oracle on the stacked MILP with a pluggable exact
    solver (branch_and_bound, or brute_force as an independent route)."""

    tie_break = "joint solver order"

    def __init__(self, instance: MultiAgentInstance, solver=branch_and_bound):
        super().__init__()
        self.instance = instance
        self.solver = solver
        self._mip = joint_mip(instance, include_coupling=False)
        self._coupling = np.concatenate([a.coupling_row for a in instance.agents])
        self._cost = self._mip.lp.cost

    def minimize(self, lam: float) -> PrimalPoint:
        sol = self.solver(self._mip.with_cost(self._cost + lam * self._coupling))
        if not sol.is_optimal:
            raise OracleFailure("joint problem has an empty feasible set")
        x = sol.x
        return PrimalPoint(x, self.instance.cost_of(x), self.instance.violation_of(x))


def instance_to_dict(instance: MultiAgentInstance, meta=None) -> dict:
    d = {
        "budget": instance.budget,
        "agents": [
            dict(
                cost=a.cost.tolist(),
                coupling_row=a.coupling_row.tolist(),
                **{
                    k: v
                    for k, v in mip_to_dict(a.local_mip_template).items()
                    if k != "cost"
                },
            )
            for a in instance.agents
        ],
    }
    if meta:
        d["meta"] = meta
    return d


def instance_from_dict(d: dict) -> MultiAgentInstance:
    agents = []
    for ad in d["agents"]:
        template = mip_from_dict({**ad, "cost": [0.0] * len(ad["cost"])})
        agents.append(Agent(ad["cost"], ad["coupling_row"], template))
    return MultiAgentInstance(tuple(agents), d["budget"])


def dump_instance(instance, path, meta=None):
    with open(path, "w") as fh:
        json.dump(instance_to_dict(instance, meta), fh, indent=1)


def load_instance(path) -> MultiAgentInstance:
    with open(path) as fh:
        return instance_from_dict(json.load(fh))


def write_response_log(rows, path):
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["agent_index", "lambda", "local_cost", "local_usage"])
        for idx, lam, cost, usage in rows:
            w.writerow([idx, repr(float(lam)), repr(cost), repr(usage)])

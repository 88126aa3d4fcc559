"""Instance generation and head-to-head benchmarking.

The generator draws per-agent data from split PCG64 streams
(``SeedSequence((seed, attempt)).spawn(m)``, one child per agent, draws in
the fixed order cost, rows, row rhs, coupling row), so instances are fully
reproducible from the seed.  Costs are uniform in [-1, 0], local constraint
matrices standard normal, their right-hand sides uniform in [0, 1], coupling
rows uniform in [0, 1], and the budget is a fraction (default one half) of
the agents' total uncoupled resource usage, which makes the coupling
constraint binding whenever that usage is positive; non-positive usage
triggers a resample with a derived seed.
"""

import math
import time
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .agents import (
    Agent,
    MultiAgentInstance,
    agent_best_response,
    compose_oracle,
)
from .bisection import DualBiConfig, solve
from .errors import (
    DegenerateDual,
    DidNotConverge,
    NoFeasibleIterate,
    NonRedundancyUnattainable,
    SolverError,
)
from .lagrangian import evaluate_dual, warm_start_lambda_ref
from .milp import LinearProgram, MixedIntegerProgram, branch_and_bound, brute_force
from .subgradient import SubgradientConfig, check_rho_halt
from .subgradient import run as run_subgradient
from .subgradient import scaled_alpha_bar


@dataclass(frozen=True)
class GeneratorConfig:
    m: int
    seed: int = 0
    n_c: int = 5
    n_d: int = 3
    box: float = 10.0
    rows: int = 10
    budget_fraction: float = 0.5
    int_box: Optional[float] = None  # integer-variable bound, defaults to box
    allow_redundant: bool = False  # debug switch: skip the binding check

    def __post_init__(self):
        if min(self.m, self.rows) < 1 or self.n_c < 0 or self.n_d < 0:
            raise ValueError("all counts must be positive")
        if self.n_c + self.n_d < 1:
            raise ValueError("agents need at least one variable")
        if not self.allow_redundant and not 0.0 < self.budget_fraction < 1.0:
            raise ValueError("budget_fraction must lie in (0, 1)")
        ib = self.box if self.int_box is None else self.int_box
        if self.n_d and ib != round(ib):
            raise ValueError("integer variables need an integral bound")


def _draw_agents(cfg: GeneratorConfig, attempt: int):
    n = cfg.n_c + cfg.n_d
    ib = cfg.box if cfg.int_box is None else cfg.int_box
    root = np.random.SeedSequence((cfg.seed, attempt))
    agents = []
    for child in root.spawn(cfg.m):
        rng = np.random.default_rng(child)
        cost = rng.uniform(-1.0, 0.0, n)
        G = rng.standard_normal((cfg.rows, n))
        g = rng.uniform(0.0, 1.0, cfg.rows)
        coupling = rng.uniform(0.0, 1.0, n)
        lower = np.full(n, -cfg.box)
        upper = np.full(n, cfg.box)
        mask = np.zeros(n, dtype=bool)
        mask[cfg.n_c :] = True
        lower[mask] = -ib
        upper[mask] = ib
        template = MixedIntegerProgram(
            LinearProgram(np.zeros(n), G, g, lower, upper), mask
        )
        agents.append(Agent(cost, coupling, template))
    return tuple(agents)


def generate_instance(cfg: GeneratorConfig, max_attempts: int = 100) -> MultiAgentInstance:
    """Draw agents, price the budget off their uncoupled optima, and verify
    the coupling constraint actually binds (resampling on failure)."""
    for attempt in range(max_attempts):
        agents = _draw_agents(cfg, attempt)
        usage0 = math.fsum(
            agent_best_response(a, 0.0, i).local_usage for i, a in enumerate(agents)
        )
        budget = cfg.budget_fraction * usage0
        if cfg.allow_redundant:
            return MultiAgentInstance(agents, budget)
        if usage0 > 0.0 and usage0 > budget:
            return MultiAgentInstance(agents, budget)
    raise NonRedundancyUnattainable(
        f"no binding instance after {max_attempts} resamples (seed {cfg.seed})"
    )


def delta_f_pct(f_hat: float, phi_star: float) -> float:
    """Relative gap (f_hat - phi_star) / |phi_star| of a feasible cost
    against the best dual value, a certified lower-bound proxy."""
    if abs(phi_star) < 1e-12:
        raise DegenerateDual("dual value too close to zero for a relative gap")
    return (f_hat - phi_star) / abs(phi_star)


@dataclass(frozen=True)
class ComparisonReport:
    m: int
    lambda_ref: float
    delta_f_pct: Optional[float]
    iters_dualbi: Optional[int]
    iters_competitor: Optional[int]
    f_dualbi: Optional[float]
    f_competitor: Optional[float]
    phi_star: float
    wall_dualbi: Optional[float]
    wall_competitor: Optional[float]
    dualbi_status: Optional[str] = None
    dualbi_K: Optional[int] = None
    delta_f_pct_competitor: Optional[float] = None
    rho1: Optional[float] = None
    error: Optional[str] = None


def run_comparison(instance: MultiAgentInstance, dualbi_cfg: DualBiConfig = None,
                   sg_cfg: SubgradientConfig = None) -> ComparisonReport:
    """Run both methods on one instance under the shared protocol: the
    bisection solver warm-starts from the origin, the competitor starts its
    multiplier at the same reference value, and both gaps are measured
    against the largest dual value either method evaluated.

    A method failure yields a partial report with the error kind recorded.
    """
    oracle = compose_oracle(instance)
    lam_ref = warm_start_lambda_ref(oracle, instance.zero_point())

    if dualbi_cfg is None:
        dualbi_cfg = DualBiConfig(lambda_ref=lam_ref)
    else:
        dualbi_cfg = replace(dualbi_cfg, lambda_ref=lam_ref)
    if sg_cfg is None:
        sg_cfg = SubgradientConfig(alpha_bar=scaled_alpha_bar(7e-4, instance.m))
    sg_cfg = replace(sg_cfg, lambda0=lam_ref)

    dual_values = [oracle.phi_at_zero().phi]
    error = None

    t0 = time.perf_counter()
    dres = solve(oracle, dualbi_cfg)
    wall_d = time.perf_counter() - t0
    dual_values.extend(phi for _, phi in dres.dual_values())

    cres = None
    wall_m = None
    t0 = time.perf_counter()
    try:
        cres = run_subgradient(instance, sg_cfg)
        wall_m = time.perf_counter() - t0
        dual_values.append(cres.best_dual)
    except (NoFeasibleIterate, DidNotConverge) as exc:
        error = exc.kind

    phi_star = max(dual_values)
    f_d = dres.best.f_val if dres.best is not None else None
    if f_d is None:
        error = dres.status if error is None else f"{dres.status}+{error}"

    return ComparisonReport(
        m=instance.m,
        lambda_ref=lam_ref,
        delta_f_pct=None if f_d is None else delta_f_pct(f_d, phi_star),
        iters_dualbi=dres.iterations,
        iters_competitor=None if cres is None else cres.iterations,
        f_dualbi=f_d,
        f_competitor=None if cres is None else cres.f_feasible,
        phi_star=phi_star,
        wall_dualbi=wall_d,
        wall_competitor=wall_m,
        dualbi_status=dres.status,
        dualbi_K=dres.K,
        delta_f_pct_competitor=(
            None if cres is None else delta_f_pct(cres.f_feasible, phi_star)
        ),
        rho1=None if cres is None else cres.rho1,
        error=error,
    )


def _agent_solver(kind):
    if kind == "bnb":
        return branch_and_bound
    if kind == "brute":
        return brute_force
    raise ValueError(f"unknown solver kind {kind!r}")


def agent_profile(agent: Agent, lambdas, solver="bnb"):
    """(cost, usage) of a best response at every multiplier of a sorted grid.

    Exploits concavity: a response optimal at both ends of a segment (its
    affine value line touches the per-agent dual value at the far end) is
    optimal throughout, so whole constant pieces are certified by two solves
    and only breakpoints are refined.
    """
    solve_one = _agent_solver(solver)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    k = lambdas.size
    f_out = np.full(k, np.nan)
    u_out = np.full(k, np.nan)

    def solve_at(idx):
        sol = solve_one(
            agent.local_mip_template.with_cost(
                agent.cost + lambdas[idx] * agent.coupling_row
            )
        )
        xi = sol.x
        f_out[idx] = float(agent.cost @ xi)
        u_out[idx] = float(agent.coupling_row @ xi)

    def fill(i0, i1):
        if i1 - i0 <= 1:
            return
        lb = lambdas[i1]
        line_at_b = f_out[i0] + lb * u_out[i0]
        phi_b = f_out[i1] + lb * u_out[i1]
        scale = max(1.0, abs(phi_b))
        if line_at_b <= phi_b + 1e-9 * scale:
            f_out[i0 + 1 : i1] = f_out[i0]
            u_out[i0 + 1 : i1] = u_out[i0]
            return
        mid = (i0 + i1) // 2
        solve_at(mid)
        fill(i0, mid)
        fill(mid, i1)

    solve_at(0)
    if k > 1:
        solve_at(k - 1)
        fill(0, k - 1)
    return f_out, u_out


def dual_grid(instance: MultiAgentInstance, lambdas, solver="bnb"):
    """phi, cost and violation of a minimizer on a multiplier grid.

    Returns (phi, f, v) arrays; the heavy lifting is one parametric sweep
    per agent.
    """
    lambdas = np.asarray(lambdas, dtype=np.float64)
    f_tot = np.zeros(lambdas.size)
    u_tot = np.zeros(lambdas.size)
    for agent in instance.agents:
        f_a, u_a = agent_profile(agent, lambdas, solver=solver)
        f_tot += f_a
        u_tot += u_a
    v = u_tot - instance.budget
    phi = f_tot + lambdas * v
    return phi, f_tot, v


class CheckResult:
    def __init__(self, name, passed, detail=""):
        self.name = name
        self.passed = bool(passed)
        self.detail = detail

    def __repr__(self):
        state = "ok" if self.passed else "FAIL"
        return f"[{state}] {self.name}" + (f": {self.detail}" if self.detail else "")


def verify_instance(instance: MultiAgentInstance, grid_points: int = 25,
                    tol: float = 1e-9) -> list:
    """Invariant suite with brute-force cross-checks for one instance."""
    checks = []
    oracle = compose_oracle(instance)
    lam_ref = warm_start_lambda_ref(oracle, instance.zero_point())
    lambdas = np.linspace(0.0, 1.05 * lam_ref, grid_points)
    phi, f_grid, v_grid = dual_grid(instance, lambdas)

    # Concavity of the dual function, sampled through chords.
    worst = 0.0
    for i in range(grid_points - 2):
        for theta in (0.25, 0.5, 0.75):
            lam = theta * lambdas[i] + (1 - theta) * lambdas[i + 2]
            mid_phi = evaluate_dual(oracle, lam).phi
            chord = theta * phi[i] + (1 - theta) * phi[i + 2]
            worst = max(worst, chord - mid_phi)
    checks.append(CheckResult("dual concavity on grid", worst <= tol, f"max chord excess {worst:.2e}"))

    # Monotonicity of the minimizer's violation and cost in the multiplier.
    dv = np.diff(v_grid)
    df = np.diff(f_grid)
    checks.append(
        CheckResult("violation non-increasing", np.all(dv <= tol), f"max rise {dv.max():.2e}")
    )
    checks.append(
        CheckResult("cost non-decreasing", np.all(df >= -tol), f"max drop {(-df).max():.2e}")
    )

    # Bisection run: feasibility, monotone cost, bracket and certificate.
    res = solve(oracle, DualBiConfig(lambda_ref=lam_ref))
    second = [it for it in res.history if it.phase == "bisection"]
    feas_ok = all(it.best_feasible.v_val <= tol for it in second)
    costs = [it.best_feasible.f_val for it in second]
    mono_ok = all(b <= a + tol for a, b in zip(costs, costs[1:]))
    checks.append(CheckResult("stored iterates feasible", feas_ok))
    checks.append(CheckResult("stored costs non-increasing", mono_ok))
    lo, hi = res.final_interval
    left = v_grid[lambdas < lo]
    right = v_grid[lambdas > hi]
    sign_ok = (left > -tol).all() and (right < tol).all()
    checks.append(CheckResult("violation sign pattern around final interval", sign_ok))
    if res.best is not None:
        cert = res.best.f_val - hi * abs(res.best.v_val)
        checks.append(
            CheckResult("suboptimality certificate", cert <= res.best_dual + tol)
        )
        checks.append(
            CheckResult("weak duality", res.best_dual <= res.best.f_val + tol)
        )

    # Kernel cross-check: per-agent exact enumeration where tractable.
    lam_mid = 0.5 * lam_ref
    enum_ok, enum_ran = True, False
    for i, agent in enumerate(instance.agents[: min(3, instance.m)]):
        mip = agent.local_mip_template.with_cost(
            agent.cost + lam_mid * agent.coupling_row
        )
        sizes = 1
        for j in np.flatnonzero(mip.integer_mask):
            sizes *= int(mip.lp.upper[j] - mip.lp.lower[j]) + 1
        if sizes > 100_000:
            continue
        enum_ran = True
        bb = branch_and_bound(mip)
        bf = brute_force(mip)
        if abs(bb.objective - bf.objective) > 1e-7:
            enum_ok = False
    checks.append(
        CheckResult(
            "branch-and-bound matches enumeration",
            enum_ok,
            "" if enum_ran else "skipped (ranges too large)",
        )
    )

    # Separability of the decentralized evaluation.
    sep_ok = True
    for lam in (0.0, 0.5 * lam_ref, lam_ref):
        ev = evaluate_dual(oracle, lam)
        total = math.fsum(
            agent_best_response(a, lam, i).local_cost
            + lam * agent_best_response(a, lam, i).local_usage
            for i, a in enumerate(instance.agents)
        ) - lam * instance.budget
        if abs(ev.phi - total) > 1e-9 * max(1.0, abs(total)):
            sep_ok = False
    checks.append(CheckResult("separable evaluation identity", sep_ok))

    return checks


def write_bench_csv(rows, path):
    import csv

    cols = [
        "m", "seed", "delta_f_pct", "K_D", "K_M", "f_dualbi", "f_competitor",
        "phi_star", "wall_dualbi", "wall_competitor", "error",
    ]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for seed, rep in rows:
            w.writerow([
                rep.m, seed,
                "" if rep.delta_f_pct is None else repr(rep.delta_f_pct),
                "" if rep.iters_dualbi is None else rep.iters_dualbi,
                "" if rep.iters_competitor is None else rep.iters_competitor,
                "" if rep.f_dualbi is None else repr(rep.f_dualbi),
                "" if rep.f_competitor is None else repr(rep.f_competitor),
                repr(rep.phi_star),
                "" if rep.wall_dualbi is None else f"{rep.wall_dualbi:.6f}",
                "" if rep.wall_competitor is None else f"{rep.wall_competitor:.6f}",
                rep.error or "",
            ])


def write_bench_markdown(rows, path):
    lines = ["| m | seed | delta_f_pct | K_D | K_M |", "|---|---|---|---|---|"]
    for seed, rep in rows:
        gap = "n/a" if rep.delta_f_pct is None else f"{rep.delta_f_pct:.3e}"
        km = "n/a" if rep.iters_competitor is None else rep.iters_competitor
        lines.append(f"| {rep.m} | {seed} | {gap} | {rep.iters_dualbi} | {km} |")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

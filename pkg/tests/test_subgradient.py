import math

import numpy as np
import pytest

from dualbisect import (
    DualBiConfig,
    GeneratorConfig,
    compose_oracle,
    generate_instance,
    solve,
    warm_start_lambda_ref,
)
from dualbisect.agents import MultiAgentInstance, agent_best_response
from dualbisect.errors import DidNotConverge
from dualbisect.subgradient import (
    SubgradientConfig,
    check_rho_halt,
    run,
    scaled_alpha_bar,
    write_trace,
)


@pytest.fixture(scope="module")
def slack_instance():
    # budget inflated far beyond the uncoupled usage: every iterate feasible
    base = generate_instance(GeneratorConfig(m=3, seed=2, n_c=2, n_d=2, rows=5, int_box=2))
    usage0 = math.fsum(
        agent_best_response(a, 0.0, i).local_usage for i, a in enumerate(base.agents)
    )
    return MultiAgentInstance(base.agents, 2.0 * abs(usage0) + 5.0)


def test_all_feasible_trivial_run(slack_instance):
    cfg = SubgradientConfig(alpha_bar=1e-2, lambda0=0.0, max_iter=1000)
    res = run(slack_instance, cfg)
    # multiplier pinned at zero, iterates constant: the run ends right after
    # both convergence windows elapse
    assert res.lambda_star == 0.0
    assert res.iterations == 2 * cfg.window_w + 1
    assert res.rho1 == 0.0
    uncoupled = math.fsum(
        agent_best_response(a, 0.0, i).local_cost
        for i, a in enumerate(slack_instance.agents)
    )
    assert res.f_feasible == pytest.approx(uncoupled, abs=1e-9)
    assert all(res.trace.feasible_seq)


def test_check_rho_halt_projection():
    lp_agent = generate_instance(GeneratorConfig(m=1, seed=0, n_c=2, n_d=0, rows=3))
    agent = lp_agent.agents[0]
    # handmade single-agent instances with a transparent usage value
    xi = np.array([1.0, 0.0])
    usage = float(agent.coupling_row @ xi)
    feasible = MultiAgentInstance((agent,), usage + 0.3)
    violating = MultiAgentInstance((agent,), usage - 0.2)
    assert check_rho_halt(xi, feasible) == 0.0
    assert check_rho_halt(xi, violating) == pytest.approx(0.2, abs=1e-12)


def test_rho_halt_zero_on_returned_point(slack_instance):
    res = run(slack_instance, SubgradientConfig(alpha_bar=1e-2, max_iter=1000))
    assert check_rho_halt(res.xi_feasible, slack_instance) == 0.0


def test_converged_multiplier_matches_bisection_interval(small_instance):
    oracle = compose_oracle(small_instance)
    lam_ref = warm_start_lambda_ref(oracle, small_instance.zero_point())
    dres = solve(oracle, DualBiConfig(lambda_ref=lam_ref, interval_tol=1e-5))
    lo, hi = dres.final_interval
    cfg = SubgradientConfig(alpha_bar=0.1, conv_tol=1e-5, lambda0=lam_ref, max_iter=200_000)
    cres = run(small_instance, cfg)
    mid = 0.5 * (lo + hi)
    assert abs(cres.lambda_star - mid) <= 10 * cfg.conv_tol + (hi - lo)
    assert cres.f_feasible == pytest.approx(dres.best.f_val, abs=1e-9)


def test_multiplier_never_negative(small_instance):
    cfg = SubgradientConfig(alpha_bar=0.5, lambda0=0.0, max_iter=200_000)
    res = run(small_instance, cfg)
    assert min(res.trace.lambda_seq) >= 0.0


def test_ergodic_average_in_hull(small_instance):
    lam_ref = warm_start_lambda_ref(
        compose_oracle(small_instance), small_instance.zero_point()
    )
    res = run(
        small_instance,
        SubgradientConfig(alpha_bar=0.1, lambda0=lam_ref, max_iter=200_000),
    )
    t = res.trace
    anchor = t.lambda_converged_at - 1
    window = np.stack([t.point(k)[0] for k in range(anchor, res.iterations + 1)])
    assert np.all(res.xi_lp >= window.min(axis=0) - 1e-12)
    assert np.all(res.xi_lp <= window.max(axis=0) + 1e-12)


def test_tau_star_soundness(small_instance):
    lam_ref = warm_start_lambda_ref(
        compose_oracle(small_instance), small_instance.zero_point()
    )
    res = run(
        small_instance,
        SubgradientConfig(alpha_bar=0.1, lambda0=lam_ref, max_iter=200_000),
    )
    t = res.trace
    anchor = t.lambda_converged_at - 1
    b = small_instance.budget
    feas_costs = [
        t.point(k)[1]
        for k in range(anchor, res.iterations + 1)
        if t.point(k)[2] - b <= 0.0
    ]
    assert res.f_feasible == min(feas_costs)
    assert t.point(t.tau_star)[2] - b <= 0.0


def test_complementary_slackness_of_relaxed_point(seed42_instance):
    lam_ref = warm_start_lambda_ref(
        compose_oracle(seed42_instance), seed42_instance.zero_point()
    )
    cfg = SubgradientConfig(alpha_bar=3e-2, lambda0=lam_ref, max_iter=200_000)
    res = run(seed42_instance, cfg)
    resid = res.lambda_star * (
        seed42_instance.usage_of(res.xi_lp) - seed42_instance.budget
    )
    scale = max(1.0, abs(seed42_instance.budget))
    assert abs(resid) <= 10 * cfg.conv_tol * scale


def test_feasible_iterate_always_found():
    # the selection step never comes up empty on binding instances
    for seed in range(8):
        inst = generate_instance(
            GeneratorConfig(m=4, seed=seed, n_c=2, n_d=2, rows=6, int_box=2)
        )
        lam_ref = warm_start_lambda_ref(compose_oracle(inst), inst.zero_point())
        res = run(
            inst, SubgradientConfig(alpha_bar=2e-2, lambda0=lam_ref, max_iter=150_000)
        )
        assert res.rho1 == 0.0
        assert inst.violation_of(res.xi_feasible) <= 0.0


def test_did_not_converge():
    inst = generate_instance(GeneratorConfig(m=2, seed=1, n_c=2, n_d=1, rows=4, int_box=2))
    with pytest.raises(DidNotConverge):
        run(inst, SubgradientConfig(alpha_bar=1e-6, lambda0=1.0, max_iter=30))


def test_multiplier_distance_falls_fast_at_reference_scale():
    # 100-agent instance, reference step constant: the multiplier gets
    # within 1e-2 of the dual optimum inside 50 iterations
    inst = generate_instance(GeneratorConfig(m=100, seed=1))
    oracle = compose_oracle(inst)
    lam_ref = warm_start_lambda_ref(oracle, inst.zero_point())
    dres = solve(oracle, DualBiConfig(lambda_ref=lam_ref))
    lam_star = 0.5 * sum(dres.final_interval)
    cfg = SubgradientConfig(alpha_bar=7e-4, lambda0=lam_ref, max_iter=50)
    # replay the dual recursion through the public best-response API
    lam = lam_ref
    prev = None
    lams = []
    for kappa in range(1, 51):
        rs = [
            agent_best_response(a, lam, i, warm=None if prev is None else prev[i].xi)
            for i, a in enumerate(inst.agents)
        ]
        prev = rs
        mu = math.fsum(r.local_usage for r in rs) - inst.budget
        lams.append(lam)
        lam = max(0.0, lam + cfg.alpha(kappa) * mu)
    assert abs(lams[49] - lam_star) < 1e-2


def test_trace_csv(tmp_path, slack_instance):
    res = run(slack_instance, SubgradientConfig(alpha_bar=1e-2, max_iter=1000))
    path = tmp_path / "sg.csv"
    write_trace(res, path)
    import csv

    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == res.iterations
    assert int(rows[0]["kappa"]) == 1
    assert all(int(r["feasible_flag"]) == 1 for r in rows)


def test_alpha_scaling_rule():
    assert scaled_alpha_bar(7e-4, 100) == pytest.approx(7e-4)
    assert scaled_alpha_bar(7e-4, 20) == pytest.approx(1.4e-4)
    assert scaled_alpha_bar(7e-4, 1000) == pytest.approx(7e-3)

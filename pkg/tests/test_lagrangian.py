import math

import numpy as np
import pytest

from dualbisect import (
    FiniteCandidateOracle,
    JointMipOracle,
    compose_oracle,
    evaluate_dual,
    warm_start_lambda_ref,
)
from dualbisect.errors import NonPositiveLambdaRef, NotStrictlyFeasible
from dualbisect.lagrangian import PrimalPoint
from dualbisect.milp import brute_force


def unit_box_oracle(slope=1.0):
    # f(x) = slope*x, v(x) = x - 0.5 on X = [0, 1]; linear, so the two
    # endpoints carry every Lagrangian minimum
    return FiniteCandidateOracle(
        [[0.0], [1.0]], f=lambda p: slope * p[0], v=lambda p: p[0] - 0.5
    )


def test_dual_at_zero():
    ev = evaluate_dual(unit_box_oracle(), 0.0)
    assert ev.phi == pytest.approx(0.0, abs=1e-12)
    assert ev.witness.x[0] == pytest.approx(0.0)


def test_dual_at_two():
    # min over [0,1] of x + 2(x - 0.5) = -1 at x = 0
    ev = evaluate_dual(unit_box_oracle(), 2.0)
    assert ev.phi == pytest.approx(-1.0, abs=1e-12)
    assert ev.witness.x[0] == pytest.approx(0.0)


def test_dual_value_on_two_agent_toy(small_instance):
    # decentralized evaluation against enumeration of the stacked problem
    lam = 1.0
    oracle = compose_oracle(small_instance)
    brute = JointMipOracle(small_instance, solver=brute_force)
    a = evaluate_dual(oracle, lam)
    b = evaluate_dual(brute, lam)
    assert a.phi == pytest.approx(b.phi, abs=1e-8)
    assert a.phi == pytest.approx(
        a.witness.f_val + lam * a.witness.v_val, abs=1e-12
    )


def test_warm_start_at_the_unconstrained_minimizer_is_rejected():
    oracle = unit_box_oracle(slope=1.0)
    x0 = PrimalPoint(np.array([0.0]), 0.0, -0.5)
    with pytest.raises(NonPositiveLambdaRef):
        warm_start_lambda_ref(oracle, x0)


def test_warm_start_two_term_arithmetic():
    # f(x) = -x: phi(0) = -1 at x = 1, so lambda_ref = (-1 - 0)/(-0.5) = 2
    oracle = unit_box_oracle(slope=-1.0)
    x0 = PrimalPoint(np.array([0.0]), 0.0, -0.5)
    assert warm_start_lambda_ref(oracle, x0) == pytest.approx(2.0, abs=1e-12)


def test_warm_start_requires_strict_feasibility():
    oracle = unit_box_oracle()
    with pytest.raises(NotStrictlyFeasible):
        warm_start_lambda_ref(oracle, PrimalPoint(np.array([1.0]), 1.0, 0.5))


def test_warm_start_against_brute_force_phi0(seed42_instance):
    # at lam=0 the stacked problem separates exactly, so summing per-agent
    # enumeration minima is a full brute-force phi(0)
    inst = seed42_instance
    oracle = compose_oracle(inst)
    lam_ref = warm_start_lambda_ref(oracle, inst.zero_point())
    brute = compose_oracle(inst, solver=brute_force)
    phi0 = evaluate_dual(brute, 0.0).phi
    assert lam_ref == pytest.approx((phi0 - 0.0) / (-inst.budget), rel=1e-9)
    assert lam_ref > 0.0


def test_phi0_cache_write_once(small_instance):
    calls = []
    oracle = compose_oracle(small_instance)
    inner = oracle.minimize

    def counting(lam):
        calls.append(lam)
        return inner(lam)

    oracle.minimize = counting
    warm_start_lambda_ref(oracle, small_instance.zero_point())
    warm_start_lambda_ref(oracle, small_instance.zero_point())
    evaluate_dual(oracle, 0.0)
    assert calls.count(0.0) == 1


class _GridProperties:
    """Sampled dual-side properties shared by a couple of tests."""

    def __init__(self, instance, lam_max, points=30):
        self.oracle = compose_oracle(instance)
        self.lams = np.linspace(0.0, lam_max, points)
        self.evals = [evaluate_dual(self.oracle, lam) for lam in self.lams]
        self.phi = np.array([e.phi for e in self.evals])
        self.f = np.array([e.witness.f_val for e in self.evals])
        self.v = np.array([e.witness.v_val for e in self.evals])


@pytest.fixture(scope="module")
def grid(small_instance):
    return _GridProperties(small_instance, lam_max=3.0)


def test_concavity_sampled(grid):
    lams, phi = grid.lams, grid.phi
    for i in range(len(lams) - 2):
        for theta in (0.25, 0.5, 0.75):
            lam = theta * lams[i] + (1 - theta) * lams[i + 2]
            chord = theta * phi[i] + (1 - theta) * phi[i + 2]
            mid = evaluate_dual(grid.oracle, lam).phi
            assert mid >= chord - 1e-9


def test_weak_duality(grid, small_instance):
    feasible_costs = [
        e.witness.f_val for e in grid.evals if e.witness.v_val <= 0.0
    ]
    feasible_costs.append(0.0)  # the origin is feasible by construction
    assert grid.phi.max() <= min(feasible_costs) + 1e-9


def test_subgradient_monotone(grid):
    # v of the minimizer is a subgradient of the concave dual: non-increasing
    dv = np.diff(grid.v)
    assert np.all(dv <= 1e-9)


def test_cost_violation_monotone(grid):
    assert np.all(np.diff(grid.f) >= -1e-9)
    assert np.all(np.diff(grid.v) <= 1e-9)

import numpy as np
import pytest
from scipy.optimize import linprog

from dualbisect.errors import NumericalBreakdown
from dualbisect.milp import (
    INFEASIBLE,
    OPTIMAL,
    LinearProgram,
    simplex_solve,
    solve_lp,
)
from dualbisect.milp import _simplex_py

try:
    from dualbisect.milp import _simplex_cy
except ImportError:
    _simplex_cy = None

from conftest import lp_min_by_vertex_enumeration, random_lp


def test_bound_constrained_1d():
    sol = simplex_solve(LinearProgram([1.0], np.zeros((0, 1)), [], [0.0], [1.0]))
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(0.0, abs=1e-12)
    assert sol.x[0] == pytest.approx(0.0, abs=1e-12)


def test_two_var_facet():
    lp = LinearProgram([-1.0, -1.0], [[1.0, 1.0]], [1.0], [0.0, 0.0], [1.0, 1.0])
    sol = simplex_solve(lp)
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(-1.0, abs=1e-9)
    assert sol.x.sum() == pytest.approx(1.0, abs=1e-9)


def test_infeasible_rows():
    lp = LinearProgram([0.0], [[1.0], [-1.0]], [0.0, -1.0], [-5.0], [5.0])
    assert simplex_solve(lp).status == INFEASIBLE


def test_generator_lp_matches_vertex_enumeration():
    # 5 continuous variables, 10 rows, as drawn by the instance generator
    from dualbisect import GeneratorConfig, generate_instance

    inst = generate_instance(GeneratorConfig(m=1, seed=7, n_c=5, n_d=0))
    agent = inst.agents[0]
    lp = agent.local_mip_template.lp.with_cost(agent.cost)
    expected = lp_min_by_vertex_enumeration(lp)
    sol = simplex_solve(lp)
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(expected, abs=1e-8)


def test_against_scipy_and_enumeration():
    rng = np.random.default_rng(2024)
    solved = 0
    for _ in range(60):
        lp = random_lp(rng, n_max=6, r_max=8)
        ref = linprog(
            lp.cost,
            A_ub=lp.ineq_matrix if lp.n_rows else None,
            b_ub=lp.ineq_rhs if lp.n_rows else None,
            bounds=list(zip(lp.lower, lp.upper)),
            method="highs",
        )
        sol = simplex_solve(lp)
        if ref.status == 2:
            assert sol.status == INFEASIBLE
            continue
        assert sol.status == OPTIMAL
        assert sol.objective == pytest.approx(ref.fun, abs=1e-7, rel=1e-7)
        if lp.n <= 5 and lp.n_rows <= 8:
            vex = lp_min_by_vertex_enumeration(lp)
            assert sol.objective == pytest.approx(vex, abs=1e-7)
        solved += 1
    assert solved >= 15


def test_optimality_certificate():
    # primal feasibility plus sign-correct reduced costs at the returned basis
    rng = np.random.default_rng(99)
    for _ in range(40):
        lp = random_lp(rng)
        res = solve_lp(lp)
        if res.status != OPTIMAL:
            continue
        x, y = res.x, res.row_duals
        if lp.n_rows:
            assert np.all(lp.ineq_matrix @ x <= lp.ineq_rhs + 1e-9)
            assert np.all(y <= 1e-9)
        assert np.all(x >= lp.lower - 1e-9) and np.all(x <= lp.upper + 1e-9)
        d = lp.cost - (y @ lp.ineq_matrix if lp.n_rows else 0.0)
        at_lo = np.abs(x - lp.lower) <= 1e-7
        at_up = np.abs(x - lp.upper) <= 1e-7
        interior = ~(at_lo | at_up)
        assert np.all(d[at_lo & ~at_up] >= -1e-9)
        assert np.all(d[at_up & ~at_lo] <= 1e-9)
        assert np.all(np.abs(d[interior]) <= 1e-8)


def test_degenerate_duplicated_rows_terminate():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = 4
        c = rng.normal(size=n)
        row = rng.normal(size=n)
        G = np.vstack([row, row, row, rng.normal(size=(3, n))])
        g = np.array([0.0, 0.0, 0.0, *rng.uniform(-0.5, 0.5, 3)])
        lp = LinearProgram(c, G, g, np.full(n, -2.0), np.full(n, 2.0))
        ref = linprog(c, A_ub=G, b_ub=g, bounds=[(-2, 2)] * n, method="highs")
        sol = simplex_solve(lp)
        if ref.status == 2:
            assert sol.status == INFEASIBLE
        else:
            assert sol.status == OPTIMAL
            assert sol.objective == pytest.approx(ref.fun, abs=1e-7)


def test_pivot_limit_raises():
    lp = LinearProgram(
        [-1.0, -1.0, -1.0],
        np.ones((1, 3)),
        [1.0],
        np.zeros(3),
        np.ones(3),
    )
    with pytest.raises(NumericalBreakdown):
        solve_lp(lp, pivot_limit=1)


def test_determinism():
    rng = np.random.default_rng(17)
    checked = 0
    for _ in range(10):
        lp = random_lp(rng)
        a = solve_lp(lp)
        b = solve_lp(lp)
        assert a.status == b.status and a.pivots == b.pivots
        if a.status == OPTIMAL:
            assert a.x.tobytes() == b.x.tobytes()
            assert a.objective == b.objective
            checked += 1
    assert checked >= 3


@pytest.mark.skipif(_simplex_cy is None, reason="compiled kernel not built")
def test_backends_agree():
    rng = np.random.default_rng(31)
    for _ in range(50):
        lp = random_lp(rng)
        ca, xa, oa, _, _ = _simplex_py.solve_bounded_lp(
            lp.cost, lp.ineq_matrix, lp.ineq_rhs, lp.lower, lp.upper
        )
        cb, xb, ob, _, _ = _simplex_cy.solve_bounded_lp(
            lp.cost, lp.ineq_matrix, lp.ineq_rhs, lp.lower, lp.upper
        )
        assert ca == cb
        if ca == 0:
            assert oa == pytest.approx(ob, abs=1e-9)

import numpy as np
import pytest

from dualbisect import GeneratorConfig, generate_instance
from dualbisect.milp import LinearProgram, MixedIntegerProgram


def random_lp(rng, n_max=8, r_max=12):
    n = int(rng.integers(1, n_max + 1))
    r = int(rng.integers(0, r_max + 1))
    c = rng.normal(size=n)
    G = rng.normal(size=(r, n))
    g = rng.uniform(-1.0, 1.0, size=r)
    lo = rng.uniform(-5.0, 0.0, size=n)
    up = lo + rng.uniform(0.0, 6.0, size=n)
    return LinearProgram(c, G, g, lo, up)


def random_mip(rng, n_max=8, int_max=3, r_max=10, box=5.0):
    n = int(rng.integers(1, n_max + 1))
    ni = int(rng.integers(1, min(n, int_max) + 1))
    r = int(rng.integers(1, r_max + 1))
    c = rng.normal(size=n)
    G = rng.normal(size=(r, n))
    g = rng.uniform(-1.0, 2.0, size=r)
    lo = np.full(n, -box)
    up = np.full(n, box)
    mask = np.zeros(n, dtype=bool)
    mask[rng.choice(n, ni, replace=False)] = True
    return MixedIntegerProgram(LinearProgram(c, G, g, lo, up), mask)


def enumerate_vertices(lp):
    """All vertices of {Gx<=g, lo<=x<=up} by brute-force active-set
    enumeration; independent ground truth for small LPs."""
    import itertools

    n = lp.n
    rows = [(lp.ineq_matrix[i], lp.ineq_rhs[i]) for i in range(lp.n_rows)]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        rows.append((e, lp.upper[j]))
        rows.append((-e, -lp.lower[j]))
    vertices = []
    for combo in itertools.combinations(range(len(rows)), n):
        A = np.stack([rows[i][0] for i in combo])
        b = np.array([rows[i][1] for i in combo])
        if abs(np.linalg.det(A)) < 1e-9:
            continue
        x = np.linalg.solve(A, b)
        ok = np.all(lp.ineq_matrix @ x <= lp.ineq_rhs + 1e-8) if lp.n_rows else True
        ok = ok and np.all(x >= lp.lower - 1e-8) and np.all(x <= lp.upper + 1e-8)
        if ok:
            vertices.append(x)
    return vertices


def lp_min_by_vertex_enumeration(lp):
    vertices = enumerate_vertices(lp)
    if not vertices:
        return None
    return min(float(lp.cost @ v) for v in vertices)


@pytest.fixture(scope="session")
def small_instance():
    return generate_instance(GeneratorConfig(m=2, seed=5, n_c=3, n_d=3, int_box=3))


@pytest.fixture(scope="session")
def seed42_instance():
    return generate_instance(GeneratorConfig(m=5, seed=42, int_box=3))

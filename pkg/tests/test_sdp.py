import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomeasures.errors import InconsistentConstraints, NonHermitian
from geomeasures.measures import Fixed, build_fidelity_sdp
from geomeasures.sdp import (
    SdpProblem,
    SolverConfig,
    Status,
    embed_complex,
    presolve,
    solve,
    unembed_complex,
)
from conftest import random_hermitian, random_state

SQRT2_C = np.array([[0, 0.5], [0.5, 0]])


def sqrt2_problem(scale=1.0):
    e11, e22 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    return SdpProblem.from_dense([2], [scale * SQRT2_C], [[e11], [e22]], [1.0, 2.0])


# -- embedding ---------------------------------------------------------------


def test_embed_scalar():
    np.testing.assert_array_equal(embed_complex(np.array([[1]])), np.eye(2))


def test_embed_sigma_y():
    e = embed_complex(np.array([[0, -1j], [1j, 0]]))
    np.testing.assert_array_equal(e, e.T)
    np.testing.assert_allclose(np.linalg.eigvalsh(e), [-1, -1, 1, 1], atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8))
def test_embed_spectrum_doubling_and_roundtrip(seed, n):
    h = random_hermitian(np.random.default_rng(seed), n)
    w = np.linalg.eigvalsh(h)
    np.testing.assert_allclose(np.linalg.eigvalsh(embed_complex(h)), np.repeat(w, 2), atol=1e-10)
    np.testing.assert_allclose(unembed_complex(embed_complex(h)), h, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.integers(-5, 5), beta=st.integers(-5, 5))
def test_embed_linear(seed, alpha, beta):
    r = np.random.default_rng(seed)
    h1, h2 = random_hermitian(r, 4), random_hermitian(r, 4)
    np.testing.assert_array_equal(
        embed_complex(alpha * h1 + beta * h2), alpha * embed_complex(h1) + beta * embed_complex(h2)
    )


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_embed_trace_pairing(seed):
    r = np.random.default_rng(seed)
    h, m = random_hermitian(r, 3), random_hermitian(r, 3)
    lhs = np.trace(embed_complex(h) @ embed_complex(m))
    assert abs(lhs - 2 * np.trace(h @ m).real) <= 1e-12 * max(1, abs(lhs))


def test_embed_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        embed_complex(np.array([[0, 1], [0, 0]]))


# -- solve examples -----------------------------------------------------------


def test_solve_trivial_scalar():
    sol = solve(SdpProblem.from_dense([1], [np.ones((1, 1))], [[np.ones((1, 1))]], [1.0]))
    assert sol.status is Status.OPTIMAL
    assert abs(sol.primal_objective - 1) <= 1e-8


def test_solve_sqrt2():
    sol = solve(sqrt2_problem())
    assert sol.status is Status.OPTIMAL
    assert abs(sol.primal_objective - np.sqrt(2)) <= 1e-8
    assert abs(sol.primal_blocks[0][0, 1] - np.sqrt(2)) <= 1e-7


@pytest.mark.parametrize("d", [2, 3, 4])
def test_solve_fidelity_self(d):
    rho = random_state(d, 100 + d)
    sol = solve(build_fidelity_sdp(rho, Fixed(rho)))
    assert sol.status is Status.OPTIMAL
    assert abs(sol.primal_objective / 2 - 1) <= 1e-8


def test_scaling_invariance_sqrt2():
    base = solve(sqrt2_problem())
    for c in (0.1, 3.0, 250.0):
        sol = solve(sqrt2_problem(c))
        assert sol.status is Status.OPTIMAL
        assert abs(sol.primal_objective - c * base.primal_objective) <= 1e-8 * max(1, c)
        np.testing.assert_allclose(sol.primal_blocks[0], base.primal_blocks[0], atol=1e-7)


# -- presolve -----------------------------------------------------------------


def test_presolve_duplicate():
    e11 = np.diag([1.0, 0.0])
    p = presolve(SdpProblem.from_dense([2], [SQRT2_C], [[e11], [e11], [np.diag([0.0, 1.0])]], [1, 1, 2]))
    assert p.n_constraints == 2
    assert list(p.presolve_map.removed) == [1]
    sol = solve(SdpProblem.from_dense([2], [SQRT2_C], [[e11], [e11], [np.diag([0.0, 1.0])]], [1, 1, 2]))
    assert sol.dual_y.size == 3
    assert abs(sol.primal_objective - np.sqrt(2)) <= 1e-8


def test_presolve_exact_sum():
    e11, e22 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    p = presolve(SdpProblem.from_dense([2], [np.zeros((2, 2))], [[e11], [e22], [np.eye(2)]], [1, 0, 1]))
    assert p.n_constraints == 2


def test_presolve_inconsistent():
    e11, e22 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    prob = SdpProblem.from_dense([2], [np.zeros((2, 2))], [[e11], [e22], [np.eye(2)]], [1, 0, 1.001])
    with pytest.raises(InconsistentConstraints):
        presolve(prob)


def test_nonsymmetric_constraint_is_symmetrized():
    a = np.array([[0.0, 2.0], [0.0, 0.0]])
    p = SdpProblem.from_dense([2], [np.zeros((2, 2))], [[a]], [1.0])
    np.testing.assert_array_equal(p.constraint_matrix(0, 0), [[0, 1], [1, 0]])


def test_dump(tmp_path):
    path = tmp_path / "p.txt"
    sqrt2_problem().dump(path)
    text = path.read_text()
    assert text.startswith("blocks 2\nconstraints 2\n")


def test_debug_dump_config(tmp_path):
    path = tmp_path / "dump.txt"
    solve(sqrt2_problem(), SolverConfig(debug_dump=str(path)))
    assert path.exists()


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(gap_tol=0)
    with pytest.raises(ValueError):
        SolverConfig(step_fraction=1.0)


def test_max_iterations_status():
    sol = solve(sqrt2_problem(), SolverConfig(max_iterations=2))
    assert sol.status is Status.MAX_ITERATIONS
    assert sol.iterations <= 2


# -- random feasible problems ------------------------------------------------


def random_feasible(seed):
    """Problem with a strictly feasible primal point and a strictly feasible dual point."""
    r = np.random.default_rng(seed)
    n = int(r.integers(2, 11))
    m = int(r.integers(1, min(21, n * (n + 1) // 2 + 1)))
    mats = []
    for _ in range(m):
        a = r.standard_normal((n, n))
        mats.append((a + a.T) / 2)
    g = r.standard_normal((n, n))
    z0 = g @ g.T + 0.5 * np.eye(n)
    b = [float(np.vdot(a, z0)) for a in mats]
    h = r.standard_normal((n, n))
    s0 = h @ h.T + 0.5 * np.eye(n)
    y0 = r.standard_normal(m)
    c = sum(yi * a for yi, a in zip(y0, mats)) - s0
    return SdpProblem.from_dense([n], [c], [[a] for a in mats], b)


@pytest.mark.parametrize("seed", range(50))
def test_random_problem_duality_properties(seed):
    problem = random_feasible(seed)
    cfg = SolverConfig()
    sol = solve(problem, cfg)
    assert sol.status is Status.OPTIMAL
    p, d = sol.primal_objective, sol.dual_objective
    # weak duality at the returned point
    assert p <= d + 1e-8 * max(1, abs(d))
    # complementarity
    for z, s in zip(sol.primal_blocks, sol.dual_slacks):
        assert abs(np.vdot(z, s)) <= 10 * cfg.gap_tol * max(1, abs(p))
        assert np.linalg.eigvalsh(z)[0] >= -cfg.feas_tol
        assert np.linalg.eigvalsh(s)[0] >= -cfg.feas_tol
    # objective scaling
    scaled = SdpProblem(problem.blocks, [3.0 * c for c in problem.objective], problem.triplets, problem.rhs)
    sol3 = solve(scaled, cfg)
    assert sol3.status is Status.OPTIMAL
    assert abs(sol3.primal_objective - 3 * p) <= 1e-7 * max(1, abs(3 * p))

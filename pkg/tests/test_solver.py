import numpy as np
import pytest
from scipy.sparse import csr_matrix, diags, identity

from src.fem.assembly import LinearSystem, apply_dirichlet, assemble
from src.meshgen.builders import build_mesh
from src.problems.manufactured import line_problem, radial_problem, radial_unfitted_problem
from src.solver.cg import CGDidNotConverge, Preconditioner, SolveConfig, cg_solve, dense_solve


def system_of(A, b):
    A = csr_matrix(A)
    return LinearSystem(matrix=A, rhs=np.asarray(b, dtype=float), free_dofs=np.arange(A.shape[0]), n_vertices=A.shape[0])


def laplacian_1d(n):
    return diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]).tocsr()


def test_identity_in_one_iteration():
    b = np.array([1.0, -2.0, 3.5, 0.25])
    x, stats = cg_solve(system_of(identity(4), b))
    np.testing.assert_allclose(x, b)
    assert stats.iterations == 1
    assert not stats.breakdown


@pytest.mark.parametrize("preconditioner", list(Preconditioner))
def test_two_by_two(preconditioner):
    x, stats = cg_solve(system_of([[2.0, 1.0], [1.0, 2.0]], [3.0, 3.0]), SolveConfig(preconditioner=preconditioner))
    np.testing.assert_allclose(x, [1.0, 1.0], rtol=1e-10)
    assert stats.final_relative_residual <= 1e-10


def test_zero_rhs_returns_zero():
    x, stats = cg_solve(system_of(laplacian_1d(5), np.zeros(5)))
    np.testing.assert_array_equal(x, 0.0)
    assert stats.iterations == 0


def true_relative_residual(system, x):
    return np.linalg.norm(system.rhs - system.matrix @ x) / np.linalg.norm(system.rhs)


def test_iteration_limit_keeps_start_when_residual_grows():
    # first step on the 1D Laplacian with b = 1 raises the residual to ~4.9
    n = 50
    system = system_of(laplacian_1d(n), np.ones(n))
    with pytest.raises(CGDidNotConverge) as info:
        cg_solve(system, SolveConfig(max_iters=2, preconditioner=Preconditioner.NONE))
    err = info.value
    assert err.iterations == 2
    assert err.x.shape == (n,)
    np.testing.assert_array_equal(err.x, 0.0)
    assert err.relative_residual == pytest.approx(1.0)


def test_iteration_limit_raises_with_best_iterate():
    system = system_of(diags(np.arange(1.0, 11.0)).tocsr(), np.ones(10))
    with pytest.raises(CGDidNotConverge) as info:
        cg_solve(system, SolveConfig(max_iters=3, preconditioner=Preconditioner.NONE))
    err = info.value
    assert 0.0 < err.relative_residual < 1.0
    assert err.relative_residual == pytest.approx(true_relative_residual(system, err.x), rel=1e-10)


def test_indefinite_matrix_reports_breakdown():
    system = system_of([[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0])
    _, stats = cg_solve(system, SolveConfig(preconditioner=Preconditioner.NONE))
    assert stats.breakdown
    _, stats = cg_solve(system, SolveConfig(preconditioner=Preconditioner.JACOBI))
    assert stats.breakdown


@pytest.mark.parametrize("rel_tol, max_iters", [(0.0, None), (1.0, None), (1e-8, 0)])
def test_invalid_config(rel_tol, max_iters):
    with pytest.raises(ValueError):
        SolveConfig(rel_tol=rel_tol, max_iters=max_iters)


def test_default_iteration_limit():
    assert SolveConfig().iteration_limit(30) == 300
    assert SolveConfig(max_iters=7).iteration_limit(30) == 7


@pytest.mark.parametrize(
    "problem, h, fitted",
    [
        (radial_problem(1.0, 100.0, 0.5), 0.25, True),
        (line_problem(1.0, 100.0, 0.3), 0.125, True),
        (radial_unfitted_problem(1.0, 100.0, 0.5), 1 / 12, False),
    ],
)
def test_matches_dense_elimination(problem, h, fitted):
    mesh = build_mesh(problem.domain, h, fitted=fitted)
    reduced = apply_dirichlet(assemble(mesh, problem), mesh, problem.dirichlet)
    assert 0 < reduced.size <= 200
    x, stats = cg_solve(reduced, SolveConfig(rel_tol=1e-12))
    assert not stats.breakdown
    direct = dense_solve(reduced)
    assert np.linalg.norm(x - direct) <= 1e-8 * np.linalg.norm(direct)


def test_well_conditioned_random_spd_converges_within_n_plus_five():
    n = 50
    rng = np.random.default_rng(2024)
    M = rng.standard_normal((n, n)) / np.sqrt(n)
    A = np.eye(n) + M.T @ M  # spectrum roughly [1, 5]
    b = rng.standard_normal(n)
    for preconditioner in Preconditioner:
        x, stats = cg_solve(system_of(A, b), SolveConfig(rel_tol=1e-12, preconditioner=preconditioner))
        assert stats.iterations <= n + 5
        np.testing.assert_allclose(x, np.linalg.solve(A, b), rtol=1e-9, atol=1e-11)


@pytest.mark.parametrize("B2", [100.0, 1e4])
def test_jacobi_costs_at_most_twice_plain_cg(B2):
    problem = radial_problem(1.0, B2, 0.5)
    mesh = build_mesh(problem.domain, 1 / 16)
    reduced = apply_dirichlet(assemble(mesh, problem), mesh, problem.dirichlet)
    _, plain = cg_solve(reduced, SolveConfig(preconditioner=Preconditioner.NONE))
    _, jacobi = cg_solve(reduced, SolveConfig(preconditioner=Preconditioner.JACOBI))
    assert jacobi.iterations <= 2 * plain.iterations

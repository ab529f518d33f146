import numpy as np
import pytest

from src.fem.assembly import LinearSystem, ProblemSpec, apply_dirichlet, assemble, residual_norm, zero_data
from src.fem.elements import (
    AssemblyError,
    CoefficientField,
    barycentric_gradients,
    element_matrices,
)
from src.fem.interpolation import (
    TriangleLocator,
    containing_triangles,
    evaluate_field,
    field_in_triangle,
    nodal_interpolant,
)
from src.fem.quadrature import DUNAVANT_6, EDGE_MIDPOINT
from src.geometry.curves import Circle, Point2
from src.geometry.domains import unit_square, vertical_chord
from src.meshgen.mesh import Mesh, VertexMarker
from src.problems.exact import ExactSolution
from src.problems.manufactured import radial_problem
from src.solver.cg import SolveConfig, cg_solve

RIGHT = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
CHORD = vertical_chord(0.5)


def linear_solution(interface):
    return ExactSolution(
        value1=lambda x, y: 3.0 * x - 2.0 * y + 1.0,
        value2=lambda x, y: 3.0 * x - 2.0 * y + 1.0,
        grad1=lambda x, y: (np.full_like(x, 3.0), np.full_like(y, -2.0)),
        grad2=lambda x, y: (np.full_like(x, 3.0), np.full_like(y, -2.0)),
        interface=interface,
    )


def square_problem(B1=1.0, B2=1.0, f=0.0):
    return ProblemSpec(
        name="square",
        domain=unit_square(CHORD),
        coeffs=CoefficientField.constants(B1, B2, f=f),
    )


class TestQuadrature:
    # exact integrals over the unit right triangle
    @pytest.mark.parametrize("rule", [EDGE_MIDPOINT, DUNAVANT_6])
    @pytest.mark.parametrize(
        "monomial, exact",
        [
            (lambda x, y: 1.0 + 0.0 * x, 1.0 / 2.0),
            (lambda x, y: x, 1.0 / 6.0),
            (lambda x, y: y, 1.0 / 6.0),
            (lambda x, y: x * x, 1.0 / 12.0),
            (lambda x, y: x * y, 1.0 / 24.0),
            (lambda x, y: y * y, 1.0 / 12.0),
        ],
    )
    def test_integrates_quadratics_exactly(self, rule, monomial, exact):
        qp = rule.physical_points(np.array([RIGHT]))
        assert 0.5 * monomial(qp[0, :, 0], qp[0, :, 1]) @ rule.weights == pytest.approx(exact, abs=1e-15)

    def test_dunavant_is_degree_four(self):
        # ∫ x⁴ over the unit right triangle is 1/30
        qp = DUNAVANT_6.physical_points(np.array([RIGHT]))
        assert 0.5 * (qp[0, :, 0] ** 4) @ DUNAVANT_6.weights == pytest.approx(1.0 / 30.0, abs=1e-14)


class TestElements:
    def test_right_triangle_gradients(self):
        grads = barycentric_gradients(RIGHT)
        np.testing.assert_allclose(grads, [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]], atol=1e-15)

    def test_gradients_sum_to_zero_and_halve_under_scaling(self):
        tri = np.array([(0.1, 0.2), (0.9, 0.35), (0.3, 0.8)])
        grads = barycentric_gradients(tri)
        np.testing.assert_allclose(grads.sum(axis=0), 0.0, atol=1e-14)
        np.testing.assert_allclose(barycentric_gradients(2.0 * tri), 0.5 * grads, rtol=1e-14)

    def test_unit_right_triangle_stiffness(self):
        coeffs = CoefficientField.constants(1.0, 1.0)
        stiffness, load = element_matrices(RIGHT, 1, False, coeffs, CHORD)
        expected = 0.5 * np.array([[2.0, -1.0, -1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
        assert np.max(np.abs(stiffness - expected)) <= 1e-14
        np.testing.assert_array_equal(load, 0.0)

    def test_unit_load(self):
        coeffs = CoefficientField.constants(1.0, 1.0, f=1.0)
        _, load = element_matrices(RIGHT, 1, False, coeffs, CHORD)
        np.testing.assert_allclose(load, [1.0 / 6.0] * 3, rtol=1e-14)

    def test_stiffness_scales_with_coefficient(self):
        base, _ = element_matrices(RIGHT, 2, False, CoefficientField.constants(1.0, 1.0), CHORD)
        scaled, _ = element_matrices(RIGHT, 2, False, CoefficientField.constants(1.0, 7.5), CHORD)
        np.testing.assert_allclose(scaled, 7.5 * base, rtol=1e-14)

    def test_irregular_triangle_mixes_branches(self):
        # the chord x = 0.5 cuts the triangle; B must land between B1 and B2
        coeffs = CoefficientField.constants(1.0, 100.0)
        stiffness, _ = element_matrices(RIGHT, 1, True, coeffs, CHORD)
        reference, _ = element_matrices(RIGHT, 1, False, CoefficientField.constants(1.0, 1.0), CHORD)
        ratio = stiffness[0, 0] / reference[0, 0]
        assert 1.0 < ratio < 100.0

    def test_nonpositive_coefficient_names_point(self):
        with pytest.raises(AssemblyError, match="quadrature point"):
            element_matrices(RIGHT, 1, False, CoefficientField.constants(-1.0, 1.0), CHORD)

    def test_degenerate_triangle(self):
        with pytest.raises(AssemblyError):
            element_matrices([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], 1, False, CoefficientField.constants(1.0, 1.0), CHORD)

    def test_reaction_adds_exact_mass_matrix(self):
        tri = [(0.1, 0.2), (0.9, 0.35), (0.3, 0.8)]
        area = 0.5 * ((0.9 - 0.1) * (0.8 - 0.2) - (0.3 - 0.1) * (0.35 - 0.2))
        mass = area / 12.0 * np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]])
        for irregular in (False, True):
            plain, _ = element_matrices(tri, 1, irregular, CoefficientField.constants(2.0, 2.0), CHORD)
            reactive, _ = element_matrices(tri, 1, irregular, CoefficientField.constants(2.0, 2.0, sigma=3.0), CHORD)
            np.testing.assert_allclose(reactive - plain, 3.0 * mass, atol=1e-15)

    @pytest.mark.parametrize("irregular", [False, True])
    def test_stiffness_is_semidefinite_with_constant_kernel(self, irregular):
        tri = [(0.2, 0.1), (0.8, 0.3), (0.4, 0.9)]
        stiffness, _ = element_matrices(tri, 2, irregular, CoefficientField.constants(1.0, 50.0), CHORD)
        eigenvalues = np.linalg.eigvalsh(stiffness)
        assert eigenvalues[0] == pytest.approx(0.0, abs=1e-12)
        assert np.all(eigenvalues[1:] > 1e-6)
        np.testing.assert_allclose(stiffness @ np.ones(3), 0.0, atol=1e-12)


class TestAssembly:
    def test_one_triangle_mesh_equals_element(self):
        mesh = Mesh.from_arrays(RIGHT, [[0, 1, 2]])
        problem = square_problem(f=1.0)
        system = assemble(mesh, problem)
        stiffness, load = element_matrices(RIGHT, 1, False, problem.coeffs, CHORD)
        np.testing.assert_allclose(system.matrix.toarray(), stiffness, atol=1e-15)
        np.testing.assert_allclose(system.rhs, load, atol=1e-15)

    def test_symmetric_with_zero_row_sums(self, disk_mesh):
        problem = radial_problem(1.0, 100.0, 0.5)
        A = assemble(disk_mesh, problem).matrix
        assert abs(A - A.T).max() <= 1e-12
        np.testing.assert_allclose(np.asarray(A.sum(axis=1)).ravel(), 0.0, atol=1e-9)

    def test_vertex_permutation(self, square_mesh):
        problem = square_problem(1.0, 10.0, f=1.0)
        rng = np.random.default_rng(7)
        perm = rng.permutation(square_mesh.n_vertices)
        inverse = np.argsort(perm)
        shuffled = Mesh.from_arrays(
            square_mesh.vertices[perm],
            inverse[square_mesh.triangles],
            square_mesh.vertex_marker[perm],
            square_mesh.tri_region,
            square_mesh.tri_class,
        )
        A = assemble(square_mesh, problem)
        B = assemble(shuffled, problem)
        np.testing.assert_allclose(B.matrix.toarray(), A.matrix.toarray()[np.ix_(perm, perm)], atol=1e-13)
        np.testing.assert_allclose(B.rhs, A.rhs[perm], atol=1e-15)

    def test_zero_dirichlet_keeps_free_rhs(self, square_mesh):
        system = assemble(square_mesh, square_problem(f=1.0))
        reduced = apply_dirichlet(system, square_mesh, zero_data)
        free = square_mesh.free_vertices()
        np.testing.assert_array_equal(reduced.rhs, system.rhs[free])
        assert reduced.size == free.size

    def test_all_boundary_vertices(self):
        markers = np.full(3, int(VertexMarker.BOUNDARY))
        mesh = Mesh.from_arrays(RIGHT, [[0, 1, 2]], markers)
        reduced = apply_dirichlet(assemble(mesh, square_problem(f=1.0)), mesh, lambda x, y: x + 2.0 * y)
        assert reduced.size == 0
        x, stats = cg_solve(reduced)
        assert stats.iterations == 0
        np.testing.assert_allclose(reduced.expand(x), [0.0, 1.0, 2.0])

    def test_single_interior_vertex(self):
        vertices = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)]
        triangles = [[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]]
        markers = [1, 1, 1, 1, 0]
        mesh = Mesh.from_arrays(vertices, triangles, markers)
        reduced = apply_dirichlet(assemble(mesh, square_problem(f=1.0)), mesh, zero_data)
        assert reduced.matrix.shape == (1, 1)
        assert reduced.matrix[0, 0] == pytest.approx(4.0)
        assert reduced.rhs[0] == pytest.approx(1.0 / 3.0)
        x, _ = cg_solve(reduced)
        assert x[0] == pytest.approx(reduced.rhs[0] / reduced.matrix[0, 0])
        assert residual_norm(reduced, x) <= 1e-12

    def test_scaling_diffusion_scales_solution_inversely(self, disk_mesh):
        base = radial_problem(1.0, 100.0, 0.5)
        c = 3.0
        scaled = ProblemSpec(
            name="radial-scaled",
            domain=base.domain,
            coeffs=base.coeffs.scaled(b_factor=c),
            exact=base.exact.scaled(1.0 / c),
        )
        config = SolveConfig(rel_tol=1e-12)
        solutions = []
        for problem in (base, scaled):
            reduced = apply_dirichlet(assemble(disk_mesh, problem), disk_mesh, problem.dirichlet)
            x, _ = cg_solve(reduced, config)
            solutions.append(reduced.expand(x))
        np.testing.assert_allclose(solutions[1], solutions[0] / c, rtol=1e-8, atol=1e-14)

        # the scaled closed form is still the exact solution of the scaled problem
        vertex_error = nodal_interpolant(disk_mesh, scaled.exact) - nodal_interpolant(disk_mesh, base.exact) / c
        np.testing.assert_allclose(vertex_error, 0.0, atol=1e-15)

    def test_inconsistent_dirichlet_data_rejected(self):
        with pytest.raises(AssemblyError, match="Dirichlet data"):
            ProblemSpec(
                name="bad",
                domain=unit_square(CHORD),
                coeffs=CoefficientField.constants(1.0, 1.0),
                dirichlet=zero_data,
                exact=linear_solution(CHORD),
            )


class TestInterpolation:
    def test_linear_function_is_reproduced(self, disk_mesh):
        exact = linear_solution(Circle(Point2(0.0, 0.0), 0.5))
        coeffs = nodal_interpolant(disk_mesh, exact)
        x, y = disk_mesh.vertices.T
        np.testing.assert_allclose(coeffs, 3.0 * x - 2.0 * y + 1.0, atol=1e-14)

        value, grad = evaluate_field(disk_mesh, coeffs, Point2(0.31, -0.22))
        assert value == pytest.approx(3.0 * 0.31 + 2.0 * 0.22 + 1.0, abs=1e-12)
        np.testing.assert_allclose(grad, [3.0, -2.0], atol=1e-12)

    def test_zero_function(self, square_mesh):
        zero = ExactSolution(
            value1=lambda x, y: 0.0 * x,
            value2=lambda x, y: 0.0 * x,
            grad1=lambda x, y: (0.0 * x, 0.0 * y),
            grad2=lambda x, y: (0.0 * x, 0.0 * y),
            interface=CHORD,
        )
        np.testing.assert_array_equal(nodal_interpolant(square_mesh, zero), 0.0)

    def test_radial_interface_vertices_agree(self, disk_mesh):
        problem = radial_problem(1.0, 10.0, 0.5)
        coeffs = nodal_interpolant(disk_mesh, problem.exact)
        ring = disk_mesh.vertex_marker == VertexMarker.INTERFACE
        np.testing.assert_allclose(coeffs[ring], 0.075, atol=1e-12)

    def test_branch_mismatch_rejected(self, disk_mesh):
        broken = ExactSolution(
            value1=lambda x, y: 0.0 * x,
            value2=lambda x, y: 1.0 + 0.0 * x,
            grad1=lambda x, y: (0.0 * x, 0.0 * y),
            grad2=lambda x, y: (0.0 * x, 0.0 * y),
            interface=Circle(Point2(0.0, 0.0), 0.5),
        )
        with pytest.raises(AssemblyError, match="interface vertex"):
            nodal_interpolant(disk_mesh, broken)

    def test_value_at_vertex(self, square_mesh):
        coeffs = np.arange(square_mesh.n_vertices, dtype=float)
        k = 7
        p = Point2(*square_mesh.vertices[k])
        value, _ = evaluate_field(square_mesh, coeffs, p)
        assert value == pytest.approx(coeffs[k])

    def test_shared_edge_is_continuous(self, square_mesh):
        coeffs = np.sin(square_mesh.vertices[:, 0] * 3.0) + square_mesh.vertices[:, 1] ** 2
        # midpoint of the diagonal of an interior grid cell
        p = Point2(0.375, 0.375)
        owners = containing_triangles(square_mesh, p)
        assert len(owners) == 2
        values = [field_in_triangle(square_mesh, coeffs, int(t), p)[0] for t in owners]
        assert values[0] == pytest.approx(values[1], abs=1e-14)

    def test_locator_agrees_with_linear_scan(self, disk_mesh):
        locator = TriangleLocator(disk_mesh)
        rng = np.random.default_rng(3)
        for r, t in zip(0.95 * np.sqrt(rng.random(40)), 2 * np.pi * rng.random(40)):
            p = Point2(r * np.cos(t), r * np.sin(t))
            assert set(containing_triangles(disk_mesh, p, locator)) == set(containing_triangles(disk_mesh, p))

    def test_point_outside_mesh(self, square_mesh):
        with pytest.raises(AssemblyError, match="outside the mesh"):
            evaluate_field(square_mesh, np.zeros(square_mesh.n_vertices), Point2(1.5, 0.5))


def test_linear_system_expand():
    system = LinearSystem(
        matrix=None,
        rhs=np.zeros(2),
        free_dofs=np.array([0, 2]),
        n_vertices=3,
        boundary_values=np.array([0.0, 5.0, 0.0]),
    )
    np.testing.assert_array_equal(system.expand(np.array([1.0, 2.0])), [1.0, 5.0, 2.0])

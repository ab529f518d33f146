"""
Global assembly of the weak form a(u, v) = (f, v) and Dirichlet elimination.

Element contributions are scattered through a COO triplet list and summed by
scipy on conversion to CSR, so the accumulation order is fixed by the
triangle order and assembly is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from opentelemetry import trace
from scipy.sparse import coo_matrix, csr_matrix

from src.fem.elements import AssemblyError, CoefficientField, element_system
from src.fem.quadrature import DUNAVANT_6, EDGE_MIDPOINT, QuadratureRule
from src.geometry.domains import DomainKind, DomainSpec
from src.meshgen.mesh import Mesh, TriClass
from src.problems.exact import ExactSolution

tracer = trace.get_tracer(__name__)

BoundaryData = Callable[[np.ndarray, np.ndarray], np.ndarray]


def zero_data(x, y):
    return np.zeros(np.broadcast(x, y).shape)


def boundary_samples(domain: DomainSpec, n: int = 64) -> np.ndarray:
    """n points spread along Γ, shape (n, 2)."""
    t = np.arange(n) / n
    if domain.kind is DomainKind.UNIT_DISK:
        theta = 2.0 * math.pi * t
        return np.column_stack([
            domain.center.x + domain.radius * np.cos(theta),
            domain.center.y + domain.radius * np.sin(theta),
        ])
    s = 4.0 * t
    side = np.floor(s).astype(int)
    u = s - side
    x = np.choose(side, [u, np.ones_like(u), 1.0 - u, np.zeros_like(u)])
    y = np.choose(side, [np.zeros_like(u), u, np.ones_like(u), 1.0 - u])
    return np.column_stack([x, y])


@dataclass(frozen=True)
class ProblemSpec:
    """The boundary value problem: domain, coefficients, Dirichlet data and (optionally) u."""

    name: str
    domain: DomainSpec
    coeffs: CoefficientField
    dirichlet: BoundaryData = zero_data
    exact: Optional[ExactSolution] = None

    def __post_init__(self):
        if self.exact is None:
            return
        pts = boundary_samples(self.domain)
        u = self.exact.value(pts[:, 0], pts[:, 1])
        g = self.dirichlet(pts[:, 0], pts[:, 1])
        gap = float(np.max(np.abs(u - g)))
        if gap > 1e-10:
            raise AssemblyError(f"{self.name}: exact solution misses the Dirichlet data by {gap:.3e} on Γ")

    @property
    def curve(self):
        return self.domain.interface


@dataclass(frozen=True)
class LinearSystem:
    """
    A sparse system in compressed-row layout.

    free_dofs maps rows to mesh vertices. After Dirichlet elimination,
    boundary_values holds the full-length vector of known values (zero on
    free vertices) so solutions can be expanded back to every vertex.
    """

    matrix: csr_matrix
    rhs: np.ndarray
    free_dofs: np.ndarray
    n_vertices: int
    boundary_values: Optional[np.ndarray] = field(default=None)

    @property
    def size(self) -> int:
        return len(self.rhs)

    def expand(self, x_free: np.ndarray) -> np.ndarray:
        """Vertex vector with x_free on free dofs and the Dirichlet values elsewhere."""
        full = np.zeros(self.n_vertices) if self.boundary_values is None else self.boundary_values.copy()
        full[self.free_dofs] = x_free
        return full


def assemble(
    mesh: Mesh,
    problem: ProblemSpec,
    rule_regular: QuadratureRule = EDGE_MIDPOINT,
    rule_irregular: QuadratureRule = DUNAVANT_6,
) -> LinearSystem:
    """Full vertex-indexed system before boundary conditions."""
    with tracer.start_as_current_span("assemble") as span:
        span.set_attribute("mesh.triangles", mesh.n_triangles)
        span.set_attribute("mesh.vertices", mesh.n_vertices)

        tri_xy = mesh.vertices[mesh.triangles]
        irregular = mesh.tri_class == TriClass.IRREGULAR
        stiffness, load = element_system(
            tri_xy, mesh.tri_region, irregular, problem.coeffs, problem.curve, rule_regular, rule_irregular
        )

        t = mesh.triangles
        rows = np.repeat(t, 3, axis=1).ravel()
        cols = np.tile(t, (1, 3)).ravel()
        n = mesh.n_vertices
        matrix = coo_matrix((stiffness.ravel(), (rows, cols)), shape=(n, n)).tocsr()
        matrix.sum_duplicates()
        rhs = np.bincount(t.ravel(), weights=load.ravel(), minlength=n)

        span.set_attribute("matrix.nnz", int(matrix.nnz))
        return LinearSystem(matrix=matrix, rhs=rhs, free_dofs=np.arange(n), n_vertices=n)


def apply_dirichlet(system: LinearSystem, mesh: Mesh, g: BoundaryData) -> LinearSystem:
    """
    Eliminate boundary rows and columns.

    Known boundary values move to the right-hand side:
    rhs_i <- rhs_i - sum_j A_ij g(v_j) over boundary vertices j.
    """
    with tracer.start_as_current_span("apply_dirichlet") as span:
        boundary = mesh.boundary_vertices()
        free = mesh.free_vertices()
        values = np.zeros(mesh.n_vertices)
        if boundary.size:
            xb = mesh.vertices[boundary]
            values[boundary] = g(xb[:, 0], xb[:, 1])

        A = system.matrix
        A_free = A[free]
        reduced = A_free[:, free].tocsr()
        rhs = system.rhs[free] - A_free[:, boundary] @ values[boundary]

        span.set_attribute("dofs.free", int(free.size))
        span.set_attribute("dofs.boundary", int(boundary.size))
        return LinearSystem(
            matrix=reduced,
            rhs=np.asarray(rhs, dtype=float),
            free_dofs=free,
            n_vertices=mesh.n_vertices,
            boundary_values=values,
        )


def residual_norm(system: LinearSystem, x: np.ndarray) -> float:
    """‖A x − b‖₂ / ‖b‖₂ (absolute norm when b = 0)."""
    r = system.rhs - system.matrix @ x
    b = float(np.linalg.norm(system.rhs))
    return float(np.linalg.norm(r)) / (b if b > 0.0 else 1.0)

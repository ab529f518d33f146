"""
P1 element kernels for a(u, v) = ∫ B ∇u·∇v + σ u v and (f, v).

Gradients of the barycentric coordinates are constant on a triangle, so the
diffusion part only needs the quadrature average of B; the reaction and
load parts use the basis values at the quadrature points. On irregular
triangles every quadrature point picks the coefficient branch of the region
it actually lies in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from src.fem.quadrature import DUNAVANT_6, EDGE_MIDPOINT, QuadratureRule
from src.geometry.curves import InterfaceCurve, signed_distance_array

ScalarField = Callable[[np.ndarray, np.ndarray], np.ndarray]


class AssemblyError(ValueError):
    """Invalid element or coefficient data met while building the discrete system."""


def constant(c: float) -> ScalarField:
    def field(x, y):
        return np.full(np.broadcast(x, y).shape, float(c))

    return field


@dataclass(frozen=True)
class CoefficientField:
    """Piecewise coefficients: B1/B2 per region, σ and f everywhere. All vectorised in (x, y)."""

    B1: ScalarField
    B2: ScalarField
    sigma: ScalarField
    f: ScalarField

    @classmethod
    def constants(cls, B1: float, B2: float, sigma: float = 0.0, f: float = 0.0) -> "CoefficientField":
        return cls(B1=constant(B1), B2=constant(B2), sigma=constant(sigma), f=constant(f))

    def scaled(self, b_factor: float = 1.0, f_factor: float = 1.0) -> "CoefficientField":
        return CoefficientField(
            B1=lambda x, y: b_factor * self.B1(x, y),
            B2=lambda x, y: b_factor * self.B2(x, y),
            sigma=self.sigma,
            f=lambda x, y: f_factor * self.f(x, y),
        )


def triangle_geometry(tri_xy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Areas and barycentric gradients for a batch of triangles.

    Args:
        tri_xy: vertex coordinates, shape (m, 3, 2)

    Returns:
        areas of shape (m,) and gradients of shape (m, 3, 2)
    """
    x = tri_xy[..., 0]
    y = tri_xy[..., 1]
    twice_area = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    if np.any(twice_area <= 0.0):
        bad = int(np.flatnonzero(twice_area <= 0.0)[0])
        raise AssemblyError(f"degenerate or clockwise triangle {bad} (signed area {0.5 * twice_area[bad]:.3e})")
    grads = np.empty_like(tri_xy)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        grads[:, i, 0] = (y[:, j] - y[:, k]) / twice_area
        grads[:, i, 1] = (x[:, k] - x[:, j]) / twice_area
    return 0.5 * twice_area, grads


def barycentric_gradients(tri) -> np.ndarray:
    """∇L1, ∇L2, ∇L3 of one triangle given as three (x, y) vertices; shape (3, 2)."""
    _, grads = triangle_geometry(np.asarray(tri, dtype=float).reshape(1, 3, 2))
    return grads[0]


def _check_coefficients(B: np.ndarray, sigma: np.ndarray, qp: np.ndarray) -> None:
    bad = ~(B > 0.0)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        x, y = qp[tuple(idx)]
        raise AssemblyError(f"diffusion coefficient {B[tuple(idx)]!r} is not positive at quadrature point ({x:.6g}, {y:.6g})")
    bad = ~(sigma >= 0.0)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        x, y = qp[tuple(idx)]
        raise AssemblyError(f"reaction coefficient {sigma[tuple(idx)]!r} is negative at quadrature point ({x:.6g}, {y:.6g})")


def _kernel(tri_xy, point_region, coeffs: CoefficientField, rule: QuadratureRule):
    """Element stiffness (m, 3, 3) and load (m, 3) for triangles sharing one rule."""
    area, grads = triangle_geometry(tri_xy)
    qp = rule.physical_points(tri_xy)
    x, y = qp[..., 0], qp[..., 1]

    B = np.where(point_region == 1, coeffs.B1(x, y), coeffs.B2(x, y))
    sigma = np.broadcast_to(coeffs.sigma(x, y), x.shape)
    f = np.broadcast_to(coeffs.f(x, y), x.shape)
    _check_coefficients(B, sigma, qp)

    w = rule.weights
    lam = rule.points
    b_mean = B @ w
    stiffness = (area * b_mean)[:, None, None] * np.einsum("mid,mjd->mij", grads, grads)
    stiffness += area[:, None, None] * np.einsum("mk,k,ki,kj->mij", sigma, w, lam, lam)
    load = area[:, None] * np.einsum("mk,k,ki->mi", f, w, lam)
    return stiffness, load


def element_system(
    tri_xy: np.ndarray,
    tri_region: np.ndarray,
    irregular: np.ndarray,
    coeffs: CoefficientField,
    curve: InterfaceCurve,
    rule_regular: QuadratureRule = EDGE_MIDPOINT,
    rule_irregular: QuadratureRule = DUNAVANT_6,
) -> tuple[np.ndarray, np.ndarray]:
    """Batched element matrices; regular triangles use their single region, irregular ones test every point."""
    m = len(tri_xy)
    stiffness = np.empty((m, 3, 3))
    load = np.empty((m, 3))

    reg = np.flatnonzero(~irregular)
    if reg.size:
        point_region = np.broadcast_to(tri_region[reg][:, None], (reg.size, len(rule_regular.weights)))
        stiffness[reg], load[reg] = _kernel(tri_xy[reg], point_region, coeffs, rule_regular)

    irr = np.flatnonzero(irregular)
    if irr.size:
        qp = rule_irregular.physical_points(tri_xy[irr])
        point_region = np.where(signed_distance_array(curve, qp[..., 0], qp[..., 1]) <= 0.0, 1, 2)
        stiffness[irr], load[irr] = _kernel(tri_xy[irr], point_region, coeffs, rule_irregular)

    return stiffness, load


def element_matrices(
    tri,
    region: int,
    irregular: bool,
    coeffs: CoefficientField,
    curve: InterfaceCurve,
    rule_regular: QuadratureRule = EDGE_MIDPOINT,
    rule_irregular: QuadratureRule = DUNAVANT_6,
) -> tuple[np.ndarray, np.ndarray]:
    """Stiffness (3, 3) and load (3,) of a single triangle."""
    tri_xy = np.asarray(tri, dtype=float).reshape(1, 3, 2)
    stiffness, load = element_system(
        tri_xy, np.array([region]), np.array([irregular]), coeffs, curve, rule_regular, rule_irregular
    )
    return stiffness[0], load[0]

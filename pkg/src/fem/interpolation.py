"""
Nodal interpolation and pointwise evaluation of P1 fields.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Optional

import numpy as np

from src.fem.elements import AssemblyError, triangle_geometry
from src.geometry.curves import Point2, signed_distance_array
from src.meshgen.mesh import Mesh, VertexMarker

CONTAINMENT_TOL = 1e-12
CONTINUITY_TOL = 1e-9


def nodal_interpolant(mesh: Mesh, exact) -> np.ndarray:
    """
    u(vertex_i) for every vertex.

    Vertices on S are evaluated with both branches, which must agree since u
    is continuous across the interface.
    """
    x, y = mesh.vertices[:, 0], mesh.vertices[:, 1]
    s = signed_distance_array(exact.interface, x, y)
    v1 = exact.value1(x, y) * np.ones_like(x)
    v2 = exact.value2(x, y) * np.ones_like(x)

    on_s = (mesh.vertex_marker == VertexMarker.INTERFACE) | (np.abs(s) <= 1e-10)
    gap = np.abs(v1 - v2)
    bad = np.flatnonzero(on_s & (gap > CONTINUITY_TOL))
    if bad.size:
        i = int(bad[0])
        raise AssemblyError(
            f"exact solution branches differ by {gap[i]:.3e} at interface vertex ({x[i]:.6g}, {y[i]:.6g})"
        )
    return np.where(s <= 0.0, v1, v2)


class TriangleLocator:
    """
    Uniform-grid bucket index over triangle bounding boxes.

    Cells are about one mesh size wide, so each query inspects a handful of
    triangles instead of the whole mesh.
    """

    def __init__(self, mesh: Mesh, cell_size: Optional[float] = None):
        self.mesh = mesh
        tri_xy = mesh.vertices[mesh.triangles]
        self.lo = mesh.vertices.min(axis=0)
        self.cell = float(cell_size or mesh.h)
        bb_lo = np.floor((tri_xy.min(axis=1) - self.lo) / self.cell).astype(int)
        bb_hi = np.floor((tri_xy.max(axis=1) - self.lo) / self.cell).astype(int)
        self.buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
        for t, ((i0, j0), (i1, j1)) in enumerate(zip(bb_lo, bb_hi)):
            for i in range(i0, i1 + 1):
                for j in range(j0, j1 + 1):
                    self.buckets[(i, j)].append(t)

    def candidates(self, p: Point2) -> np.ndarray:
        i = int(math.floor((p.x - self.lo[0]) / self.cell))
        j = int(math.floor((p.y - self.lo[1]) / self.cell))
        return np.array(self.buckets.get((i, j), []), dtype=np.int64)


def _barycentric_in(mesh: Mesh, tris: np.ndarray, p: Point2) -> np.ndarray:
    xy = mesh.vertices[mesh.triangles[tris]]
    _, grads = triangle_geometry(xy)
    d = np.array([p.x, p.y]) - xy[:, 0]
    l1 = np.einsum("md,md->m", grads[:, 1], d)
    l2 = np.einsum("md,md->m", grads[:, 2], d)
    return np.column_stack([1.0 - l1 - l2, l1, l2])


def containing_triangles(mesh: Mesh, p: Point2, locator: Optional[TriangleLocator] = None) -> np.ndarray:
    """Every triangle whose barycentric coordinates of p are all >= -1e-12."""
    tris = np.arange(mesh.n_triangles) if locator is None else locator.candidates(p)
    if tris.size == 0:
        return tris
    lam = _barycentric_in(mesh, tris, p)
    return tris[np.all(lam >= -CONTAINMENT_TOL, axis=1)]


def field_in_triangle(mesh: Mesh, coeffs: np.ndarray, t: int, p: Point2) -> tuple[float, np.ndarray]:
    """Value at p and (constant) gradient of the P1 field restricted to triangle t."""
    tri = mesh.triangles[t]
    _, grads = triangle_geometry(mesh.vertices[tri][None])
    lam = _barycentric_in(mesh, np.array([t]), p)[0]
    c = np.asarray(coeffs, dtype=float)[tri]
    return float(lam @ c), grads[0].T @ c


def evaluate_field(
    mesh: Mesh,
    coeffs: np.ndarray,
    p: Point2,
    locator: Optional[TriangleLocator] = None,
) -> tuple[float, np.ndarray]:
    """(value, gradient) of the field sum c_i L_i at p, using the first containing triangle."""
    found = containing_triangles(mesh, p, locator)
    if found.size == 0:
        raise AssemblyError(f"point ({p.x:.6g}, {p.y:.6g}) lies outside the mesh")
    return field_in_triangle(mesh, coeffs, int(found[0]), p)

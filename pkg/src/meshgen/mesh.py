"""
Triangulations with interface bookkeeping.

A Mesh carries, besides vertices and counterclockwise triangles, a marker per
vertex (interior / boundary / interface) and, per triangle, the region it is
attributed to and whether S crosses it (regular / irregular elements).
Arrays are frozen after construction so meshes can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

from src.geometry.curves import Circle, InterfaceCurve, signed_distance_array
from src.geometry.domains import DomainSpec


class MeshError(ValueError):
    """Invalid mesh input or a mesh that violates its invariants."""


class VertexMarker(IntEnum):
    INTERIOR = 0
    BOUNDARY = 1
    INTERFACE = 2


class TriClass(IntEnum):
    REGULAR = 0
    IRREGULAR = 1


def _frozen(a: np.ndarray, dtype) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def signed_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    p0 = vertices[triangles[:, 0]]
    p1 = vertices[triangles[:, 1]]
    p2 = vertices[triangles[:, 2]]
    d1 = p1 - p0
    d2 = p2 - p0
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def edge_lengths(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Lengths of the edges opposite each vertex, shape (ntri, 3)."""
    p = vertices[triangles]
    return np.stack(
        [
            np.linalg.norm(p[:, 2] - p[:, 1], axis=1),
            np.linalg.norm(p[:, 0] - p[:, 2], axis=1),
            np.linalg.norm(p[:, 1] - p[:, 0], axis=1),
        ],
        axis=1,
    )


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray
    triangles: np.ndarray
    vertex_marker: np.ndarray
    tri_region: np.ndarray
    tri_class: np.ndarray
    h: float

    @classmethod
    def from_arrays(
        cls,
        vertices,
        triangles,
        vertex_marker=None,
        tri_region=None,
        tri_class=None,
    ) -> "Mesh":
        """Validate orientation and compute h; missing tags default to interior / region1 / regular."""
        vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
        triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        nv, nt = len(vertices), len(triangles)
        if nt == 0:
            raise MeshError("mesh has no triangles")
        if not np.all(np.isfinite(vertices)):
            raise MeshError("mesh has non-finite vertex coordinates")
        if triangles.min() < 0 or triangles.max() >= nv:
            raise MeshError("triangle references a vertex index out of range")

        area = signed_areas(vertices, triangles)
        bad = np.flatnonzero(area <= 0.0)
        if bad.size:
            raise MeshError(f"triangle {int(bad[0])} has non-positive signed area {area[bad[0]]:.3e}")

        if vertex_marker is None:
            vertex_marker = np.full(nv, int(VertexMarker.INTERIOR))
        if tri_region is None:
            tri_region = np.ones(nt)
        if tri_class is None:
            tri_class = np.full(nt, int(TriClass.REGULAR))

        return cls(
            vertices=_frozen(vertices, float),
            triangles=_frozen(triangles, np.int64),
            vertex_marker=_frozen(vertex_marker, np.int8),
            tri_region=_frozen(tri_region, np.int8),
            tri_class=_frozen(tri_class, np.int8),
            h=float(edge_lengths(vertices, triangles).max()),
        )

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def areas(self) -> np.ndarray:
        return signed_areas(self.vertices, self.triangles)

    def centroids(self) -> np.ndarray:
        return self.vertices[self.triangles].mean(axis=1)

    def with_tags(self, tri_region=None, tri_class=None, vertex_marker=None) -> "Mesh":
        return Mesh(
            vertices=self.vertices,
            triangles=self.triangles,
            vertex_marker=self.vertex_marker if vertex_marker is None else _frozen(vertex_marker, np.int8),
            tri_region=self.tri_region if tri_region is None else _frozen(tri_region, np.int8),
            tri_class=self.tri_class if tri_class is None else _frozen(tri_class, np.int8),
            h=self.h,
        )

    def boundary_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.vertex_marker == VertexMarker.BOUNDARY)

    def free_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.vertex_marker != VertexMarker.BOUNDARY)


def _point_segment_distance(px, py, ax, ay, bx, by) -> np.ndarray:
    dx = bx - ax
    dy = by - ay
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy), 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _barycentric(points: np.ndarray, tri_xy: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of points (k, 2) in every triangle (m, 3, 2): shape (m, k, 3)."""
    p0, p1, p2 = tri_xy[:, 0], tri_xy[:, 1], tri_xy[:, 2]
    det = (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) - (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0])
    dx = points[None, :, 0] - p0[:, None, 0]
    dy = points[None, :, 1] - p0[:, None, 1]
    l1 = ((p2[:, None, 1] - p0[:, None, 1]) * dx - (p2[:, None, 0] - p0[:, None, 0]) * dy) / det[:, None]
    l2 = (-(p1[:, None, 1] - p0[:, None, 1]) * dx + (p1[:, None, 0] - p0[:, None, 0]) * dy) / det[:, None]
    return np.stack([1.0 - l1 - l2, l1, l2], axis=-1)


def classify_triangles(mesh: Mesh, curve: InterfaceCurve, tol: float = 0.0) -> Mesh:
    """
    Tag every triangle regular or irregular against the true curve.

    A triangle is irregular when S meets its interior. For circles this is
    decided from the distance range between the circle center and the
    triangle (the triangle is connected, so a range straddling the radius
    means the circle passes through it); for polylines from mixed vertex
    sides or a curve vertex strictly inside the triangle. tri_region is the
    region of the centroid in both cases.
    """
    tri_xy = mesh.vertices[mesh.triangles]
    s = signed_distance_array(curve, mesh.vertices[:, 0], mesh.vertices[:, 1])
    s_tri = s[mesh.triangles]

    if isinstance(curve, Circle):
        cx, cy, r = curve.center.x, curve.center.y, curve.radius
        dmax = np.hypot(tri_xy[..., 0] - cx, tri_xy[..., 1] - cy).max(axis=1)
        dedge = np.stack(
            [
                _point_segment_distance(cx, cy, tri_xy[:, i, 0], tri_xy[:, i, 1],
                                        tri_xy[:, (i + 1) % 3, 0], tri_xy[:, (i + 1) % 3, 1])
                for i in range(3)
            ],
            axis=1,
        ).min(axis=1)
        lam = _barycentric(np.array([[cx, cy]]), tri_xy)[:, 0, :]
        dmin = np.where(np.all(lam >= 0.0, axis=1), 0.0, dedge)
        irregular = (dmin < r - tol) & (dmax > r + tol)
    else:
        mixed = np.any(s_tri < -tol, axis=1) & np.any(s_tri > tol, axis=1)
        corners = np.array([[v.x, v.y] for v in curve.vertices])
        lam = _barycentric(corners, tri_xy)
        corner_inside = np.any(np.all(lam > 1e-12, axis=2), axis=1)
        irregular = mixed | corner_inside

    c = mesh.centroids()
    sc = signed_distance_array(curve, c[:, 0], c[:, 1])
    majority = np.where(np.sum(s_tri < 0.0, axis=1) >= 2, 1, 2)
    region = np.where(sc < 0.0, 1, np.where(sc > 0.0, 2, majority))

    tri_class = np.where(irregular, int(TriClass.IRREGULAR), int(TriClass.REGULAR))
    return mesh.with_tags(tri_region=region, tri_class=tri_class)


@dataclass(frozen=True)
class MeshQualityReport:
    h: float
    min_inradius_ratio: float
    n_regular: int
    n_irregular: int
    irregular_two_vertices_on_S: bool
    n_triangles: int
    max_sliver_width: Optional[float] = None


def inradii(mesh: Mesh) -> np.ndarray:
    perimeter = edge_lengths(mesh.vertices, mesh.triangles).sum(axis=1)
    return 2.0 * mesh.areas() / perimeter


def quality_report(mesh: Mesh, curve: Optional[InterfaceCurve] = None) -> MeshQualityReport:
    """
    Audit the mesh assumptions: inscribed disk of radius c·h and two vertices
    on S for every irregular triangle.

    With a curve, also measures the widest sliver between S and the chord
    joining the two interface vertices of an irregular triangle.
    """
    irregular = mesh.tri_class == TriClass.IRREGULAR
    on_s = (mesh.vertex_marker[mesh.triangles] == VertexMarker.INTERFACE).sum(axis=1)

    sliver = None
    if curve is not None:
        sliver = 0.0
        idx = np.flatnonzero(irregular & (on_s >= 2))
        if idx.size:
            tri = mesh.triangles[idx]
            flags = mesh.vertex_marker[tri] == VertexMarker.INTERFACE
            # first two interface vertices of each triangle span the chord
            order = np.argsort(~flags, axis=1, kind="stable")[:, :2]
            ends = mesh.vertices[np.take_along_axis(tri, order, axis=1)]
            mid = ends.mean(axis=1)
            sliver = float(np.abs(signed_distance_array(curve, mid[:, 0], mid[:, 1])).max())

    return MeshQualityReport(
        h=mesh.h,
        min_inradius_ratio=float(inradii(mesh).min() / mesh.h),
        n_regular=int(np.count_nonzero(~irregular)),
        n_irregular=int(np.count_nonzero(irregular)),
        irregular_two_vertices_on_S=bool(np.all(on_s[irregular] >= 2)),
        n_triangles=mesh.n_triangles,
        max_sliver_width=sliver,
    )


@dataclass(frozen=True)
class EdgeCensus:
    n_boundary: int
    n_interior: int
    n_overused: int


def unique_edges(mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
    """Sorted vertex pairs of all edges and how many triangles use each."""
    t = mesh.triangles
    edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    edges.sort(axis=1)
    return np.unique(edges, axis=0, return_counts=True)


def edge_census(mesh: Mesh) -> EdgeCensus:
    _, counts = unique_edges(mesh)
    return EdgeCensus(
        n_boundary=int(np.count_nonzero(counts == 1)),
        n_interior=int(np.count_nonzero(counts == 2)),
        n_overused=int(np.count_nonzero(counts > 2)),
    )


def polygon_area_deficit(mesh: Mesh, domain: DomainSpec) -> float:
    """area(Ω) − area(Ω_h)."""
    return domain.area - float(mesh.areas().sum())

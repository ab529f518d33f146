"""
Structured mesh generators.

build_disk_polar_mesh and build_square_line_mesh produce interface-fitted
meshes: the interface is a ring of vertices (resp. a grid line), so the only
triangles S passes through are the chord slivers of the circle. The
unfitted square mesh ignores the interface and serves as a negative control.
"""

from __future__ import annotations

import math

import numpy as np

from src.geometry.curves import Circle, Polyline, signed_distance_array
from src.geometry.domains import DomainKind, DomainSpec
from src.meshgen.mesh import Mesh, MeshError, VertexMarker, classify_triangles


def _ring_count(radius: float, spacing: float) -> int:
    """Vertices on a ring so that arc spacing matches the radial spacing; a multiple of six."""
    return max(6, 6 * int(math.floor(2.0 * math.pi * radius / (6.0 * spacing) + 0.5)))


RADIAL_SPACING_RATIO = 1.15


def radial_layer_counts(r0: float, outer: float, target_h: float) -> tuple[int, int]:
    """
    Number of annuli inside r0 and in the outer band of width ``outer``.

    Both spacings stay at most target_h. Among the pairs whose spacings are
    within RADIAL_SPACING_RATIO of each other the one with the fewest rings
    wins; when none qualifies the closest pair is used. Unequal spacings on
    the two sides of the interface ring produce flat triangles there.
    """
    lo1 = max(1, math.ceil(r0 / target_h - 1e-9))
    lo2 = max(1, math.ceil(outer / target_h - 1e-9))
    hi1 = max(lo1, math.ceil(r0 * lo2 / outer)) + 1
    hi2 = max(lo2, math.ceil(outer * lo1 / r0)) + 1

    best = None
    for m1 in range(lo1, hi1 + 1):
        for m2 in range(lo2, hi2 + 1):
            d1, d2 = r0 / m1, outer / m2
            ratio = max(d1, d2) / min(d1, d2)
            close = ratio <= RADIAL_SPACING_RATIO
            key = (not close, 0.0 if close else round(ratio, 9), m1 + m2)
            if best is None or key < best[0]:
                best = (key, m1, m2)
    return best[1], best[2]


def _stitch_rings(inner: np.ndarray, inner_xy: np.ndarray, outer: np.ndarray, outer_xy: np.ndarray) -> list[tuple[int, int, int]]:
    """
    Triangulate the annulus between two closed vertex rings.

    Both rings start at angle zero and run counterclockwise. The sweep
    advances along whichever ring gives the shorter new cross edge.
    """
    p, q = len(inner), len(outer)
    if p == 1:
        return [(int(inner[0]), int(outer[j]), int(outer[(j + 1) % q])) for j in range(q)]

    tris = []
    i = j = 0
    while i < p or j < q:
        a, a_next = inner[i % p], inner[(i + 1) % p]
        b, b_next = outer[j % q], outer[(j + 1) % q]
        if i == p:
            advance_inner = False
        elif j == q:
            advance_inner = True
        else:
            d_inner = np.linalg.norm(inner_xy[(i + 1) % p] - outer_xy[j % q])
            d_outer = np.linalg.norm(outer_xy[(j + 1) % q] - inner_xy[i % p])
            advance_inner = d_inner <= d_outer
        if advance_inner:
            tris.append((int(a), int(b), int(a_next)))
            i += 1
        else:
            tris.append((int(a), int(b), int(b_next)))
            j += 1
    return tris


def build_disk_polar_mesh(domain: DomainSpec, target_h: float) -> Mesh:
    """
    Concentric-ring triangulation of a disk with a concentric circular interface.

    Rings are placed with radial spacing at most target_h, one exactly on the
    interface radius r0 and the last on Γ; the spacings inside and outside r0
    are kept close (see radial_layer_counts). Each ring holds a multiple of
    six vertices chosen so the arc spacing is close to the radial spacing, and
    neighbouring rings are stitched without hanging nodes.
    """
    if domain.kind is not DomainKind.UNIT_DISK or not isinstance(domain.interface, Circle):
        raise MeshError("polar mesh needs a disk domain with a circular interface")
    curve = domain.interface
    R = domain.radius
    r0 = curve.radius
    if curve.center.distance_to(domain.center) > domain.classification_tol:
        raise MeshError("interface circle must be concentric with the disk")
    if not 0.0 < r0 < R:
        raise MeshError(f"interface radius {r0} must lie in (0, {R})")
    if not 0.0 < target_h < R:
        raise MeshError(f"target_h must lie in (0, {R}), got {target_h}")

    m1, m2 = radial_layer_counts(r0, R - r0, target_h)
    d1 = r0 / m1
    d2 = (R - r0) / m2
    radii = [r0 * k / m1 for k in range(m1)] + [r0] + [r0 + d2 * k for k in range(1, m2)] + [R]
    spacing = [d1] * m1 + [0.5 * (d1 + d2)] + [d2] * m2

    cx, cy = domain.center.x, domain.center.y
    coords = [np.array([[cx, cy]])]
    markers = [np.array([int(VertexMarker.INTERIOR)])]
    rings = [np.array([0])]
    offset = 1
    for k in range(1, len(radii)):
        n = _ring_count(radii[k], spacing[k])
        theta = 2.0 * math.pi * np.arange(n) / n
        coords.append(np.column_stack([cx + radii[k] * np.cos(theta), cy + radii[k] * np.sin(theta)]))
        if k == m1:
            marker = VertexMarker.INTERFACE
        elif k == len(radii) - 1:
            marker = VertexMarker.BOUNDARY
        else:
            marker = VertexMarker.INTERIOR
        markers.append(np.full(n, int(marker)))
        rings.append(np.arange(offset, offset + n))
        offset += n

    vertices = np.concatenate(coords)
    triangles = []
    for k in range(1, len(rings)):
        triangles += _stitch_rings(rings[k - 1], vertices[rings[k - 1]], rings[k], vertices[rings[k]])

    mesh = Mesh.from_arrays(vertices, triangles, np.concatenate(markers))
    return classify_triangles(mesh, curve, domain.classification_tol)


def _grid_mesh(xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Tensor grid with each cell cut along its lower-left to upper-right diagonal."""
    nx, ny = len(xs), len(ys)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])
    idx = np.arange(nx * ny).reshape(ny, nx)
    v00 = idx[:-1, :-1].ravel()
    v10 = idx[:-1, 1:].ravel()
    v11 = idx[1:, 1:].ravel()
    v01 = idx[1:, :-1].ravel()
    triangles = np.concatenate([np.column_stack([v00, v10, v11]), np.column_stack([v00, v11, v01])])
    return vertices, triangles


def _split_interval(a: float, b: float, target_h: float) -> np.ndarray:
    m = max(1, math.ceil((b - a) / target_h - 1e-9))
    return np.linspace(a, b, m + 1)


def build_square_line_mesh(domain: DomainSpec, target_h: float) -> Mesh:
    """
    Grid triangulation of the unit square with an axis-aligned chord as a grid line.

    Columns (or rows) on either side of the chord are sized independently,
    so an off-grid chord position gives nonuniform but bounded widths.
    """
    if domain.kind is not DomainKind.UNIT_SQUARE or not isinstance(domain.interface, Polyline):
        raise MeshError("line mesh needs the unit square with a polyline interface")
    if not 0.0 < target_h <= 1.0:
        raise MeshError(f"target_h must lie in (0, 1], got {target_h}")
    curve = domain.interface
    if len(curve.vertices) != 2:
        raise MeshError("unsupported polyline: expected a single chord")
    a, b = curve.vertices
    tol = domain.classification_tol

    def spans(u: float, v: float) -> bool:
        lo, hi = sorted((u, v))
        return abs(lo) <= tol and abs(hi - 1.0) <= tol

    vertical = abs(a.x - b.x) <= tol and spans(a.y, b.y)
    horizontal = abs(a.y - b.y) <= tol and spans(a.x, b.x)
    if vertical and 0.0 < a.x < 1.0:
        c = a.x
        xs = np.concatenate([_split_interval(0.0, c, target_h), _split_interval(c, 1.0, target_h)[1:]])
        ys = _split_interval(0.0, 1.0, target_h)
    elif horizontal and 0.0 < a.y < 1.0:
        c = a.y
        xs = _split_interval(0.0, 1.0, target_h)
        ys = np.concatenate([_split_interval(0.0, c, target_h), _split_interval(c, 1.0, target_h)[1:]])
    else:
        raise MeshError("unsupported polyline: not an axis-aligned chord of the square")

    vertices, triangles = _grid_mesh(xs, ys)
    x, y = vertices[:, 0], vertices[:, 1]
    on_line = (x == c) if vertical else (y == c)
    markers = np.where(domain.on_boundary_array(x, y, tol), int(VertexMarker.BOUNDARY),
                       np.where(on_line, int(VertexMarker.INTERFACE), int(VertexMarker.INTERIOR)))
    mesh = Mesh.from_arrays(vertices, triangles, markers)
    return classify_triangles(mesh, curve, tol)


def build_unfitted_square_mesh(domain: DomainSpec, target_h: float) -> Mesh:
    """Uniform grid triangulation of the unit square that ignores the interface."""
    if domain.kind is not DomainKind.UNIT_SQUARE:
        raise MeshError("unfitted mesh needs the unit square")
    if not 0.0 < target_h <= 1.0:
        raise MeshError(f"target_h must lie in (0, 1], got {target_h}")
    tol = domain.classification_tol
    grid = _split_interval(0.0, 1.0, target_h)
    vertices, triangles = _grid_mesh(grid, grid)
    x, y = vertices[:, 0], vertices[:, 1]
    on_curve = np.abs(signed_distance_array(domain.interface, x, y)) <= tol
    markers = np.where(domain.on_boundary_array(x, y, tol), int(VertexMarker.BOUNDARY),
                       np.where(on_curve, int(VertexMarker.INTERFACE), int(VertexMarker.INTERIOR)))
    mesh = Mesh.from_arrays(vertices, triangles, markers)
    return classify_triangles(mesh, domain.interface, tol)


def build_mesh(domain: DomainSpec, target_h: float, fitted: bool = True) -> Mesh:
    """Pick the generator matching the domain and interface kind."""
    if not fitted:
        return build_unfitted_square_mesh(domain, target_h)
    if domain.kind is DomainKind.UNIT_DISK:
        return build_disk_polar_mesh(domain, target_h)
    return build_square_line_mesh(domain, target_h)

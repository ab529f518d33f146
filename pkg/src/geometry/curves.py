"""
Planar primitives and the interface curve S.

S splits the domain into region1 and region2. For a circle, region1 is the
open disk it bounds; for a polyline, region1 is the left side of the curve
taken in vertex order. Every predicate has a scalar form working on Point2
and a vectorised form working on coordinate arrays, which is what meshing,
quadrature and error evaluation call in their inner loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Union

import numpy as np


class GeometryError(ValueError):
    """Invalid geometric input (degenerate curve, ambiguous projection...)."""


@dataclass(frozen=True)
class Point2:
    """A point of the plane, in length units."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


class Region(IntEnum):
    """The two subdomains. Integer values are what mesh arrays store."""

    REGION1 = 1
    REGION2 = 2


class Side(str, Enum):
    """Result of classifying a point against the interface."""

    REGION1 = "region1"
    REGION2 = "region2"
    ON_INTERFACE = "on_interface"

    @property
    def region(self) -> Region:
        if self is Side.ON_INTERFACE:
            raise GeometryError("point on the interface belongs to no single region")
        return Region.REGION1 if self is Side.REGION1 else Region.REGION2


@dataclass(frozen=True)
class Circle:
    """Circular interface; region1 is its interior."""

    center: Point2
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise GeometryError(f"circle radius must be positive, got {self.radius}")

    @property
    def kind(self) -> str:
        return "circle"


@dataclass(frozen=True)
class Polyline:
    """Open polygonal interface; region1 lies to its left."""

    vertices: tuple[Point2, ...]

    def __post_init__(self):
        verts = tuple(self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 2:
            raise GeometryError("polyline needs at least two vertices")
        for a, b in zip(verts[:-1], verts[1:]):
            if a.distance_to(b) == 0.0:
                raise GeometryError(f"repeated consecutive polyline vertex ({a.x}, {a.y})")

    @property
    def kind(self) -> str:
        return "polyline"

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        """Start and end points of every segment, each of shape (nseg, 2)."""
        pts = np.array([[v.x, v.y] for v in self.vertices], dtype=float)
        return pts[:-1], pts[1:]


InterfaceCurve = Union[Circle, Polyline]


def _polyline_nearest(curve: Polyline, x: np.ndarray, y: np.ndarray):
    """Nearest curve point, distance and side sign (+1 left) for coordinate arrays."""
    a, b = curve.segments()
    d = b - a
    seg_len2 = np.einsum("ij,ij->i", d, d)
    px = x[:, None] - a[None, :, 0]
    py = y[:, None] - a[None, :, 1]
    t = np.clip((px * d[None, :, 0] + py * d[None, :, 1]) / seg_len2[None, :], 0.0, 1.0)
    qx = a[None, :, 0] + t * d[None, :, 0]
    qy = a[None, :, 1] + t * d[None, :, 1]
    dist = np.hypot(x[:, None] - qx, y[:, None] - qy)

    k = np.argmin(dist, axis=1)
    rows = np.arange(x.size)
    tk = t[rows, k]
    nearest_x = qx[rows, k]
    nearest_y = qy[rows, k]

    # left unit normals per segment; at a shared vertex use the bisector
    normals = np.stack([-d[:, 1], d[:, 0]], axis=1) / np.sqrt(seg_len2)[:, None]
    n = normals[k].copy()
    nseg = len(seg_len2)
    at_start = (tk <= 0.0) & (k > 0)
    at_end = (tk >= 1.0) & (k < nseg - 1)
    n[at_start] += normals[k[at_start] - 1]
    n[at_end] += normals[k[at_end] + 1]

    s = (x - nearest_x) * n[:, 0] + (y - nearest_y) * n[:, 1]
    sign = np.where(s > 0.0, 1.0, -1.0)
    return nearest_x, nearest_y, dist[rows, k], sign


def signed_distance_array(curve: InterfaceCurve, x, y) -> np.ndarray:
    """Signed distance to the curve: negative in region1, positive in region2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(x, y).shape
    x, y = np.broadcast_arrays(x, y)
    x = x.ravel()
    y = y.ravel()
    if isinstance(curve, Circle):
        out = np.hypot(x - curve.center.x, y - curve.center.y) - curve.radius
    else:
        _, _, dist, sign = _polyline_nearest(curve, x, y)
        out = -sign * dist
    return out.reshape(shape)


def signed_distance(curve: InterfaceCurve, p: Point2) -> float:
    return float(signed_distance_array(curve, np.array([p.x]), np.array([p.y]))[0])


def region_array(curve: InterfaceCurve, x, y, tol: float = 0.0) -> np.ndarray:
    """Integer side codes: 1 region1, 2 region2, 0 on the interface."""
    s = signed_distance_array(curve, x, y)
    return np.where(s < -tol, 1, np.where(s > tol, 2, 0)).astype(np.int8)


def side_of_interface(curve: InterfaceCurve, p: Point2, tol: float) -> Side:
    if tol < 0.0:
        raise GeometryError(f"tolerance must be non-negative, got {tol}")
    s = signed_distance(curve, p)
    if s < -tol:
        return Side.REGION1
    if s > tol:
        return Side.REGION2
    return Side.ON_INTERFACE


def project_to_interface(curve: InterfaceCurve, p: Point2) -> Point2:
    """Nearest point of the curve."""
    if isinstance(curve, Circle):
        dx = p.x - curve.center.x
        dy = p.y - curve.center.y
        r = math.hypot(dx, dy)
        if r == 0.0:
            raise GeometryError("ambiguous projection: point is the circle center")
        return Point2(curve.center.x + curve.radius * dx / r, curve.center.y + curve.radius * dy / r)
    qx, qy, _, _ = _polyline_nearest(curve, np.array([p.x]), np.array([p.y]))
    return Point2(float(qx[0]), float(qy[0]))


def curve_length(curve: InterfaceCurve) -> float:
    if isinstance(curve, Circle):
        return 2.0 * math.pi * curve.radius
    a, b = curve.segments()
    return float(np.sum(np.hypot(*(b - a).T)))


def interface_sample_points(curve: InterfaceCurve, spacing: float) -> list[Point2]:
    """
    Points along the curve with arc-length gaps no larger than ``spacing``.

    Polyline vertices are always part of the output, so corners of S end up
    as mesh vertices.
    """
    if not spacing > 0.0:
        raise GeometryError(f"sample spacing must be positive, got {spacing}")

    if isinstance(curve, Circle):
        n = max(3, math.ceil(curve_length(curve) / spacing - 1e-9))
        theta = 2.0 * math.pi * np.arange(n) / n
        return [
            Point2(curve.center.x + curve.radius * math.cos(t), curve.center.y + curve.radius * math.sin(t))
            for t in theta
        ]

    points: list[Point2] = []
    for a, b in zip(curve.vertices[:-1], curve.vertices[1:]):
        m = max(1, math.ceil(a.distance_to(b) / spacing - 1e-9))
        points.append(a)
        for j in range(1, m):
            t = j / m
            points.append(Point2(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
    points.append(curve.vertices[-1])
    return points

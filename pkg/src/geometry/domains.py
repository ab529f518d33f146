"""
The two supported computational domains Ω and their boundary Γ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from src.geometry.curves import Circle, GeometryError, InterfaceCurve, Point2, Polyline


class DomainKind(str, Enum):
    UNIT_DISK = "unit_disk"
    UNIT_SQUARE = "unit_square"


@dataclass(frozen=True)
class DomainSpec:
    """
    A convex domain with an interface curve inside it.

    unit_disk is the disk of the given center and radius; unit_square is
    [0, 1] x [0, 1]. Circles must lie strictly inside the domain, polylines
    may end on Γ.
    """

    kind: DomainKind
    interface: InterfaceCurve
    center: Point2 = field(default_factory=lambda: Point2(0.0, 0.0))
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DomainKind(self.kind))
        if self.kind is DomainKind.UNIT_DISK and not self.radius > 0.0:
            raise GeometryError(f"disk radius must be positive, got {self.radius}")

        tol = self.classification_tol
        if isinstance(self.interface, Circle):
            c = self.interface
            if self.kind is DomainKind.UNIT_DISK:
                inside = c.center.distance_to(self.center) + c.radius < self.radius - tol
            else:
                inside = min(c.center.x - c.radius, c.center.y - c.radius) > tol and \
                    max(c.center.x + c.radius, c.center.y + c.radius) < 1.0 - tol
            if not inside:
                raise GeometryError("circular interface must lie strictly inside the domain")
        else:
            for v in self.interface.vertices:
                if not self.contains(v, tol):
                    raise GeometryError(f"polyline vertex ({v.x}, {v.y}) lies outside the domain")

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius if self.kind is DomainKind.UNIT_DISK else math.sqrt(2.0)

    @property
    def area(self) -> float:
        return math.pi * self.radius**2 if self.kind is DomainKind.UNIT_DISK else 1.0

    @property
    def classification_tol(self) -> float:
        """Absolute tolerance band used when meshing classifies points."""
        return 1e-10 * self.diameter

    def contains(self, p: Point2, tol: float = 0.0) -> bool:
        if self.kind is DomainKind.UNIT_DISK:
            return p.distance_to(self.center) <= self.radius + tol
        return -tol <= p.x <= 1.0 + tol and -tol <= p.y <= 1.0 + tol

    def on_boundary_array(self, x, y, tol: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind is DomainKind.UNIT_DISK:
            return np.abs(np.hypot(x - self.center.x, y - self.center.y) - self.radius) <= tol
        return np.minimum(np.minimum(x, 1.0 - x), np.minimum(y, 1.0 - y)) <= tol


def unit_disk(interface: InterfaceCurve, center: Point2 = Point2(0.0, 0.0), radius: float = 1.0) -> DomainSpec:
    return DomainSpec(DomainKind.UNIT_DISK, interface, center, radius)


def unit_square(interface: InterfaceCurve) -> DomainSpec:
    return DomainSpec(DomainKind.UNIT_SQUARE, interface)


def vertical_chord(x0: float) -> Polyline:
    """The interface x = x0 of the unit square, oriented upward (region1 is x < x0)."""
    if not 0.0 < x0 < 1.0:
        raise GeometryError(f"chord position must lie in (0, 1), got {x0}")
    return Polyline((Point2(x0, 0.0), Point2(x0, 1.0)))

"""
Quadrature rules on triangles.

Points are barycentric triples and weights are relative to the triangle
area (they sum to one), so a rule gives the average of the integrand and
the integral is area times the weighted sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QuadratureRule:
    name: str
    points: np.ndarray
    weights: np.ndarray
    degree: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 3)
        w = np.asarray(self.weights, dtype=float).ravel()
        if len(pts) != len(w):
            raise ValueError(f"{self.name}: {len(pts)} points but {len(w)} weights")
        if abs(w.sum() - 1.0) > 1e-14:
            raise ValueError(f"{self.name}: weights sum to {w.sum()!r}, expected 1")
        if np.any(pts < 0.0) or np.any(pts > 1.0) or np.any(np.abs(pts.sum(axis=1) - 1.0) > 1e-14):
            raise ValueError(f"{self.name}: barycentric coordinates out of range")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def physical_points(self, tri_xy: np.ndarray) -> np.ndarray:
        """Quadrature points of every triangle: (m, 3, 2) -> (m, k, 2)."""
        return np.einsum("kj,mjd->mkd", self.points, tri_xy)


# degree 2; the three edge midpoints
EDGE_MIDPOINT = QuadratureRule(
    name="edge-midpoint",
    points=[[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]],
    weights=[1.0 / 3.0] * 3,
    degree=2,
)

_A = 0.44594849091596489
_B = 0.09157621350977073
_WA = 0.22338158967801147
_WB = 0.10995174365532187

# degree 4, six interior points (Dunavant)
DUNAVANT_6 = QuadratureRule(
    name="dunavant-6",
    points=[
        [1.0 - 2.0 * _A, _A, _A], [_A, 1.0 - 2.0 * _A, _A], [_A, _A, 1.0 - 2.0 * _A],
        [1.0 - 2.0 * _B, _B, _B], [_B, 1.0 - 2.0 * _B, _B], [_B, _B, 1.0 - 2.0 * _B],
    ],
    weights=[_WA, _WA, _WA, _WB, _WB, _WB],
    degree=4,
)

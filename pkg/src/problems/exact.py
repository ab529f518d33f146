"""
Closed-form solutions with one branch per region.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from src.geometry.curves import InterfaceCurve, signed_distance_array

ScalarField = Callable[[np.ndarray, np.ndarray], np.ndarray]
VectorField = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class ExactSolution:
    """
    u restricted to region1 and region2 with their gradients.

    Fields take coordinate arrays and broadcast. The branch used at a point
    is picked against the true interface; points on S use region1, which is
    harmless because the branches agree there.
    """

    value1: ScalarField
    value2: ScalarField
    grad1: VectorField
    grad2: VectorField
    interface: InterfaceCurve
    seminorm_h2: Optional[float] = None

    def in_region1(self, x, y) -> np.ndarray:
        return signed_distance_array(self.interface, x, y) <= 0.0

    def value(self, x, y) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return np.where(self.in_region1(x, y), self.value1(x, y), self.value2(x, y))

    def gradient(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        first = self.in_region1(x, y)
        g1x, g1y = self.grad1(x, y)
        g2x, g2y = self.grad2(x, y)
        return np.where(first, g1x, g2x), np.where(first, g1y, g2y)

    def scaled(self, c: float) -> "ExactSolution":
        return ExactSolution(
            value1=lambda x, y: c * self.value1(x, y),
            value2=lambda x, y: c * self.value2(x, y),
            grad1=lambda x, y: tuple(c * g for g in self.grad1(x, y)),
            grad2=lambda x, y: tuple(c * g for g in self.grad2(x, y)),
            interface=self.interface,
            seminorm_h2=None if self.seminorm_h2 is None else abs(c) * self.seminorm_h2,
        )

"""
Manufactured interface problems with closed-form solutions.

Each problem is -div(B grad u) = f with B piecewise constant, u continuous
across S and the flux B du/dn continuous across S. σ is zero throughout.
"""

from __future__ import annotations

import math

import numpy as np

from src.fem.assembly import ProblemSpec, zero_data
from src.fem.elements import CoefficientField
from src.geometry.curves import Circle, Point2
from src.geometry.domains import unit_disk, unit_square, vertical_chord
from src.problems.exact import ExactSolution


class ProblemError(ValueError):
    """Invalid problem parameters."""


def _check_coefficients(B1: float, B2: float) -> None:
    for name, value in (("B1", B1), ("B2", B2)):
        if not (math.isfinite(value) and value > 0.0):
            raise ProblemError(f"{name} must be positive, got {value}")


def _radial_solution(B1: float, B2: float, r0: float, center: Point2, scale: float) -> ExactSolution:
    """u1 = a - ρ²/B1 inside, u2 = (1 - ρ²)/B2 outside, with ρ = scale·|p - center|."""
    a = r0**2 / B1 + (1.0 - r0**2) / B2
    cx, cy = center.x, center.y
    k = 2.0 * scale**2

    def rho2(x, y):
        return scale**2 * ((x - cx) ** 2 + (y - cy) ** 2)

    return ExactSolution(
        value1=lambda x, y: a - rho2(x, y) / B1,
        value2=lambda x, y: (1.0 - rho2(x, y)) / B2,
        grad1=lambda x, y: (-k * (x - cx) / B1, -k * (y - cy) / B1),
        grad2=lambda x, y: (-k * (x - cx) / B2, -k * (y - cy) / B2),
        interface=Circle(center, r0 / scale),
    )


def radial_problem(B1: float, B2: float, r0: float) -> ProblemSpec:
    """
    Unit disk with a centred circular interface of radius r0, f = 4, u = 0 on Γ.

    u(0, 0) = r0²/B1 + (1 - r0²)/B2 and both branches give (1 - r0²)/B2 on S.
    """
    _check_coefficients(B1, B2)
    if not 0.0 < r0 < 1.0:
        raise ProblemError(f"r0 must lie in (0, 1), got {r0}")
    exact = _radial_solution(B1, B2, r0, Point2(0.0, 0.0), 1.0)
    return ProblemSpec(
        name=f"radial(B1={B1:g}, B2={B2:g}, r0={r0:g})",
        domain=unit_disk(exact.interface),
        coeffs=CoefficientField.constants(B1, B2, sigma=0.0, f=4.0),
        dirichlet=zero_data,
        exact=exact,
    )


def radial_unfitted_problem(B1: float, B2: float, r0: float) -> ProblemSpec:
    """
    The radial solution mapped onto the unit square.

    With ρ = 2|p - (½, ½)| the disk of radius 1 becomes the inscribed disk of
    the square, the interface has radius r0/2 and f becomes 16. Outside the
    inscribed disk u keeps the region2 formula, so Γ carries nonzero data.
    """
    _check_coefficients(B1, B2)
    if not 0.0 < r0 < 1.0:
        raise ProblemError(f"r0 must lie in (0, 1), got {r0}")
    exact = _radial_solution(B1, B2, r0, Point2(0.5, 0.5), 2.0)
    return ProblemSpec(
        name=f"radial_unfitted(B1={B1:g}, B2={B2:g}, r0={r0:g})",
        domain=unit_square(exact.interface),
        coeffs=CoefficientField.constants(B1, B2, sigma=0.0, f=16.0),
        dirichlet=exact.value,
        exact=exact,
    )


def line_flux_constant(B1: float, B2: float, x0: float) -> float:
    """C in B u' = C - x, fixed by u(0) = u(1) = 0 and continuity of u at x0."""
    return (x0**2 / B1 + (1.0 - x0**2) / B2) / (2.0 * (x0 / B1 + (1.0 - x0) / B2))


def line_problem(B1: float, B2: float, x0: float) -> ProblemSpec:
    """
    Unit square split by x = x0; u solves -(B u')' = 1 on (0, 1) with zero ends.

    u is piecewise quadratic in x, so Γ carries nonzero data on the top and
    bottom edges.
    """
    _check_coefficients(B1, B2)
    if not 0.0 < x0 < 1.0:
        raise ProblemError(f"x0 must lie in (0, 1), got {x0}")
    C = line_flux_constant(B1, B2, x0)

    exact = ExactSolution(
        value1=lambda x, y: (C * x - 0.5 * x**2) / B1 + 0.0 * y,
        value2=lambda x, y: -(C * (1.0 - x) - 0.5 * (1.0 - x**2)) / B2 + 0.0 * y,
        grad1=lambda x, y: ((C - x) / B1, np.zeros_like(y * x)),
        grad2=lambda x, y: ((C - x) / B2, np.zeros_like(y * x)),
        interface=vertical_chord(x0),
    )
    return ProblemSpec(
        name=f"line(B1={B1:g}, B2={B2:g}, x0={x0:g})",
        domain=unit_square(exact.interface),
        coeffs=CoefficientField.constants(B1, B2, sigma=0.0, f=1.0),
        dirichlet=exact.value,
        exact=exact,
    )


def smooth_problem() -> ProblemSpec:
    """u = 1 - r² on the unit disk with B = 1; the r = ½ interface is geometric only."""
    exact = _radial_solution(1.0, 1.0, 0.5, Point2(0.0, 0.0), 1.0)
    return ProblemSpec(
        name="smooth",
        domain=unit_disk(exact.interface),
        coeffs=CoefficientField.constants(1.0, 1.0, sigma=0.0, f=4.0),
        dirichlet=zero_data,
        exact=exact,
    )


PRESETS = {
    "radial": (radial_problem, {"B1": 1.0, "B2": 100.0, "r0": 0.5}),
    "radial_severe": (radial_problem, {"B1": 1.0, "B2": 1e4, "r0": 0.5}),
    "line": (line_problem, {"B1": 1.0, "B2": 100.0, "x0": 0.5}),
    "smooth": (smooth_problem, {}),
    "radial_unfitted": (radial_unfitted_problem, {"B1": 1.0, "B2": 100.0, "r0": 0.5}),
}

# problems whose meshes ignore the interface
UNFITTED = {"radial_unfitted"}


def problem_from_name(name: str, **params) -> ProblemSpec:
    """Build a preset problem; params override the preset's constants."""
    try:
        factory, defaults = PRESETS[name]
    except KeyError:
        raise ProblemError(f"unknown problem {name!r}; choose from {', '.join(sorted(PRESETS))}") from None
    unknown = set(params) - set(defaults)
    if unknown:
        raise ProblemError(f"problem {name!r} takes no parameter(s) {', '.join(sorted(unknown))}")
    return factory(**{**defaults, **params})

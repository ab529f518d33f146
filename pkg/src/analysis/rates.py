"""
Convergence-rate fitting and the ε trade-off of the irregular-element bound.

Errors are compared against two models: a pure power law C h^p and the
log-corrected C h^p |ln h|^{1/2}. The irregular-element interpolation bound
behaves like h^{1-ε}/√ε for any 0 < ε <= ¼; it is smallest at
ε = 1/(2|ln h|), which turns it into h|ln h|^{1/2} up to a constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.analysis.norms import AnalysisError

EPSILON_UPPER = 0.25


@dataclass(frozen=True)
class RateFit:
    slope: float
    slope_with_log: float
    residual_pure: float
    residual_log: float


def _validate_pairs(pairs: Sequence[tuple[float, float]]) -> tuple[np.ndarray, np.ndarray]:
    if len(pairs) < 3:
        raise AnalysisError(f"need at least 3 (h, error) pairs, got {len(pairs)}")
    h = np.array([p[0] for p in pairs], dtype=float)
    e = np.array([p[1] for p in pairs], dtype=float)
    if np.any(np.diff(h) >= 0.0):
        raise AnalysisError("h values must be strictly decreasing")
    if np.any(h <= 0.0) or np.any(h >= 1.0):
        raise AnalysisError("h values must lie in (0, 1)")
    if np.any(~(e > 0.0)):
        raise AnalysisError("errors must be positive")
    return h, e


def _least_squares(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    return float(slope), float(math.sqrt(np.mean(residual**2)))


def fit_rate(pairs: Sequence[tuple[float, float]]) -> RateFit:
    """Least-squares slopes of ln(error) and ln(error/|ln h|^{1/2}) against ln h."""
    h, e = _validate_pairs(pairs)
    log_h = np.log(h)
    slope, residual_pure = _least_squares(log_h, np.log(e))
    slope_log, residual_log = _least_squares(log_h, np.log(e) - 0.5 * np.log(np.abs(log_h)))
    return RateFit(slope=slope, slope_with_log=slope_log, residual_pure=residual_pure, residual_log=residual_log)


def pairwise_rates(pairs: Sequence[tuple[float, float]]) -> list[Optional[float]]:
    """Observed order between consecutive rows; None for the first row or a zero error."""
    out: list[Optional[float]] = [None]
    for (h0, e0), (h1, e1) in zip(pairs[:-1], pairs[1:]):
        if e0 > 0.0 and e1 > 0.0 and h0 != h1:
            out.append(math.log(e0 / e1) / math.log(h0 / h1))
        else:
            out.append(None)
    return out


def _check_h(h: float) -> None:
    if not 0.0 < h < 1.0:
        raise AnalysisError(f"h must lie in (0, 1), got {h}")


def epsilon_star(h: float) -> float:
    """Minimiser 1/(2|ln h|) of h^{1-ε}/√ε."""
    _check_h(h)
    return 1.0 / (2.0 * abs(math.log(h)))


def interpolation_bound(h: float, eps) -> np.ndarray:
    """φ(ε) = h^{1-ε}/√ε, the shape of the irregular-element interpolation bound."""
    _check_h(h)
    eps = np.asarray(eps, dtype=float)
    if np.any(eps <= 0.0):
        raise AnalysisError("ε must be positive")
    return h ** (1.0 - eps) / np.sqrt(eps)


def epsilon_grid_search(h: float, step: float = 1e-3, upper: float = EPSILON_UPPER) -> tuple[float, float]:
    """Brute-force minimiser of φ over the grid step, 2·step, ..., upper."""
    if not 0.0 < step <= upper:
        raise AnalysisError(f"grid step must lie in (0, {upper}], got {step}")
    grid = step * np.arange(1, int(round(upper / step)) + 1)
    phi = interpolation_bound(h, grid)
    k = int(np.argmin(phi))
    return float(grid[k]), float(phi[k])

"""
Preconditioned conjugate gradients for the reduced SPD system.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from opentelemetry import trace

from src.fem.assembly import LinearSystem

tracer = trace.get_tracer(__name__)


class Preconditioner(str, Enum):
    NONE = "none"
    JACOBI = "jacobi"


@dataclass(frozen=True)
class SolveConfig:
    rel_tol: float = 1e-10
    max_iters: Optional[int] = None  # None means 10 * n
    preconditioner: Preconditioner = Preconditioner.JACOBI

    def __post_init__(self):
        object.__setattr__(self, "preconditioner", Preconditioner(self.preconditioner))
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")

    def iteration_limit(self, n: int) -> int:
        return self.max_iters if self.max_iters is not None else max(1, 10 * n)


@dataclass(frozen=True)
class SolveStats:
    iterations: int
    final_relative_residual: float
    breakdown: bool = False


class CGDidNotConverge(RuntimeError):
    """Iteration limit reached; carries the best iterate."""

    def __init__(self, x: np.ndarray, relative_residual: float, iterations: int):
        super().__init__(
            f"CG did not converge in {iterations} iterations (relative residual {relative_residual:.3e})"
        )
        self.x = x
        self.relative_residual = relative_residual
        self.iterations = iterations


def cg_solve(system: LinearSystem, config: SolveConfig = SolveConfig()) -> tuple[np.ndarray, SolveStats]:
    """
    Solve A x = b from x0 = 0.

    Stops once ‖b − A x‖₂ <= rel_tol·‖b‖₂, checked on the true residual.
    A non-positive curvature p·Ap is reported as breakdown instead of
    raising, since it means the input was not SPD.
    """
    A = system.matrix
    b = np.asarray(system.rhs, dtype=float)
    n = len(b)

    with tracer.start_as_current_span("cg_solve") as span:
        span.set_attribute("cg.n", n)
        span.set_attribute("cg.preconditioner", config.preconditioner.value)

        x = np.zeros(n)
        b_norm = float(np.linalg.norm(b))
        if n == 0 or b_norm == 0.0:
            return x, SolveStats(iterations=0, final_relative_residual=0.0)

        if config.preconditioner is Preconditioner.JACOBI:
            diag = A.diagonal()
            if np.any(diag <= 0.0):
                span.set_attribute("cg.breakdown", True)
                return x, SolveStats(iterations=0, final_relative_residual=1.0, breakdown=True)
            inv_diag = 1.0 / diag
        else:
            inv_diag = np.ones(n)

        limit = config.iteration_limit(n)
        r = b.copy()
        z = inv_diag * r
        p = z.copy()
        rz = float(r @ z)
        res = 1.0
        # the residual is not monotone; best_x holds the smallest-residual iterate
        best_x, best_res = x.copy(), 1.0

        for k in range(1, limit + 1):
            Ap = A @ p
            curvature = float(p @ Ap)
            if curvature <= 0.0:
                span.set_attribute("cg.breakdown", True)
                return x, SolveStats(iterations=k - 1, final_relative_residual=res, breakdown=True)

            alpha = rz / curvature
            x += alpha * p
            r -= alpha * Ap
            res = float(np.linalg.norm(r)) / b_norm

            if res <= config.rel_tol:
                # recurrence drifts from b - A x; confirm on the true residual
                r = b - A @ x
                res = float(np.linalg.norm(r)) / b_norm
                if res <= config.rel_tol:
                    span.set_attribute("cg.iterations", k)
                    span.set_attribute("cg.relative_residual", res)
                    return x, SolveStats(iterations=k, final_relative_residual=res)
                z = inv_diag * r
                p = z.copy()
                rz = float(r @ z)
                if res < best_res:
                    best_x, best_res = x.copy(), res
                continue

            if res < best_res:
                best_x, best_res = x.copy(), res
            z = inv_diag * r
            rz_new = float(r @ z)
            p = z + (rz_new / rz) * p
            rz = rz_new

        best_res = float(np.linalg.norm(b - A @ best_x)) / b_norm
        span.set_attribute("cg.iterations", limit)
        span.set_attribute("cg.relative_residual", best_res)
        err = CGDidNotConverge(best_x, best_res, limit)
        span.record_exception(err)
        raise err


def dense_solve(system: LinearSystem) -> np.ndarray:
    """Direct elimination on the densified matrix; a reference for small systems."""
    if system.size == 0:
        return np.zeros(0)
    return np.linalg.solve(system.matrix.toarray(), system.rhs)

"""
Per-refinement records of a convergence study and their fitted rates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from src.analysis.norms import AnalysisError, ErrorReport
from src.analysis.rates import RateFit, fit_rate, pairwise_rates
from src.meshgen.mesh import MeshQualityReport
from src.solver.cg import SolveStats

# column name -> (which report, which field)
ERROR_COLUMNS = {
    "l2_uh": ("uh", "l2"),
    "h1_uh": ("uh", "h1"),
    "h1_uh_regular": ("uh", "h1_regular"),
    "h1_uh_irregular": ("uh", "h1_irregular"),
    "l2_uI": ("uI", "l2"),
    "h1_uI": ("uI", "h1"),
    "h1_uI_regular": ("uI", "h1_regular"),
}

CSV_HEADER = (
    "h", "dofs", "l2_uh", "h1_uh", "h1_uh_regular", "h1_uh_irregular", "l2_uI", "h1_uI", "cea_ratio", "cg_iters",
)


@dataclass(frozen=True)
class StudyRow:
    target_h: float
    err_uh: ErrorReport
    err_uI: ErrorReport
    cea_ratio: float
    stats: SolveStats
    quality: Optional[MeshQualityReport] = None

    @property
    def h(self) -> float:
        return self.err_uh.h

    def value(self, column: str) -> float:
        which, name = ERROR_COLUMNS[column]
        report = self.err_uh if which == "uh" else self.err_uI
        return getattr(report, name)


@dataclass(frozen=True)
class ConvergenceTable:
    problem: str
    rows: list[StudyRow]
    fits: dict[str, Optional[RateFit]] = field(default_factory=dict)

    def __post_init__(self):
        hs = [row.h for row in self.rows]
        if any(b >= a for a, b in zip(hs[:-1], hs[1:])):
            raise AnalysisError(f"rows must have strictly decreasing h, got {hs}")

    @classmethod
    def from_rows(cls, problem: str, rows: list[StudyRow]) -> "ConvergenceTable":
        """Build the table and fit every error column that has enough positive data."""
        fits: dict[str, Optional[RateFit]] = {}
        for column in ERROR_COLUMNS:
            pairs = [(row.h, row.value(column)) for row in rows]
            usable = len(pairs) >= 3 and all(e > 0.0 for _, e in pairs) and all(h < 1.0 for h, _ in pairs)
            fits[column] = fit_rate(pairs) if usable else None
        return cls(problem=problem, rows=list(rows), fits=fits)

    def column(self, name: str) -> list[float]:
        return [row.value(name) for row in self.rows]

    def pairwise(self, name: str) -> list[Optional[float]]:
        return pairwise_rates([(row.h, row.value(name)) for row in self.rows])

    def to_csv_rows(self) -> list[list[str]]:
        """Header plus one formatted row per level, 12 significant digits."""
        out = [list(CSV_HEADER)]
        for row in self.rows:
            values = [
                row.h,
                row.err_uh.dof_count,
                row.err_uh.l2,
                row.err_uh.h1,
                row.err_uh.h1_regular,
                row.err_uh.h1_irregular,
                row.err_uI.l2,
                row.err_uI.h1,
                row.cea_ratio,
                row.stats.iterations,
            ]
            out.append([str(v) if isinstance(v, int) else f"{v:.12g}" for v in values])
        return out

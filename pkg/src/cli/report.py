"""
CSV and Markdown writers for a finished convergence table.

Both outputs are deterministic: no timestamps, fixed column order, fixed
number formats.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional

from src.analysis.rates import epsilon_star
from src.analysis.table import ERROR_COLUMNS, ConvergenceTable


def write_csv(table: ConvergenceTable, path: Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows(table.to_csv_rows())
    return path


def _rate(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.3f}"


def render_markdown(table: ConvergenceTable) -> str:
    lines = [f"# Convergence study: {table.problem}", ""]

    lines += [
        "| h | dofs | triangles | irregular | min r/h | ‖u−u_h‖₁ | rate | ‖u−u_I‖₁ | rate | cea | cg iters |",
        "|---|---|---|---|---|---|---|---|---|---|---|",
    ]
    uh_rates = table.pairwise("h1_uh")
    uI_rates = table.pairwise("h1_uI")
    for row, r_uh, r_uI in zip(table.rows, uh_rates, uI_rates):
        q = row.quality
        lines.append(
            f"| {row.h:.6g} | {row.err_uh.dof_count} "
            f"| {q.n_triangles if q else '-'} | {row.err_uh.n_irregular} "
            f"| {f'{q.min_inradius_ratio:.3f}' if q else '-'} "
            f"| {row.err_uh.h1:.4e} | {_rate(r_uh)} "
            f"| {row.err_uI.h1:.4e} | {_rate(r_uI)} "
            f"| {row.cea_ratio:.4f} | {row.stats.iterations} |"
        )

    lines += [
        "",
        "## Error by region",
        "",
        "| h | ‖u−u_h‖₁ region1 | ‖u−u_h‖₁ region2 | ‖u−u_I‖₁ region1 | ‖u−u_I‖₁ region2 |",
        "|---|---|---|---|---|",
    ]
    for row in table.rows:
        lines.append(
            f"| {row.h:.6g} | {row.err_uh.h1_region1:.4e} | {row.err_uh.h1_region2:.4e} "
            f"| {row.err_uI.h1_region1:.4e} | {row.err_uI.h1_region2:.4e} |"
        )

    lines += ["", "## Fitted slopes", "", "| column | slope | residual | slope (log-corrected) | residual |", "|---|---|---|---|---|"]
    for column in ERROR_COLUMNS:
        fit = table.fits.get(column)
        if fit is None:
            lines.append(f"| {column} | - | - | - | - |")
        else:
            lines.append(
                f"| {column} | {fit.slope:.4f} | {fit.residual_pure:.2e} "
                f"| {fit.slope_with_log:.4f} | {fit.residual_log:.2e} |"
            )

    if table.rows and 0.0 < table.rows[-1].h < 1.0:
        h = table.rows[-1].h
        lines += ["", f"Optimal ε at the finest level (h={h:.6g}): {epsilon_star(h):.6f}"]

    slivers = [row.quality.max_sliver_width for row in table.rows if row.quality and row.quality.max_sliver_width is not None]
    if slivers:
        lines.append(f"Largest interface sliver width: {max(slivers):.3e}")
    return "\n".join(lines) + "\n"


def write_markdown(table: ConvergenceTable, path: Path) -> Path:
    path = Path(path)
    path.write_text(render_markdown(table), encoding="utf-8", newline="\n")
    return path

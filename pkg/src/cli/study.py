"""
Convergence-study driver: one mesh, solve and error audit per target h.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Optional

from opentelemetry import trace

from src.analysis.norms import AnalysisError, cea_ratio, error_norms
from src.analysis.table import ConvergenceTable, StudyRow
from src.cli.config import StudyConfig
from src.cli.report import write_csv, write_markdown
from src.fem.assembly import ProblemSpec, apply_dirichlet, assemble
from src.fem.elements import AssemblyError
from src.fem.interpolation import nodal_interpolant
from src.geometry.curves import GeometryError
from src.meshgen.builders import build_mesh
from src.meshgen.mesh import MeshError, quality_report
from src.meshgen.triangle_io import write_triangle_mesh
from src.solver.cg import CGDidNotConverge, SolveConfig, cg_solve

tracer = trace.get_tracer(__name__)

Progress = Callable[[str], None]


class StudyLevelError(RuntimeError):
    """A refinement level failed; names the level and wraps the cause."""

    def __init__(self, target_h: float, cause: Exception):
        super().__init__(f"level h={target_h:g} failed: {cause}")
        self.target_h = target_h
        self.cause = cause


def run_level(
    problem: ProblemSpec,
    target_h: float,
    solver: SolveConfig = SolveConfig(),
    fitted: bool = True,
    mesh_stem: Optional[Path] = None,
) -> StudyRow:
    """Mesh, assemble, solve and measure a single refinement level."""
    with tracer.start_as_current_span("level") as span:
        span.set_attribute("level.target_h", target_h)
        try:
            mesh = build_mesh(problem.domain, target_h, fitted=fitted)
            quality = quality_report(mesh, problem.curve)
            span.set_attribute("level.h", mesh.h)
            span.set_attribute("level.irregular", quality.n_irregular)
            if mesh_stem is not None:
                write_triangle_mesh(mesh, mesh_stem)

            reduced = apply_dirichlet(assemble(mesh, problem), mesh, problem.dirichlet)
            x, stats = cg_solve(reduced, solver)
            if stats.breakdown:
                raise AssemblyError("CG breakdown: reduced matrix is not SPD")
            uh = reduced.expand(x)

            if problem.exact is None:
                raise AnalysisError(f"problem {problem.name!r} has no exact solution to measure against")
            u_interp = nodal_interpolant(mesh, problem.exact)
            err_uh = error_norms(mesh, uh, problem.exact)
            err_uI = error_norms(mesh, u_interp, problem.exact)
            ratio = cea_ratio(err_uh, err_uI)
        except (MeshError, AssemblyError, AnalysisError, GeometryError, CGDidNotConverge) as e:
            span.record_exception(e)
            raise StudyLevelError(target_h, e) from e

        span.set_attribute("level.dofs", err_uh.dof_count)
        span.set_attribute("level.cg_iters", stats.iterations)
        span.set_attribute("level.h1_uh", err_uh.h1)
        return StudyRow(
            target_h=target_h,
            err_uh=err_uh,
            err_uI=err_uI,
            cea_ratio=ratio,
            stats=stats,
            quality=quality,
        )


def run_study(config: StudyConfig, progress: Optional[Progress] = None) -> ConvergenceTable:
    """
    Run every level of the study in order and write the result files.

    Levels run sequentially; the first failing level aborts the study.
    Outputs land in ``config.output_dir`` as ``convergence.csv`` and
    ``convergence.md`` (plus ``meshes/`` when mesh emission is on).
    """
    echo = progress or (lambda _msg: None)
    problem = config.problem.build()
    out = config.output_dir

    with tracer.start_as_current_span("study") as span:
        span.set_attribute("study.problem", config.problem.kind)
        span.set_attribute("study.levels", len(config.h_values))

        rows = []
        for i, target_h in enumerate(config.h_values):
            stem = out / "meshes" / f"level_{i}" if config.emit_mesh else None
            row = run_level(problem, target_h, config.solver, config.problem.fitted, stem)
            if rows and row.h >= rows[-1].h:
                # distinct targets can round to the same ring or grid counts
                e = MeshError(f"realised h {row.h:.6g} does not decrease from the previous level ({rows[-1].h:.6g})")
                span.record_exception(e)
                raise StudyLevelError(target_h, e)
            echo(
                f"  [study] h={row.h:.4g} dofs={row.err_uh.dof_count} "
                f"cg_iters={row.stats.iterations} h1_uh={row.err_uh.h1:.3e} cea={row.cea_ratio:.3f}"
            )
            rows.append(row)

        table = ConvergenceTable.from_rows(config.problem.kind, rows)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(table, out / "convergence.csv")
        write_markdown(table, out / "convergence.md")

        fit = table.fits.get("h1_uh")
        if fit is not None:
            span.set_attribute("study.h1_uh_slope", fit.slope)
            span.set_attribute("study.h1_uh_slope_with_log", fit.slope_with_log)
        return table

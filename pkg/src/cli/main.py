"""
CLI for P1 finite-element convergence studies on elliptic interface problems.

Traces are sent to Arize Cloud when credentials are configured.

Usage:
    python -m src.cli.main study --config configs/radial.json
    python -m src.cli.main study --problem smooth --h 1/4,1/8,1/16,1/32 --out results/smooth
    python -m src.cli.main mesh --problem radial --h 0.125 --out results/meshes
"""

import os
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from dotenv import load_dotenv
load_dotenv(override=True)

import typer

from src.analysis.norms import AnalysisError
from src.cli.config import ConfigError, ProblemConfig, load_study_config, parse_h_list
from src.cli.study import StudyLevelError, run_study
from src.meshgen.builders import build_mesh
from src.meshgen.mesh import MeshError, quality_report
from src.meshgen.triangle_io import write_triangle_mesh
from src.tracing.setup import setup_tracing, trace_id_of

app = typer.Typer(
    name="interface-fem",
    help="Convergence studies for P1 finite elements on interface problems",
    add_completion=False,
)


def print_header(title: str):
    """Print the CLI header."""
    typer.echo("\n" + "=" * 60)
    typer.echo(f"  {title}")
    typer.echo("=" * 60 + "\n")


def print_footer(trace_id: str = None):
    """Print the CLI footer with trace info."""
    typer.echo("\n" + "-" * 60)
    if trace_id:
        typer.echo(f"Trace ID: {trace_id}")
    typer.echo("-" * 60 + "\n")


def fail(message: str):
    typer.echo(f"Error: {message}", err=True)
    raise typer.Exit(1)


@app.command()
def study(
    config: Path = typer.Option(
        None,
        "--config", "-c",
        help="JSON study definition",
    ),
    h: str = typer.Option(
        None,
        "--h",
        help="Comma-separated target mesh sizes, e.g. 1/4,1/8,1/16",
    ),
    problem: str = typer.Option(
        None,
        "--problem", "-p",
        help="Problem preset (radial, radial_severe, line, smooth, radial_unfitted)",
    ),
    out: Path = typer.Option(
        None,
        "--out", "-o",
        help="Output directory for convergence.csv / convergence.md",
    ),
):
    """
    Run a convergence study: mesh, solve and measure errors at every h,
    then fit rates and write CSV and Markdown reports.
    """
    tracer = setup_tracing()

    try:
        cfg = load_study_config(
            config,
            h_values=parse_h_list(h) if h else None,
            problem=problem,
            output_dir=out,
        )
    except ConfigError as e:
        fail(str(e))

    print_header(f"Convergence study: {cfg.problem.kind}")
    typer.echo(f"Levels: {', '.join(f'{v:g}' for v in cfg.h_values)}")
    typer.echo(f"Output: {cfg.output_dir}\n")

    with tracer.start_as_current_span("cli.study") as span:
        trace_id = trace_id_of(span)
        try:
            table = run_study(cfg, progress=typer.echo)
        except (StudyLevelError, ConfigError, AnalysisError) as e:
            span.record_exception(e)
            fail(str(e))

    typer.echo("")
    for column in ("h1_uh", "h1_uI", "l2_uh"):
        fit = table.fits.get(column)
        if fit is not None:
            typer.echo(f"  [fit] {column} slope={fit.slope:.3f} slope_with_log={fit.slope_with_log:.3f}")

    print_footer(trace_id)


@app.command()
def mesh(
    problem: str = typer.Option(
        ...,
        "--problem", "-p",
        help="Problem preset whose domain and interface are meshed",
    ),
    h: float = typer.Option(
        ...,
        "--h",
        help="Target mesh size",
    ),
    out: Path = typer.Option(
        ...,
        "--out", "-o",
        help="Directory for the .node / .ele files",
    ),
):
    """
    Generate a single mesh and write it in Triangle's .node/.ele format.
    """
    tracer = setup_tracing()

    with tracer.start_as_current_span("cli.mesh") as span:
        span.set_attribute("mesh.target_h", h)
        try:
            problem_cfg = ProblemConfig(problem)
            problem_spec = problem_cfg.build()
            m = build_mesh(problem_spec.domain, h, fitted=problem_cfg.fitted)
        except (ConfigError, MeshError) as e:
            span.record_exception(e)
            fail(str(e))

        node_path, ele_path = write_triangle_mesh(m, Path(out) / f"{problem}_h{h:g}".replace(".", "p"))
        q = quality_report(m, problem_spec.curve)
        typer.echo(f"  [mesh] wrote {node_path} {ele_path}")
        typer.echo(
            f"  [mesh] h={q.h:.6g} triangles={q.n_triangles} irregular={q.n_irregular} "
            f"min_inradius_ratio={q.min_inradius_ratio:.3f} two_on_interface={q.irregular_two_vertices_on_S}"
        )


if __name__ == "__main__":
    app()

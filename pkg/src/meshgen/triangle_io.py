"""
Mesh export and import in the .node / .ele layout of Shewchuk's Triangle.

.node: header "<count> 2 0 1", then "index x y marker" per vertex
       (marker 0 interior, 1 boundary, 2 interface).
.ele:  header "<count> 3 1", then "index v1 v2 v3 region" per triangle.
Indices are 1-based; '#' starts a comment.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

import numpy as np

from src.geometry.curves import InterfaceCurve
from src.meshgen.mesh import Mesh, MeshError, classify_triangles

PathLike = Union[str, Path]


def write_triangle_mesh(mesh: Mesh, stem: PathLike) -> tuple[Path, Path]:
    """Write <stem>.node and <stem>.ele; returns both paths."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    node_path = stem.with_suffix(".node")
    ele_path = stem.with_suffix(".ele")

    lines = [f"{mesh.n_vertices} 2 0 1"]
    for i, ((x, y), m) in enumerate(zip(mesh.vertices, mesh.vertex_marker), start=1):
        lines.append(f"{i} {x:.17g} {y:.17g} {int(m)}")
    node_path.write_text("\n".join(lines) + "\n", newline="\n")

    lines = [f"{mesh.n_triangles} 3 1"]
    for i, (tri, region) in enumerate(zip(mesh.triangles + 1, mesh.tri_region), start=1):
        lines.append(f"{i} {tri[0]} {tri[1]} {tri[2]} {int(region)}")
    ele_path.write_text("\n".join(lines) + "\n", newline="\n")
    return node_path, ele_path


def _data_rows(path: Path) -> list[list[str]]:
    rows = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    return rows


def read_triangle_mesh(
    node_path: PathLike,
    ele_path: PathLike,
    curve: Optional[InterfaceCurve] = None,
    tol: float = 0.0,
) -> Mesh:
    """
    Read a .node / .ele pair.

    Regions come from the .ele attribute column. Regular/irregular tags are
    not stored in the files; pass the curve to recompute them.
    """
    node_rows = _data_rows(Path(node_path))
    ele_rows = _data_rows(Path(ele_path))
    if not node_rows or not ele_rows:
        raise MeshError("empty .node or .ele file")

    n_nodes = int(node_rows[0][0])
    n_tris = int(ele_rows[0][0])
    nodes = node_rows[1:]
    eles = ele_rows[1:]
    if len(nodes) != n_nodes or len(eles) != n_tris:
        raise MeshError(
            f"count mismatch: header says {n_nodes} nodes / {n_tris} triangles, "
            f"found {len(nodes)} / {len(eles)}"
        )

    first_index = int(nodes[0][0])
    vertices = np.array([[float(r[1]), float(r[2])] for r in nodes])
    markers = np.array([int(r[3]) if len(r) > 3 else 0 for r in nodes])
    triangles = np.array([[int(v) - first_index for v in r[1:4]] for r in eles])
    regions = np.array([int(float(r[4])) if len(r) > 4 else 1 for r in eles])

    mesh = Mesh.from_arrays(vertices, triangles, markers, tri_region=regions)
    if curve is not None:
        mesh = classify_triangles(mesh, curve, tol)
    return mesh

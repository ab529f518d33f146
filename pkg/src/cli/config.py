"""
Study configuration: JSON file, CLI overrides, environment fallback.

Example file:

    {
      "problem": {"kind": "radial", "B1": 1, "B2": 100, "r0": 0.5},
      "h_values": [0.125, 0.0625, 0.03125],
      "solver": {"rel_tol": 1e-10, "max_iters": null, "preconditioner": "jacobi"},
      "output_dir": "results/radial",
      "emit_mesh": false
    }

"problem" may also be a bare preset name such as "smooth".
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional, Sequence

from src.problems.manufactured import PRESETS, UNFITTED, ProblemError, problem_from_name
from src.solver.cg import SolveConfig


class ConfigError(ValueError):
    """Malformed or inconsistent study configuration."""


def default_output_dir() -> Path:
    return Path(os.environ.get("FEMSTUDY_OUTPUT_DIR", "results"))


@dataclass(frozen=True)
class ProblemConfig:
    kind: str
    params: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PRESETS:
            raise ConfigError(f"unknown problem kind {self.kind!r}; choose from {', '.join(sorted(PRESETS))}")

    @property
    def fitted(self) -> bool:
        return self.kind not in UNFITTED

    def build(self):
        try:
            return problem_from_name(self.kind, **self.params)
        except ProblemError as e:
            raise ConfigError(str(e)) from e


@dataclass(frozen=True)
class StudyConfig:
    problem: ProblemConfig
    h_values: tuple[float, ...]
    solver: SolveConfig = field(default_factory=SolveConfig)
    output_dir: Path = field(default_factory=default_output_dir)
    emit_mesh: bool = False

    def __post_init__(self):
        hs = tuple(float(h) for h in self.h_values)
        object.__setattr__(self, "h_values", hs)
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        if not hs:
            raise ConfigError("h_values must not be empty")
        if any(not 0.0 < h < 1.0 for h in hs):
            raise ConfigError(f"h_values must lie in (0, 1), got {list(hs)}")
        if any(b >= a for a, b in zip(hs[:-1], hs[1:])):
            raise ConfigError(f"h_values must be strictly decreasing, got {list(hs)}")


def _problem_from_json(raw: Any) -> ProblemConfig:
    if isinstance(raw, str):
        return ProblemConfig(raw)
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("'problem' must be a preset name or an object with a 'kind' key")
    params = {k: float(v) for k, v in raw.items() if k != "kind"}
    return ProblemConfig(raw["kind"], params)


def _solver_from_json(raw: Optional[dict]) -> SolveConfig:
    raw = raw or {}
    unknown = set(raw) - {"rel_tol", "max_iters", "preconditioner"}
    if unknown:
        raise ConfigError(f"unknown solver field(s): {', '.join(sorted(unknown))}")
    try:
        return SolveConfig(**raw)
    except ValueError as e:
        raise ConfigError(f"invalid solver settings: {e}") from e


def study_config_from_dict(raw: dict) -> StudyConfig:
    known = {"problem", "h_values", "solver", "output_dir", "emit_mesh"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
    for required in ("problem", "h_values"):
        if required not in raw:
            raise ConfigError(f"config is missing '{required}'")
    return StudyConfig(
        problem=_problem_from_json(raw["problem"]),
        h_values=tuple(raw["h_values"]),
        solver=_solver_from_json(raw.get("solver")),
        output_dir=Path(raw["output_dir"]) if raw.get("output_dir") else default_output_dir(),
        emit_mesh=bool(raw.get("emit_mesh", False)),
    )


def parse_h_list(text: str) -> tuple[float, ...]:
    """'0.25,0.125' or '1/4,1/8' -> (0.25, 0.125)."""
    values = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            if "/" in item:
                num, den = item.split("/", 1)
                values.append(float(num) / float(den))
            else:
                values.append(float(item))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"cannot parse h value {item!r}") from None
    return tuple(values)


def load_study_config(
    path: Optional[Path] = None,
    h_values: Optional[Sequence[float]] = None,
    problem: Optional[str] = None,
    output_dir: Optional[Path] = None,
) -> StudyConfig:
    """Read the JSON file (if any) and apply CLI overrides field by field."""
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file {path} not found") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        if problem is not None:
            raw["problem"] = problem
        if h_values is not None:
            raw["h_values"] = list(h_values)
        config = study_config_from_dict(raw)
    else:
        if problem is None or h_values is None:
            raise ConfigError("without --config both --problem and --h are required")
        config = StudyConfig(problem=ProblemConfig(problem), h_values=tuple(h_values))

    if output_dir is not None:
        config = replace(config, output_dir=Path(output_dir))
    return config

"""Structured run reports with deterministic JSON serialization.

Reports embed the run configuration and every certified window; numeric
claims never leave their windows.  Serialization is byte-stable across
runs with the same configuration, so wall-clock timing is written to
stderr by the CLI and never into the payload.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any, Dict, Optional

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    field: str = "Q"
    min_degree: int = -8
    max_degree: int = 8
    arity: int = 4
    d: int = 1
    size_bound: int = 3
    max_steps: int = 3
    depth: int = 10
    threads: int = 1
    extra: Dict[str, Any] = dc_field(default_factory=dict)

    def validate(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if self.arity < 2:
            raise ValueError("arity bound must be at least 2")
        if self.size_bound < 1 or self.max_steps < 1 or self.depth < 1:
            raise ValueError("bounds must be positive")
        if self.min_degree > self.max_degree:
            raise ValueError("empty degree window")

    def as_dict(self) -> Dict[str, Any]:
        out = {
            "field": self.field,
            "min_degree": self.min_degree,
            "max_degree": self.max_degree,
            "arity": self.arity,
            "d": self.d,
            "size_bound": self.size_bound,
            "max_steps": self.max_steps,
            "depth": self.depth,
            "threads": self.threads,
        }
        if self.extra:
            out["extra"] = self.extra
        return out


@dataclass
class CheckReport:
    command: str
    verdict: str
    config: RunConfig
    windows: Dict[str, Any] = dc_field(default_factory=dict)
    tables: Dict[str, Any] = dc_field(default_factory=dict)
    certificates: Dict[str, Any] = dc_field(default_factory=dict)
    exit_code: int = 0

    def payload(self) -> Dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "verdict": self.verdict,
            "config": self.config.as_dict(),
            "windows": self.windows,
            "tables": self.tables,
            "certificates": self.certificates,
        }

    def to_json(self) -> str:
        return json.dumps(_plain(self.payload()), sort_keys=True,
                          separators=(",", ": "), indent=1) + "\n"


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    return x


def dims_map(dims: Dict[int, int]) -> Dict[str, int]:
    """Degree -> dimension map with zero entries omitted."""
    return {str(k): v for k, v in sorted(dims.items()) if v}


def emit(report: CheckReport, json_path: Optional[str], elapsed: float):
    text = report.to_json()
    if json_path:
        with open(json_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"[{report.command}] verdict={report.verdict} elapsed={elapsed:.2f}s",
          file=sys.stderr)

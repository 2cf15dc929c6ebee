"""Residual reports and deterministic serialization."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ResidualReport:
    """Named per-point residuals over a grid.

    ``passed`` is ``max < tolerance``; ``details`` holds check-specific
    extras (fitted radii, annotations, ...).
    """

    name: str
    grid: list
    values: np.ndarray
    max: float
    mean: float
    argmax: tuple
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, name, grid, values, tolerance, **details):
        values = np.abs(np.asarray(values, dtype=float))
        grid = [tuple(float(x) for x in np.atleast_1d(pt)) for pt in grid]
        if values.size == 0:
            raise ValueError("empty residual set")
        i = int(np.argmax(values))
        vmax = float(values[i])
        return cls(
            name=name,
            grid=grid,
            values=values,
            max=vmax,
            mean=float(values.mean()),
            argmax=grid[i],
            tolerance=float(tolerance),
            passed=bool(vmax < tolerance),
            details=dict(details),
        )

    def to_dict(self, include_values=True):
        out = {
            "name": self.name,
            "max": self.max,
            "mean": self.mean,
            "argmax": list(self.argmax),
            "tolerance": self.tolerance,
            "pass": self.passed,
            "n_points": len(self.grid),
            "details": self.details,
        }
        if include_values:
            out["grid"] = [list(p) for p in self.grid]
            out["values"] = self.values.tolist()
        return out


def format_float(x):
    """17 significant digits, the round-trip width of a double."""
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return f"{x:.17g}"


def dumps(obj, indent=2, _level=0):
    """Canonical JSON: sorted keys, fixed float formatting, no timestamps."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_str(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return _str(obj)
    if isinstance(obj, ResidualReport):
        return dumps(obj.to_dict(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _str(s):
    return json.dumps(s, ensure_ascii=False)


def digest(text):
    if isinstance(text, str):
        text = text.encode("utf-8")
    return hashlib.sha256(text).hexdigest()

"""Structured text reports.

One ``key.path = value`` entry per line, in insertion order.  Values are
space-separated tokens: integers, decimals written with 17 significant
digits (so they read back bit-for-bit), ``inf``, ``true``/``false``, or a
bare word.  Polygons are flattened ``x0 y0 x1 y1 ...`` vertex lists.

Schema (keys present depend on ``kind``)::

    kind                         estimate | pushforward
    status                       ok | pass | hypothesis-failed | certificate-failed | theorem-failed | estimator-error
    map.family, map.<param>      lift definition
    matrix.L, matrix.L_inv       nine integers, row-major
    words.U, words.V, words.G    exponent triples (s t f) of S^s T^t F^f
    hypothesis.line              u v w of {ux + vy + w = 0}, or at-infinity
    hypothesis.clearance         distance from the outer estimate to that line
    estimate.*                   ladder, grid_n, margin, hausdorff_trace,
                                 inner.vertices, outer.vertices
    certificate.*                R, epsilon, k0, R_prime, R_dprime, mn_bound, ...
    empirical.*                  trials, box_hits, violations
    theorem.*                    image.{inner,outer}.vertices,
                                 zaction.{inner,outer}.vertices, distance, bar, passed
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .geometry import ConvexRegion

HEADER = "# torusrot report v1"


def format_float(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        raise ValueError("NaN is not allowed in reports")
    text = format(x, ".17g")
    # keep floats distinguishable from integers on read-back
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, str):
        if "\n" in value or "=" in value:
            raise ValueError(f"report strings must be single-line without '=': {value!r}")
        return value
    if isinstance(value, ConvexRegion):
        return format_value(value.vertices.ravel().tolist())
    if isinstance(value, np.ndarray):
        return format_value(value.ravel().tolist())
    if isinstance(value, (list, tuple)):
        return " ".join(format_value(v) for v in value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


class Report:
    """Ordered mapping of dotted keys to values."""

    def __init__(self):
        self.entries: dict[str, object] = {}

    def __setitem__(self, key: str, value) -> None:
        if not key or any(c.isspace() for c in key) or "=" in key:
            raise ValueError(f"bad report key {key!r}")
        self.entries[key] = value

    def __getitem__(self, key: str):
        return self.entries[key]

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def update(self, prefix: str, values: dict) -> None:
        for k, v in values.items():
            self[f"{prefix}.{k}" if prefix else k] = v

    def dumps(self) -> str:
        lines = [HEADER]
        lines += [f"{k} = {format_value(v)}".rstrip() for k, v in self.entries.items()]
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())


def loads(text: str) -> dict[str, str]:
    """Raw ``key -> value string`` mapping of a serialized report."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        if " = " not in line and not line.rstrip().endswith(" ="):
            raise ValueError(f"line {lineno}: not a report entry")
        key, _, value = line.partition(" =")
        out[key.strip()] = value.strip()
    return out


def read(path: str | Path) -> dict[str, str]:
    return loads(Path(path).read_text())


def parse_token(tok: str):
    if tok in ("true", "false"):
        return tok == "true"
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        return tok


def parse_numbers(value: str) -> list[float]:
    return [float(t) for t in value.split()]


def parse_vertices(value: str) -> np.ndarray:
    nums = parse_numbers(value)
    if len(nums) % 2:
        raise ValueError("vertex list has an odd number of coordinates")
    return np.array(nums, dtype=float).reshape(-1, 2)


def typed(raw: dict[str, str]) -> dict[str, object]:
    """Parse every value: single tokens become scalars, several become lists."""
    out = {}
    for k, v in raw.items():
        toks = v.split()
        vals = [parse_token(t) for t in toks]
        out[k] = vals[0] if len(vals) == 1 else vals
    return out

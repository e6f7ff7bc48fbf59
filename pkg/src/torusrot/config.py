"""Run configuration: ``[section]`` headers and ``key = value`` lines.

Unknown sections and keys are errors, reported with their line number.

Example::

    [map]
    family = skew
    axis = vertical
    omega = 0
    constant = 0.5
    cos = -0.5

    [matrix]
    L = 1 1 0  0 1 0  0 0 1

    [estimate]
    n_max = 200
    grid_n = 256
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .dynamics import TorusLift, make_lift
from .projective import IntMatrix3
from .rotation import UNIT_BOX, Box, default_ladder


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


FAMILY_KEYS = {
    "translation": {"alpha", "beta"},
    "skew": {"axis", "omega", "constant", "cos", "sin"},
    "twowave": {"p1", "p2", "q1", "q2"},
}

SECTION_KEYS = {
    "map": {"family"} | set().union(*FAMILY_KEYS.values()),
    "matrix": {"L"},
    "estimate": {"ladder", "n_max", "grid_n"},
    "zaction": {"p_max", "window", "K", "per_edge"},
    "certificate": {"R", "k_scan", "grid_n", "trials"},
}


@dataclass
class RunConfig:
    lift: TorusLift
    matrix: IntMatrix3 | None = None
    ladder: list[int] = field(default_factory=lambda: default_ladder(64))
    grid_n: int = 64
    p_max: int = 64
    window: tuple[float, float, float, float] | None = None
    K: Box = UNIT_BOX
    per_edge: int = 512
    R: float = 1.0
    k_scan: int = 128
    cert_grid_n: int = 32
    trials: int = 500
    raw: dict = field(default_factory=dict)


def parse_sections(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {line!r}", lineno)
            current = line[1:-1].strip()
            if current not in SECTION_KEYS:
                raise ConfigError(f"unknown section [{current}]", lineno)
            if current in sections:
                raise ConfigError(f"duplicate section [{current}]", lineno)
            sections[current] = {}
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        if current is None:
            raise ConfigError("key outside of any section", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SECTION_KEYS[current]:
            raise ConfigError(f"unknown key {key!r} in [{current}]", lineno)
        if key in sections[current]:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        sections[current][key] = (value, lineno)
    return sections


def _num(entry, cast=float):
    value, lineno = entry
    try:
        return cast(value)
    except ValueError:
        raise ConfigError(f"cannot read {value!r} as {cast.__name__}", lineno) from None


def _nums(entry, cast=float, count=None):
    value, lineno = entry
    try:
        out = [cast(tok) for tok in value.split()]
    except ValueError:
        raise ConfigError(f"cannot read {value!r} as numbers", lineno) from None
    if count is not None and len(out) != count:
        raise ConfigError(f"expected {count} numbers, got {len(out)}", lineno)
    return out


def _build_lift(sec: dict) -> TorusLift:
    if "family" not in sec:
        raise ConfigError("[map] needs a family")
    family, lineno = sec["family"]
    if family not in FAMILY_KEYS:
        raise ConfigError(f"unknown family {family!r}", lineno)
    params = {}
    for key, entry in sec.items():
        if key == "family":
            continue
        if key not in FAMILY_KEYS[family]:
            raise ConfigError(f"key {key!r} does not belong to family {family}", entry[1])
        if key == "axis":
            params[key] = entry[0]
        elif key in ("cos", "sin"):
            params[key] = _nums(entry)
        else:
            params[key] = _num(entry)
    if family == "translation" and not {"alpha", "beta"} <= params.keys():
        raise ConfigError("translation needs alpha and beta", lineno)
    try:
        return make_lift(family, **params)
    except ValueError as exc:
        raise ConfigError(str(exc), lineno) from None


def load_config(text: str) -> RunConfig:
    sections = parse_sections(text)
    if "map" not in sections:
        raise ConfigError("missing [map] section")
    cfg = RunConfig(lift=_build_lift(sections["map"]))
    cfg.raw = {s: {k: v for k, (v, _) in d.items()} for s, d in sections.items()}

    if "matrix" in sections:
        entry = sections["matrix"].get("L")
        if entry is None:
            raise ConfigError("[matrix] needs L")
        try:
            cfg.matrix = IntMatrix3.from_flat(_nums(entry, int, 9))
        except OverflowError as exc:
            raise ConfigError(str(exc), entry[1]) from None
        if cfg.matrix.det() != 1:
            raise ConfigError(f"L has determinant {cfg.matrix.det()}, expected 1", entry[1])

    est = sections.get("estimate", {})
    if "ladder" in est and "n_max" in est:
        raise ConfigError("give either ladder or n_max, not both", est["n_max"][1])
    if "ladder" in est:
        cfg.ladder = _nums(est["ladder"], int)
        if not cfg.ladder or cfg.ladder[0] < 1 or any(b <= a for a, b in zip(cfg.ladder, cfg.ladder[1:])):
            raise ConfigError("ladder must be strictly increasing positive integers", est["ladder"][1])
    if "n_max" in est:
        n_max = _num(est["n_max"], int)
        if n_max < 1:
            raise ConfigError("n_max must be positive", est["n_max"][1])
        cfg.ladder = default_ladder(n_max)
    if "grid_n" in est:
        cfg.grid_n = _num(est["grid_n"], int)
        if cfg.grid_n < 2:
            raise ConfigError("grid_n must be at least 2", est["grid_n"][1])

    za = sections.get("zaction", {})
    if "p_max" in za:
        cfg.p_max = _num(za["p_max"], int)
        if cfg.p_max < 1:
            raise ConfigError("p_max must be positive", za["p_max"][1])
    if "window" in za:
        w = _nums(za["window"], float, 4)
        if not (w[1] >= w[0] and w[3] >= w[2]):
            raise ConfigError("window must be xmin xmax ymin ymax", za["window"][1])
        cfg.window = tuple(w)
    if "K" in za:
        try:
            cfg.K = Box(*_nums(za["K"], float, 4))
        except ValueError as exc:
            raise ConfigError(str(exc), za["K"][1]) from None
    if "per_edge" in za:
        cfg.per_edge = _num(za["per_edge"], int)
        if cfg.per_edge < 2:
            raise ConfigError("per_edge must be at least 2", za["per_edge"][1])

    cert = sections.get("certificate", {})
    if "R" in cert:
        cfg.R = _num(cert["R"])
        if cfg.R <= 0:
            raise ConfigError("R must be positive", cert["R"][1])
    for key, attr, low in (("k_scan", "k_scan", 1), ("grid_n", "cert_grid_n", 2), ("trials", "trials", 1)):
        if key in cert:
            setattr(cfg, attr, _num(cert[key], int))
            if getattr(cfg, attr) < low:
                raise ConfigError(f"{key} must be at least {low}", cert[key][1])
    return cfg


def read_config(path: str | Path) -> RunConfig:
    return load_config(Path(path).read_text())

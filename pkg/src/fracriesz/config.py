"""Flat ``key = value`` experiment configuration.

Blank lines and ``#`` comments are ignored.  Lists are comma separated;
numeric grids may use the inclusive shorthand ``start:stop:step``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .fractals import FAMILIES, GeneratorSpec
from .riesz import WITNESS_KINDS

__all__ = ["ExperimentConfig", "parse_config", "parse_config_text", "emit_config", "normalize_config", "expand_grid"]

SCALING_QUANTITIES = ("volume", "escape", "ue", "dkue")
METHODS = ("auto", "spectral", "binomial", "chebyshev", "quotient")


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    level: int
    p_grid: tuple[float, ...]
    gamma_grid: tuple[float, ...]
    dimension: int = 2
    weight: float = 1.0
    cap: int = 2_000_000
    laziness: float = 0.5
    families: tuple[str, ...] = ("tent", "heat_cutoff", "eigenmode_band")
    n_scales: int = 8
    method: str = "auto"
    verify: tuple[str, ...] = SCALING_QUANTITIES
    tail_tol: float = 1e-8
    slope_min: float = 0.1
    slope_eps: float = 0.05
    residual_max: float = 0.25
    kernel_floor: float = 1e-14
    seed: int = 0
    output_dir: str = "fracriesz_out"

    def __post_init__(self):
        _validate(self)

    @property
    def generator(self) -> GeneratorSpec:
        return GeneratorSpec(self.family, self.level, self.dimension, self.weight, self.cap)


REQUIRED = ("family", "level", "p_grid", "gamma_grid")
_KINDS = {f.name: f.type for f in fields(ExperimentConfig)}
_ORDER = [f.name for f in fields(ExperimentConfig)]


def _validate(c: ExperimentConfig) -> None:
    def bad(field, msg):
        raise ConfigError(msg, field=field)

    if c.family not in FAMILIES:
        bad("family", f"unknown family {c.family!r}; expected one of {', '.join(FAMILIES)}")
    if c.level < 0:
        bad("level", "must be nonnegative")
    if c.dimension < 1:
        bad("dimension", "must be >= 1")
    if not c.weight > 0:
        bad("weight", "must be positive")
    if not 0.0 <= c.laziness < 1.0:
        bad("laziness", "must lie in [0, 1)")
    if not c.p_grid:
        bad("p_grid", "must not be empty")
    if any(not p > 1 for p in c.p_grid):
        bad("p_grid", "every p must exceed 1")
    if not c.gamma_grid:
        bad("gamma_grid", "must not be empty")
    if any(not 0.0 <= g <= 1.0 for g in c.gamma_grid):
        bad("gamma_grid", "every gamma must lie in [0, 1]")
    if not c.families:
        bad("families", "must not be empty")
    for k in c.families:
        if k not in WITNESS_KINDS:
            bad("families", f"unknown witness kind {k!r}")
    for q in c.verify:
        if q not in SCALING_QUANTITIES:
            bad("verify", f"unknown quantity {q!r}")
    if c.method not in METHODS:
        bad("method", f"unknown method {c.method!r}")
    if c.n_scales < 4:
        bad("n_scales", "need at least 4 scales per fit")
    for name in ("tail_tol", "slope_min", "slope_eps", "residual_max", "kernel_floor"):
        if not getattr(c, name) > 0:
            bad(name, "must be positive")


def expand_grid(text: str, field: str | None = None, line: int | None = None) -> tuple[float, ...]:
    """``"1.5,2,3"`` or inclusive ``"0.1:0.9:0.05"`` (17 values)."""
    out = []
    for part in (s.strip() for s in text.split(",")):
        if not part:
            raise ConfigError("empty list entry", field, line)
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise ConfigError(f"grid shorthand must be start:stop:step, got {part!r}", field, line)
            start, stop, step = (_float(b, field, line) for b in bits)
            if not step > 0 or stop < start:
                raise ConfigError(f"grid {part!r} needs step > 0 and stop >= start", field, line)
            n = (stop - start) / step
            if abs(n - round(n)) > 1e-9:
                raise ConfigError(f"grid {part!r}: step does not divide the range", field, line)
            out.extend(round(start + i * step, 12) for i in range(int(round(n)) + 1))
        else:
            out.append(_float(part, field, line))
    return tuple(out)


def _float(s: str, field, line) -> float:
    try:
        v = float(s)
    except ValueError:
        raise ConfigError(f"expected a number, got {s!r}", field, line) from None
    if not math.isfinite(v):
        raise ConfigError(f"expected a finite number, got {s!r}", field, line)
    return v


def _int(s: str, field, line) -> int:
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"expected an integer, got {s!r}", field, line) from None


def _convert(key: str, raw: str, line: int):
    kind = _KINDS[key]
    if key in ("p_grid", "gamma_grid"):
        return expand_grid(raw, key, line)
    if key in ("families", "verify"):
        items = tuple(s.strip() for s in raw.split(",") if s.strip())
        if key == "verify" and items == ("none",):
            return ()
        return items
    if kind in ("int", int):
        return _int(raw, key, line)
    if kind in ("float", float):
        return _float(raw, key, line)
    return raw


def parse_config_text(text: str) -> ExperimentConfig:
    values: dict = {}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _KINDS:
            raise ConfigError(f"unknown key {key!r}", field=key, line=lineno)
        if key in seen:
            raise ConfigError(f"duplicate key (first set on line {seen[key]})", field=key, line=lineno)
        if not val:
            raise ConfigError("empty value", field=key, line=lineno)
        seen[key] = lineno
        values[key] = _convert(key, val, lineno)
    for key in REQUIRED:
        if key not in values:
            raise ConfigError("missing required key", field=key)
    return ExperimentConfig(**values)


def parse_config(path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text())


def _emit_value(v) -> str:
    if isinstance(v, tuple):
        if not v:
            return "none"
        return ",".join(_emit_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_config(c: ExperimentConfig) -> str:
    """Canonical text: every key, in declaration order, lists fully expanded."""
    return "".join(f"{k} = {_emit_value(getattr(c, k))}\n" for k in _ORDER)


def normalize_config(text: str) -> str:
    """Canonical form of a config text (comments dropped, defaults filled)."""
    return emit_config(parse_config_text(text))


def with_overrides(c: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(c, **kw)

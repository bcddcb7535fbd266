"""Run configuration: flat ``section.key = value`` text files plus overrides.

Example::

    # off-resonance reference point
    model.eps0 = 3.7
    drive.amplitude = 3.8
    bath.xi = 0.1
    sweep.x = A,0,5,40
    sweep.y = eps0,0,5,40
"""
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Tuple

import numpy as np

from .bath import BathParams
from .errors import ConfigError
from .model import DriveParams, ModelParams

AXIS_NAMES = ("A", "eps0", "xi", "J")
PRODUCTS = ("steady_concurrence", "populations_trace", "rates_vs_xi", "spectrum")


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ConfigError(f"unknown sweep axis {self.name!r}; expected one of {AXIS_NAMES}")
        if self.steps < 1:
            raise ConfigError("sweep axis needs at least one step")
        if not (np.isfinite(self.start) and np.isfinite(self.stop)):
            raise ConfigError("sweep range must be finite")

    def values(self):
        if self.steps == 1:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, self.steps)

    def text(self):
        return f"{self.name},{self.start!r},{self.stop!r},{self.steps}"


@dataclass(frozen=True)
class Numerics:
    kmax: Optional[int] = None
    tol: float = 1e-10
    horizon: int = 100_000
    stride: int = 1
    label_steps: int = 64
    thin: str = "log"
    thin_points: int = 400
    generator: str = "full"

    def __post_init__(self):
        if self.thin not in ("log", "none"):
            raise ConfigError("numerics.thin must be 'log' or 'none'")
        if self.generator not in ("full", "secular"):
            raise ConfigError("numerics.generator must be 'full' or 'secular'")
        if self.horizon < 1 or self.stride < 1 or self.label_steps < 1:
            raise ConfigError("horizon, stride and label_steps must be >= 1")


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    drive: DriveParams = field(default_factory=DriveParams)
    bath: BathParams = field(default_factory=BathParams)
    sweep: Tuple[Axis, ...] = ()
    outputs: Tuple[str, ...] = ("steady_concurrence",)
    numerics: Numerics = field(default_factory=Numerics)

    def __post_init__(self):
        if len(self.sweep) > 2:
            raise ConfigError("at most two sweep axes are supported")
        names = [a.name for a in self.sweep]
        if len(set(names)) != len(names):
            raise ConfigError("sweep axes must be distinct")
        if self.model.omega != self.drive.omega:
            raise ConfigError("model.omega and drive.omega must agree")
        for product in self.outputs:
            if product not in PRODUCTS:
                raise ConfigError(f"unknown output product {product!r}")

    def at(self, **coords):
        """Copy of this config pinned at the given axis coordinates, without sweep axes."""
        model, drive, bath = self.model, self.drive, self.bath
        for name, value in coords.items():
            value = float(value)
            if name == "A":
                drive = replace(drive, amplitude=value)
            elif name == "eps0":
                model = replace(model, eps0=value)
            elif name == "J":
                model = replace(model, J=value)
            elif name == "xi":
                bath = replace(bath, xi=value)
            else:
                raise ConfigError(f"unknown coordinate {name!r}")
        return replace(self, model=model, drive=drive, bath=bath, sweep=())


_SECTIONS = {"model": ModelParams, "drive": DriveParams, "bath": BathParams, "numerics": Numerics}
_ALIASES = {"drive.A": "drive.amplitude", "bath.T": "bath.temperature", "bath.T_b": "bath.temperature"}


def _coerce(cls, key, raw):
    types = {f.name: f.type for f in fields(cls)}
    if key not in types:
        raise ConfigError(f"unknown key {cls.__name__}.{key}")
    typ = types[key]
    try:
        if typ is Optional[int]:
            return None if raw.lower() == "none" else int(raw)
        if typ is int:
            return int(raw)
        if typ is str:
            return raw
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value {raw!r} for {key}") from exc


def _parse_axis(raw):
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 4:
        raise ConfigError(f"sweep axis must be 'name,min,max,steps', got {raw!r}")
    try:
        return Axis(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))
    except ValueError as exc:
        raise ConfigError(f"bad sweep axis {raw!r}") from exc


def parse_pairs(lines):
    """Yield (key, value) pairs from ``key = value`` lines; '#' starts a comment."""
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        yield _ALIASES.get(key, key), value


def build_config(pairs, base: RunConfig = None):
    cfg = base or RunConfig()
    sections = {name: {} for name in _SECTIONS}
    sweep = {a_key: axis for a_key, axis in zip(("x", "y"), cfg.sweep)}
    outputs = cfg.outputs
    for key, value in pairs:
        section, _, name = key.partition(".")
        if section in _SECTIONS and name:
            sections[section][name] = _coerce(_SECTIONS[section], name, value)
        elif section == "sweep" and name in ("x", "y"):
            if value.lower() in ("", "none"):
                sweep.pop(name, None)
            else:
                sweep[name] = _parse_axis(value)
        elif key == "outputs":
            outputs = tuple(p.strip() for p in value.split(",") if p.strip())
        else:
            raise ConfigError(f"unknown key {key!r}")
    try:
        return RunConfig(
            model=replace(cfg.model, **sections["model"]),
            drive=replace(cfg.drive, **sections["drive"]),
            bath=replace(cfg.bath, **sections["bath"]),
            sweep=tuple(sweep[k] for k in ("x", "y") if k in sweep),
            outputs=outputs,
            numerics=replace(cfg.numerics, **sections["numerics"]),
        )
    except ValueError as exc:  # parameter validation in the dataclasses
        raise ConfigError(str(exc)) from exc


def load_config(path=None, overrides=(), base: RunConfig = None):
    """Read a config file (optional) and apply ``key=value`` overrides in order."""
    pairs = []
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                pairs.extend(parse_pairs(fh))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    pairs.extend(parse_pairs(overrides))
    return build_config(pairs, base)


def config_text(cfg: RunConfig):
    """Serialize to the key-value format; ``load_config`` reads it back unchanged."""
    lines = []
    for section in ("model", "drive", "bath", "numerics"):
        obj = getattr(cfg, section)
        for f in fields(obj):
            lines.append(f"{section}.{f.name} = {getattr(obj, f.name)!r}".replace("'", ""))
    for key, axis in zip(("x", "y"), cfg.sweep):
        lines.append(f"sweep.{key} = {axis.text()}")
    lines.append("outputs = " + ",".join(cfg.outputs))
    return "\n".join(lines) + "\n"

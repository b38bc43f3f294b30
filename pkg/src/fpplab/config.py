"""Experiment configuration: a dataclass and a flat ``key = value`` text format.

Example::

    # midpoint run
    dist = exponential
    rate = 1.0
    seed = 42
    replicates = 2000
    n_values = 16, 32, 64, 128
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, FPPError
from .lattice import Point, SectorSpec
from .weights import Distribution

_DIST_PARAMS = {
    "exponential": ("rate",),
    "uniform": ("a", "b"),
    "pareto": ("alpha", "xmin"),
    "constant": ("value",),
}
_DIST_DEFAULTS = {"rate": 1.0, "xmin": 1.0, "value": 1.0}


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    dist: Distribution = field(default_factory=Distribution.exponential)
    seed_base: int = 0
    replicates: int = 100
    n_values: tuple = (16, 32)
    sector: SectorSpec = field(default_factory=lambda: SectorSpec(math.pi / 2, math.pi / 4, 3 * math.pi / 4))
    tolerances: dict = field(default_factory=dict)
    separations: tuple = (4,)
    sources: tuple = (Point(-5, 0), Point(5, 0))
    restriction: str = "full"
    box_factor: float = 1.5
    level: float = 0.95
    workers: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if not self.n_values or any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ConfigError("n_values must be non-empty and strictly increasing")
        if any(n < 1 for n in self.n_values):
            raise ConfigError("n_values must be positive")
        if not 0 < self.level < 1:
            raise ConfigError("level must lie in (0, 1)")
        if self.box_factor < 1:
            raise ConfigError("box_factor must be >= 1 so the box contains every target")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def echo(self) -> dict:
        """JSON-friendly view of every setting."""
        return {
            "name": self.name,
            "dist": {"kind": self.dist.kind, **self.dist.params},
            "seed_base": self.seed_base,
            "replicates": self.replicates,
            "n_values": list(self.n_values),
            "sector": {"theta": self.sector.theta, "theta1": self.sector.theta1, "theta2": self.sector.theta2},
            "tolerances": dict(self.tolerances),
            "separations": list(self.separations),
            "sources": [list(p) for p in self.sources],
            "restriction": self.restriction,
            "box_factor": self.box_factor,
            "level": self.level,
            "workers": self.workers,
        }


def _ints(text: str) -> tuple:
    return tuple(int(t) for t in text.replace(",", " ").split())


def _points(text: str) -> tuple:
    out = []
    for chunk in text.split(";"):
        xy = _ints(chunk)
        if len(xy) != 2:
            raise ConfigError(f"cannot read point {chunk!r}; use 'x,y; x,y'")
        out.append(Point(*xy))
    return tuple(out)


def parse_config(text: str, name: str | None = None) -> ExperimentConfig:
    """Parse flat ``key = value`` text; ``#`` starts a comment."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    kind = raw.pop("dist", "exponential")
    if kind not in _DIST_PARAMS:
        raise ConfigError(f"unknown dist {kind!r}")
    kw = {}
    try:
        params = {p: float(raw.pop(p, _DIST_DEFAULTS.get(p, "nan"))) for p in _DIST_PARAMS[kind]}
        if any(math.isnan(v) for v in params.values()):
            raise ConfigError(f"dist {kind} needs {', '.join(_DIST_PARAMS[kind])}")
        kw["dist"] = Distribution(kind, params)
        if "seed" in raw:
            kw["seed_base"] = int(raw.pop("seed"))
        for key, conv in (("replicates", int), ("box_factor", float), ("level", float),
                          ("workers", int), ("restriction", str)):
            if key in raw:
                kw[key] = conv(raw.pop(key))
        if "n_values" in raw:
            kw["n_values"] = _ints(raw.pop("n_values"))
        if "separations" in raw:
            kw["separations"] = _ints(raw.pop("separations"))
        if "sources" in raw:
            kw["sources"] = _points(raw.pop("sources"))
        if {"theta", "theta1", "theta2"} & raw.keys():
            theta = float(raw.pop("theta", math.pi / 2))
            kw["sector"] = SectorSpec(theta, float(raw.pop("theta1", theta)), float(raw.pop("theta2", theta)))
        kw["tolerances"] = {k[4:]: float(raw.pop(k)) for k in list(raw) if k.startswith("tol_")}
        cfg_name = raw.pop("name", name)
    except ConfigError:
        raise
    except (ValueError, FPPError) as exc:
        raise ConfigError(str(exc)) from exc
    if raw:
        raise ConfigError(f"unknown keys: {', '.join(sorted(raw))}")
    if kw.get("restriction", "full") not in ("full", "half"):
        raise ConfigError("restriction must be 'full' or 'half'")
    return ExperimentConfig(name=cfg_name or "experiment", **kw)


def load_config(path, name: str | None = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, name)

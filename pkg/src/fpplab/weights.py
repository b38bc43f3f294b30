"""Reproducible i.i.d. edge weights on finite boxes of Z^2.

Every weight is a pure function of ``(seed, edge, distribution)``: a
splitmix64-style counter hash turns the edge coordinates into a uniform
variate, which is pushed through the inverse CDF of the distribution.  Nothing
depends on the box, so a field on ``[-5, 5]^2`` agrees edge-for-edge with a
field on ``[-10, 10]^2`` built from the same seed, and full-plane and
half-plane computations see the same environment.

Weights are rounded to the dyadic grid ``QUANTUM * Z`` (``QUANTUM = 2**-30``).
As long as every path sum stays below ``2**23`` all float64 additions and
subtractions of passage times are exact, which is what lets the triangle
inequality, Busemann additivity and the half-plane monotonicity be checked
with ``==`` / ``<=`` and no tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameterError, OutOfDomainError

QUANTUM = 2.0 ** -30
EXACT_LIMIT = 2.0 ** 23  # 53 mantissa bits minus 30 fractional bits

HORIZONTAL = 0
VERTICAL = 1

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_ORIENT_SALT = np.uint64(0xD1B54A32D192ED03)
_U64 = 0xFFFFFFFFFFFFFFFF


class EdgeId(NamedTuple):
    """Nearest-neighbour edge ``{(x, y), (x, y) + e_k}``; ``orientation`` 0 is e1, 1 is e2."""

    x: int
    y: int
    orientation: int

    @classmethod
    def between(cls, p, q) -> "EdgeId":
        (px, py), (qx, qy) = p, q
        dx, dy = qx - px, qy - py
        if (abs(dx), abs(dy)) == (1, 0):
            return cls(min(px, qx), py, HORIZONTAL)
        if (abs(dx), abs(dy)) == (0, 1):
            return cls(px, min(py, qy), VERTICAL)
        raise InvalidParameterError(f"{p} and {q} are not lattice neighbours")

    def endpoints(self):
        if self.orientation == HORIZONTAL:
            return (self.x, self.y), (self.x + 1, self.y)
        return (self.x, self.y), (self.x, self.y + 1)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MUL1
    z = (z ^ (z >> np.uint64(27))) * _MUL2
    return z ^ (z >> np.uint64(31))


def edge_uniforms(seed: int, x, y, orientation) -> np.ndarray:
    """Uniform(0, 1) variates, open at both ends, keyed by (seed, edge)."""
    x = np.atleast_1d(np.asarray(x, dtype=np.int64))
    y = np.atleast_1d(np.asarray(y, dtype=np.int64))
    o = np.atleast_1d(np.asarray(orientation, dtype=np.uint64))
    key = _mix64(np.array([int(seed) & _U64], dtype=np.uint64))
    code = (x.astype(np.uint32).astype(np.uint64) << np.uint64(32)) | y.astype(np.uint32).astype(np.uint64)
    h = _mix64(key ^ _mix64(code ^ (o * _ORIENT_SALT)))
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def quantize(values) -> np.ndarray:
    """Round positive reals onto the dyadic grid, never below one quantum."""
    q = np.rint(np.asarray(values, dtype=np.float64) / QUANTUM)
    return np.maximum(q, 1.0) * QUANTUM


@dataclass(frozen=True)
class Distribution:
    """Continuous edge-weight law.

    ``kind`` is one of ``exponential`` (``rate``), ``uniform`` (``a``, ``b``),
    ``pareto`` (``alpha``, ``xmin``; shifted Pareto with support
    ``[xmin, inf)``) or ``constant`` (``value``).  ``constant`` is a test-only
    degenerate law used for closed-form checks.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        p = self.params
        if self.kind == "exponential":
            if p.get("rate", 0) <= 0:
                raise InvalidParameterError("exponential needs rate > 0")
        elif self.kind == "uniform":
            a, b = p.get("a"), p.get("b")
            if a is None or b is None or not 0 <= a < b:
                raise InvalidParameterError("uniform needs 0 <= a < b")
        elif self.kind == "pareto":
            if p.get("alpha", 0) <= 0 or p.get("xmin", 0) <= 0:
                raise InvalidParameterError("pareto needs alpha > 0 and xmin > 0")
        elif self.kind == "constant":
            if p.get("value", 0) <= 0:
                raise InvalidParameterError("constant weight must be positive")
        else:
            raise InvalidParameterError(f"unknown distribution kind {self.kind!r}")

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "Distribution":
        return cls("exponential", {"rate": float(rate)})

    @classmethod
    def uniform(cls, a: float, b: float) -> "Distribution":
        return cls("uniform", {"a": float(a), "b": float(b)})

    @classmethod
    def pareto(cls, alpha: float, xmin: float = 1.0) -> "Distribution":
        return cls("pareto", {"alpha": float(alpha), "xmin": float(xmin)})

    @classmethod
    def constant(cls, value: float = 1.0) -> "Distribution":
        return cls("constant", {"value": float(value)})

    @property
    def mean(self) -> float:
        p = self.params
        if self.kind == "exponential":
            return 1.0 / p["rate"]
        if self.kind == "uniform":
            return 0.5 * (p["a"] + p["b"])
        if self.kind == "pareto":
            return math.inf if p["alpha"] <= 1 else p["alpha"] * p["xmin"] / (p["alpha"] - 1)
        return p["value"]

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        """Inverse-CDF transform followed by dyadic rounding."""
        p = self.params
        if self.kind == "exponential":
            v = -np.log(u) / p["rate"]
        elif self.kind == "uniform":
            v = p["a"] + (p["b"] - p["a"]) * u
        elif self.kind == "pareto":
            v = p["xmin"] * u ** (-1.0 / p["alpha"])
        else:
            v = np.full(np.shape(u), p["value"])
        return quantize(v)

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items()))))


def edge_weights(seed: int, dist: Distribution, x, y, orientation) -> np.ndarray:
    return dist.from_uniform(edge_uniforms(seed, x, y, orientation))


@dataclass(frozen=True, eq=False)
class WeightField:
    """Edge weights on the box ``[-radius, radius]^2``.

    ``horizontal[j, i]`` is the weight of the edge from ``(i - r, j - r)`` to
    ``(i - r + 1, j - r)``; ``vertical[j, i]`` the edge from ``(i - r, j - r)``
    to ``(i - r, j - r + 1)``.  ``seed`` and ``dist`` are ``None`` for fields
    built directly from arrays.
    """

    radius: int
    horizontal: np.ndarray
    vertical: np.ndarray
    seed: int | None = None
    dist: Distribution | None = None

    def __post_init__(self):
        w = 2 * self.radius + 1
        if self.horizontal.shape != (w, w - 1) or self.vertical.shape != (w - 1, w):
            raise InvalidParameterError("weight arrays do not match the box")
        if not (np.all(self.horizontal > 0) and np.all(self.vertical > 0)):
            raise InvalidParameterError("edge weights must be strictly positive")
        self.horizontal.setflags(write=False)
        self.vertical.setflags(write=False)

    @classmethod
    def from_arrays(cls, radius: int, horizontal, vertical) -> "WeightField":
        return cls(int(radius), np.array(horizontal, dtype=np.float64), np.array(vertical, dtype=np.float64))

    @property
    def width(self) -> int:
        return 2 * self.radius + 1

    @property
    def n_edges(self) -> int:
        return self.horizontal.size + self.vertical.size

    @property
    def exact(self) -> bool:
        """True when every path sum is exactly representable (dyadic weights, bounded total)."""
        total = float(self.horizontal.sum() + self.vertical.sum())
        if total >= EXACT_LIMIT:
            return False
        grid = np.concatenate([self.horizontal.ravel(), self.vertical.ravel()]) / QUANTUM
        return bool(np.all(grid == np.rint(grid)))

    def contains(self, p) -> bool:
        return abs(p[0]) <= self.radius and abs(p[1]) <= self.radius

    def contains_edge(self, e: EdgeId) -> bool:
        a, b = e.endpoints()
        return self.contains(a) and self.contains(b)

    def edges(self):
        r = self.radius
        for y in range(-r, r + 1):
            for x in range(-r, r):
                yield EdgeId(x, y, HORIZONTAL)
        for y in range(-r, r):
            for x in range(-r, r + 1):
                yield EdgeId(x, y, VERTICAL)


def make_field(n: int, seed: int, dist: Distribution) -> WeightField:
    """Weights on every edge with both endpoints in ``[-n, n]^2``."""
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"box radius must be a positive integer, got {n}")
    n = int(n)
    coords = np.arange(-n, n + 1)
    hy, hx = np.meshgrid(coords, coords[:-1], indexing="ij")
    vy, vx = np.meshgrid(coords[:-1], coords, indexing="ij")
    horizontal = edge_weights(seed, dist, hx, hy, HORIZONTAL).reshape(hx.shape)
    vertical = edge_weights(seed, dist, vx, vy, VERTICAL).reshape(vx.shape)
    if horizontal.sum() + vertical.sum() >= EXACT_LIMIT:
        raise InvalidParameterError("total weight exceeds the exact-arithmetic range; use a smaller box")
    return WeightField(n, horizontal, vertical, int(seed), dist)


def weight_at(field: WeightField, e: EdgeId) -> float:
    if not field.contains_edge(e):
        raise OutOfDomainError(f"edge {e} lies outside [-{field.radius}, {field.radius}]^2")
    r = field.radius
    if e.orientation == HORIZONTAL:
        return float(field.horizontal[e.y + r, e.x + r])
    return float(field.vertical[e.y + r, e.x + r])


def path_time(field: WeightField, vertices) -> float:
    """Sum of edge weights along consecutive vertices."""
    total = 0.0
    for p, q in zip(vertices, vertices[1:]):
        total += weight_at(field, EdgeId.between(p, q))
    return total


def replicate_seed(seed_base: int, index: int, stream: int | None = None) -> int:
    """64-bit seed of replicate ``index``; replicates of different bases or streams do not overlap."""
    key = (int(index),) if stream is None else (int(stream), int(index))
    ss = np.random.SeedSequence(entropy=int(seed_base), spawn_key=key)
    return int(ss.generate_state(1, np.uint64)[0])

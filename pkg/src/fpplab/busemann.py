"""Busemann functions along anchor sequences, the half-plane difference Delta_H, and rho fits.

``busemann_along`` evaluates ``T(x, a_k) - T(y, a_k)`` along anchors
``a_k``.  Once the geodesics from ``x`` and from ``y`` to ``a_k`` first meet
at a vertex ``z`` that no longer moves with ``k``, the difference equals
``T(x, z) - T(y, z)`` for every later anchor; that common tail value is the
estimate.  With dyadic weights the tail is constant to the last bit.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFitError, InvalidParameterError
from .geodesic import ShortestPaths
from .lattice import FULL, HALF, Point, SectorSpec, require_domain
from .order import ExtremalProxy, extremal_proxy
from .weights import WeightField

# converged means the meeting vertex is fixed over at least this share of the anchors
DEFAULT_TAIL = 0.5


@dataclass
class BusemannSample:
    x: Point
    y: Point
    anchors: list
    values: np.ndarray
    meets: list = field(repr=False, default_factory=list)
    converged_value: float | None = None
    converged_index: int | None = None
    restriction: str = FULL
    side: str = "plain"

    @property
    def converged(self) -> bool:
        return self.converged_value is not None


def _first_meeting(sx: ShortestPaths, sy: ShortestPaths, a) -> int:
    """Flat index of the first vertex on the geodesic from y to ``a`` that lies on the geodesic from x to ``a``."""
    on_x = set(sx.path_indices(a))
    for idx in sy.path_indices(a):
        if idx in on_x:
            return idx
    raise AssertionError("geodesics to a common anchor always meet")


def busemann_along(field: WeightField, x, y, anchors, restriction: str = FULL,
                   paths_x: ShortestPaths | None = None, paths_y: ShortestPaths | None = None,
                   side: str = "plain", tail: float = DEFAULT_TAIL) -> BusemannSample:
    """Differences ``T(x, a_k) - T(y, a_k)`` with their tail value when it has settled."""
    anchors = [require_domain(a, field.radius, restriction) for a in anchors]
    if not anchors:
        raise InvalidParameterError("anchors must be non-empty")
    x = require_domain(x, field.radius, restriction)
    y = require_domain(y, field.radius, restriction)
    sx = paths_x if paths_x is not None else ShortestPaths(field, x, restriction, targets=anchors)
    sy = paths_y if paths_y is not None else ShortestPaths(field, y, restriction, targets=anchors)
    if sx.root != x or sy.root != y:
        raise InvalidParameterError("precomputed paths do not start at x and y")
    values = sx.times_to(anchors) - sy.times_to(anchors)
    meets = [_first_meeting(sx, sy, a) for a in anchors]
    k = len(meets) - 1
    while k > 0 and meets[k - 1] == meets[-1]:
        k -= 1
    sample = BusemannSample(x, y, anchors, values, [sx.point(m) for m in meets],
                            restriction=restriction, side=side)
    anchor_at_meet = sx.point(meets[-1]) == anchors[-1]
    if (len(anchors) - k) >= max(1, tail * len(anchors)) and not (anchor_at_meet and len(anchors) > 1):
        sample.converged_index = k
        sample.converged_value = float(values[k])
    return sample


@dataclass(frozen=True)
class MonotoneWitness:
    ok: bool
    values: np.ndarray
    first_violation: int | None = None


def halfplane_monotone_check(field: WeightField, x, proxy: ExtremalProxy,
                             paths_x: ShortestPaths | None = None) -> MonotoneWitness:
    """Check that ``T_H(x, y_n) - T_H(y_0, y_n)`` is non-increasing along the proxy vertices ``y_n``.

    The proxy is a half-plane geodesic from ``y_0``, so
    ``T_H(y_0, y_{n+1}) = T_H(y_0, y_n) + t(y_n, y_{n+1})`` and the triangle
    inequality for ``x`` gives the monotonicity pathwise.
    """
    if proxy.restriction != HALF:
        raise InvalidParameterError("monotonicity is a half-plane statement")
    verts = list(proxy.path.vertices)
    x = require_domain(x, field.radius, HALF)
    sx = paths_x if paths_x is not None else ShortestPaths(field, x, HALF, targets=verts)
    s0 = ShortestPaths(field, proxy.start, HALF, targets=verts)
    values = sx.times_to(verts) - s0.times_to(verts)
    bad = np.flatnonzero(np.diff(values) > 0)
    return MonotoneWitness(bad.size == 0, values, int(bad[0]) + 1 if bad.size else None)


def delta_h(field: WeightField, x, y, sector: SectorSpec, n_target: int, start=None,
            tail: float = DEFAULT_TAIL, details: bool = False):
    """``B_H^L(x, y) - B_H^R(x, y)`` with anchors on the half-plane L- and R-proxies from ``start``.

    ``start`` defaults to ``x``.  Returns ``None`` when either side has not
    settled at this scale; with ``details=True`` returns ``(value, sample_L, sample_R)``.
    """
    start = x if start is None else start
    x = require_domain(x, field.radius, HALF)
    y = require_domain(y, field.radius, HALF)
    start = require_domain(start, field.radius, HALF)
    from .order import arc_endpoint

    ends = [arc_endpoint(field, sector, n_target, s) for s in ("L", "R")]
    s_start = ShortestPaths(field, start, HALF, targets=ends)
    prox = {s: extremal_proxy(field, start, s, sector, n_target, HALF, paths=s_start) for s in ("L", "R")}
    anchors = {s: list(prox[s].path.vertices) for s in prox}
    union = anchors["L"] + anchors["R"]
    sx = s_start if start == x else ShortestPaths(field, x, HALF, targets=union)
    sy = s_start if start == y else ShortestPaths(field, y, HALF, targets=union)
    samples = {s: busemann_along(field, x, y, anchors[s], HALF, sx, sy, side=s, tail=tail) for s in prox}
    if samples["L"].converged and samples["R"].converged:
        value = samples["L"].converged_value - samples["R"].converged_value
    else:
        value = None
    return (value, samples["L"], samples["R"]) if details else value


@dataclass(frozen=True)
class RhoFit:
    rho: tuple
    residual: float


def fit_rho(samples) -> RhoFit:
    """Least-squares ``B(0, p) ~ rho . p`` over converged samples with ``x = 0``.

    The residual is ``max |B(0, p) - rho . p| / |p|_1`` over the probes.
    """
    rows, rhs = [], []
    for s in samples:
        if not s.converged:
            continue
        if tuple(s.x) != (0, 0) and tuple(s.y) == (0, 0):
            rows.append(s.x)
            rhs.append(-s.converged_value)
        else:
            rows.append(np.subtract(s.y, s.x))
            rhs.append(s.converged_value)
    a = np.array(rows, dtype=float).reshape(-1, 2)
    b = np.array(rhs, dtype=float)
    if len(a) < 3 or np.linalg.matrix_rank(a) < 2:
        raise DegenerateFitError("need at least three converged probes spanning the plane")
    rho, *_ = np.linalg.lstsq(a, b, rcond=None)
    resid = np.abs(a @ rho - b) / np.abs(a).sum(axis=1)
    return RhoFit((float(rho[0]), float(rho[1])), float(resid.max()))


def write_csv(rows, path) -> None:
    """Rows of ``(seed, x, y, side, restriction, value, converged_at_anchor_index)``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["seed", "x", "y", "side", "restriction", "value", "converged_at_anchor_index"])
        for seed, s in rows:
            w.writerow([seed, f"{s.x[0]} {s.x[1]}", f"{s.y[0]} {s.y[1]}", s.side, s.restriction,
                        "" if s.converged_value is None else repr(s.converged_value),
                        "" if s.converged_index is None else s.converged_index])

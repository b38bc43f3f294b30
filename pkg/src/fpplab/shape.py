"""Time constant, limit shape and tangent lines, estimated from passage times.

Direction ``theta`` is probed at the lattice point ``z = round(n * w_theta)``
and each replicate contributes ``T(0, z) / |z|_2``.  Dividing by ``|z|_2``
instead of ``n`` removes the O(1/n) rounding bias, so under unit weights the
estimate is exactly the l1 norm of ``z / |z|_2`` and the shape points
``z / T(0, z)`` sit exactly on the l1 sphere.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import InsufficientDataError, InvalidParameterError, OutOfDomainError
from .geodesic import ShortestPaths
from .lattice import TWO_PI, Point, SectorSpec
from .runner import replicate_map
from .weights import Distribution, make_field, replicate_seed

DEFAULT_BOX_FACTOR = 1.5
# hull points closer than this to a line through their neighbours count as collinear
COLLINEAR_TOL = 1e-12
MIN_TOL = 1e-12


def direction_grid(count: int = 64) -> np.ndarray:
    """``count`` equally spaced angles covering ``[0, pi/2]``, both ends included."""
    return np.linspace(0.0, math.pi / 2, count)


def lattice_target(theta: float, n: int) -> Point:
    return Point(math.floor(n * math.cos(theta) + 0.5), math.floor(n * math.sin(theta) + 0.5))


def box_radius(n: int, box_factor: float = DEFAULT_BOX_FACTOR) -> int:
    return max(int(math.ceil(box_factor * n)), n + 1)


def normal_ci(samples, level: float = 0.95) -> float:
    samples = np.asarray(samples, dtype=float)
    if samples.size < 2:
        raise InvalidParameterError("need at least two replicates for a confidence interval")
    sd = samples.std(ddof=1)
    return float(stats.norm.ppf(0.5 + level / 2) * sd / math.sqrt(samples.size))


@dataclass
class ShapeEstimate:
    directions: np.ndarray
    targets: list
    ghat: np.ndarray
    ci: np.ndarray
    n_used: int
    replicates: int
    samples: np.ndarray = field(repr=False, default=None)  # (replicates, directions)

    def index_of(self, theta: float) -> int:
        hits = np.flatnonzero(np.abs(self.directions - theta) < 1e-12)
        if hits.size == 0:
            raise InvalidParameterError(f"theta={theta} is not on the estimate's direction grid")
        return int(hits[0])

    def effective_angle(self, i: int) -> float:
        x, y = self.targets[i]
        return math.atan2(y, x) % TWO_PI


def _replicate_times(task):
    seed, dist, radius, targets = task
    f = make_field(radius, seed, dist)
    sp = ShortestPaths(f, (0, 0), targets=targets)
    return sp.times_to(targets)


def estimate_shape(dist: Distribution, n: int, replicates: int, seed_base: int = 0,
                   directions=None, box_factor: float = DEFAULT_BOX_FACTOR,
                   level: float = 0.95, workers: int = 1) -> ShapeEstimate:
    """Estimate ``g(w_theta)`` on a grid of directions from one run per replicate."""
    if replicates < 2:
        raise InvalidParameterError("replicates must be >= 2")
    directions = direction_grid() if directions is None else np.asarray(directions, dtype=float)
    targets = [lattice_target(t, n) for t in directions]
    if any(t == (0, 0) for t in targets):
        raise InvalidParameterError("n too small: a direction rounds to the origin")
    radius = box_radius(n, box_factor)
    if any(max(abs(t.x), abs(t.y)) > radius for t in targets):
        raise OutOfDomainError("target outside the box")
    norms = np.array([math.hypot(*t) for t in targets])
    tasks = [(replicate_seed(seed_base, r), dist, radius, targets) for r in range(replicates)]
    times = np.array(replicate_map(_replicate_times, tasks, workers))
    samples = times / norms
    ghat = samples.mean(axis=0)
    ci = np.array([normal_ci(samples[:, k], level) for k in range(len(directions))])
    return ShapeEstimate(directions, targets, ghat, ci, n, replicates, samples)


def estimate_g(dist: Distribution, theta: float, n: int, replicates: int, seed_base: int = 0,
               box_factor: float = DEFAULT_BOX_FACTOR, level: float = 0.95) -> tuple[float, float]:
    """``(ghat, ci)`` for the single direction ``theta``."""
    est = estimate_shape(dist, n, replicates, seed_base, [theta], box_factor, level)
    return float(est.ghat[0]), float(est.ci[0])


def shape_points(estimate: ShapeEstimate) -> list:
    """Boundary points ``z / (|z|_2 * ghat)``, one per direction."""
    if len(estimate.directions) == 0:
        raise InsufficientDataError("empty estimate")
    out = []
    for (x, y), g in zip(estimate.targets, estimate.ghat):
        s = math.hypot(x, y) * g
        out.append((x / s, y / s))
    return out


def symmetric_images(p) -> set:
    """The orbit of ``p`` under the eight lattice symmetries."""
    x, y = p
    return {(a, b) for a, b in [(x, y), (y, x)] for a, b in [(a, b), (-a, b), (a, -b), (-a, -b)]}


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list:
    """Counter-clockwise hull vertices (monotone chain), dropping near-collinear points."""
    pts = sorted(set(points))
    if len(pts) < 3:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= COLLINEAR_TOL:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= COLLINEAR_TOL:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _line_dual(a, b) -> np.ndarray:
    """The vector ``rho`` with ``rho . a = rho . b = 1``."""
    return np.linalg.solve(np.array([a, b], dtype=float), np.ones(2))


@dataclass(frozen=True)
class TangentLine:
    """Supporting line ``{r : r . rho = 1}`` of the estimated shape at ``point``."""

    rho: tuple
    contact_sector: SectorSpec
    point: tuple
    tol: float
    degenerate: bool = False


def fit_tangent(estimate: ShapeEstimate, theta: float, tol: float | None = None) -> TangentLine:
    """Supporting line of the symmetrized hull of the shape points at ``v_theta``.

    If the ray through ``v_theta`` hits a hull vertex whose two adjacent edges
    disagree by more than ``tol`` (a corner), ``rho`` is the average of the
    two edge duals and ``degenerate`` is set.  ``tol`` defaults to twice the
    CI half-width at ``theta``.
    """
    k = estimate.index_of(theta)
    if tol is None:
        tol = 2.0 * float(estimate.ci[k])
    tol = max(tol, MIN_TOL)
    base = shape_points(estimate)
    cloud = set()
    for p in base:
        cloud |= symmetric_images(p)
    hull = convex_hull(cloud)
    if len(hull) < 3:
        raise InsufficientDataError("shape hull is degenerate; use more directions")
    v = base[k]
    phi = math.atan2(v[1], v[0]) % TWO_PI
    angles = [math.atan2(h[1], h[0]) % TWO_PI for h in hull]
    m = len(hull)
    degenerate = False
    rho = None
    for i in range(m):
        if abs((angles[i] - phi + math.pi) % TWO_PI - math.pi) < 1e-12:
            prev_v, here, next_v = hull[i - 1], hull[i], hull[(i + 1) % m]
            rho_in = _line_dual(prev_v, here)
            rho_out = _line_dual(here, next_v)
            rho = 0.5 * (rho_in + rho_out)
            degenerate = bool(abs(rho_in @ next_v - 1) > tol or abs(rho_out @ prev_v - 1) > tol)
            break
    if rho is None:
        for i in range(m):
            a, b = hull[i], hull[(i + 1) % m]
            span = (angles[(i + 1) % m] - angles[i]) % TWO_PI
            if (phi - angles[i]) % TWO_PI <= span:
                rho = _line_dual(a, b)
                break
    sector = _contact_sector(cloud, rho, theta, phi, tol)
    return TangentLine(tuple(float(c) for c in rho), sector, (float(v[0]), float(v[1])), tol, degenerate)


def _contact_sector(cloud, rho, theta, phi, tol) -> SectorSpec:
    pts = sorted(cloud, key=lambda p: math.atan2(p[1], p[0]) % TWO_PI)
    angs = [math.atan2(p[1], p[0]) % TWO_PI for p in pts]
    start = min(range(len(pts)), key=lambda i: abs((angs[i] - phi + math.pi) % TWO_PI - math.pi))
    m = len(pts)

    def touching(i):
        return abs(float(np.dot(rho, pts[i % m])) - 1.0) <= tol

    lo = hi = 0.0
    step = 1
    while step < m and touching(start - step):
        lo = -((angs[start] - angs[(start - step) % m]) % TWO_PI)
        step += 1
    step = 1
    while step < m and touching(start + step):
        hi = (angs[(start + step) % m] - angs[start]) % TWO_PI
        step += 1
    # phi is the angle of the probed lattice point, which may differ from theta by O(1/n)
    theta = float(theta)
    return SectorSpec(theta, min(theta, phi + lo), max(theta, phi + hi))


def write_csv(estimate: ShapeEstimate, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "ghat", "ci", "n", "replicates"])
        for t, g, c in zip(estimate.directions, estimate.ghat, estimate.ci):
            w.writerow([repr(float(t)), repr(float(g)), repr(float(c)), estimate.n_used, estimate.replicates])


def write_svg(estimate: ShapeEstimate, path) -> None:
    """Polar plot of the symmetrized shape boundary."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    pts = set()
    for p in shape_points(estimate):
        pts |= symmetric_images(p)
    pts = sorted(pts, key=lambda p: math.atan2(p[1], p[0]))
    ang = [math.atan2(y, x) for x, y in pts]
    rad = [math.hypot(x, y) for x, y in pts]
    fig = plt.figure(figsize=(5, 5))
    ax = fig.add_subplot(projection="polar")
    ax.plot(ang + ang[:1], rad + rad[:1], lw=1.2)
    ax.set_title(f"estimated limit shape, n={estimate.n_used}, reps={estimate.replicates}")
    fig.savefig(path, format="svg")
    plt.close(fig)

"""Reproducible Monte Carlo experiments and the reports they produce.

Each experiment takes an :class:`ExperimentConfig` and returns an
:class:`ExperimentReport`.  Replicate ``r`` at scale ``n`` always uses the
seed ``replicate_seed(seed_base, r, stream=n)``, so a report is a pure function
of its config: adding scales or workers never changes existing samples.
"""

from __future__ import annotations

import csv
import datetime
import json
import logging
import math
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .busemann import busemann_along, delta_h, halfplane_monotone_check
from .config import ExperimentConfig
from .errors import ConfigError, InvalidParameterError
from .geodesic import ShortestPaths
from .lattice import FULL, HALF, DualEdge, Point, dual_of, primal_of, require_domain
from .order import (
    COALESCED, DETERMINATE, LEFT, RIGHT, BY_RIGHTMOST, arc_endpoint, backward_cluster,
    coalescence_point, compare, extremal_proxy, reverse_relation,
)
from .runner import replicate_map
from .shape import box_radius, estimate_shape, fit_tangent
from .shape import write_svg as shape_svg
from .stats import mean_interval, nondecreasing, strictly_decreasing, wilson_interval
from .weights import HORIZONTAL, VERTICAL, WeightField, make_field, replicate_seed

log = logging.getLogger(__name__)

TREND_ALPHA = 0.01


def _git_hash() -> str:
    try:
        out = subprocess.run(["git", "rev-parse", "HEAD"], cwd=Path(__file__).parent,
                             capture_output=True, text=True, timeout=5)
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def _provenance() -> dict:
    from importlib.metadata import PackageNotFoundError, version

    try:
        ver = version("fpplab")
    except PackageNotFoundError:
        ver = "unknown"
    return {
        "package": "fpplab",
        "version": ver,
        "git": _git_hash(),
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
    }


@dataclass
class ExperimentReport:
    """Statistics, verdicts and invariant flags of one run, plus the per-replicate rows.

    ``verdicts`` are statistical trend outcomes and are reported only;
    ``invariants`` are pathwise facts whose failure means a bug (CLI exit 2).
    """

    name: str
    config: dict
    stats: list
    verdicts: dict
    invariants: dict
    header: list
    rows: list = field(repr=False)
    extra: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=_provenance)
    plotter: object = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return all(self.invariants.values())

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "config": self.config,
            "stats": self.stats,
            "verdicts": self.verdicts,
            "invariants": self.invariants,
            "extra": self.extra,
            "provenance": self.provenance,
        }

    def write(self, out_dir, plot: bool = True) -> dict:
        """Write ``report.json``, ``samples.csv`` and, if available, ``plot.svg``; return the paths."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {"report": out / "report.json", "samples": out / "samples.csv"}
        paths["report"].write_text(json.dumps(self.to_dict(), indent=2, default=_jsonable) + "\n")
        with open(paths["samples"], "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.header)
            w.writerows([_cell(v) for v in row] for row in self.rows)
        if plot and self.plotter is not None:
            paths["plot"] = out / "plot.svg"
            self.plotter(paths["plot"])
        return paths


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    return v


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, (tuple, set)):
        return list(v)
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _proportion_stats(n, k, total, level, **extra) -> dict:
    lo, hi = wilson_interval(k, total, level) if total else (None, None)
    return {"n": n, **extra, "count": k, "replicates": total,
            "mean": k / total if total else None, "ci": [lo, hi]}


def _trend_plot(stats, ylabel, key=None):
    def draw(path):
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 3.5))
        groups = sorted({s.get(key) for s in stats}) if key else [None]
        for g in groups:
            sub = [s for s in stats if (s.get(key) == g if key else True) and s["mean"] is not None]
            ns = [s["n"] for s in sub]
            ax.errorbar(ns, [s["mean"] for s in sub],
                        yerr=[[s["mean"] - s["ci"][0] for s in sub], [s["ci"][1] - s["mean"] for s in sub]],
                        marker="o", capsize=3, label=f"{key}={g}" if key else None)
        ax.set_xscale("log", base=2)
        ax.set_xlabel("n")
        ax.set_ylabel(ylabel)
        if key:
            ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg")
        plt.close(fig)

    return draw


def _tasks(cfg: ExperimentConfig, n: int, *payload):
    return [(n, r, replicate_seed(cfg.seed_base, r, stream=n), cfg.dist, cfg.box_factor, *payload)
            for r in range(cfg.replicates)]


# ----------------------------------------------------------------------------- midpoint


def midpoint_indicator(field: WeightField, n: int) -> bool:
    """Is ``floor(n/2) e1`` on the geodesic from 0 to ``n e1``?"""
    target = require_domain((n, 0), field.radius)
    sp = ShortestPaths(field, (0, 0), targets=[target])
    return sp.on_path((n // 2, 0), target)


def _midpoint_rep(task):
    n, r, seed, dist, box_factor = task
    return midpoint_indicator(make_field(box_radius(n, box_factor), seed, dist), n)


def midpoint_probability(cfg: ExperimentConfig) -> ExperimentReport:
    if box_radius(cfg.n_values[-1], cfg.box_factor) < cfg.n_values[-1]:
        raise ConfigError("box too small for the largest n")
    rows, stats, counts = [], [], []
    for n in cfg.n_values:
        tasks = _tasks(cfg, n)
        hits = replicate_map(_midpoint_rep, tasks, cfg.workers)
        rows += [(n, t[1], t[2], int(h)) for t, h in zip(tasks, hits)]
        k = int(sum(hits))
        counts.append((k, cfg.replicates))
        stats.append(_proportion_stats(n, k, cfg.replicates, cfg.level))
    trend = strictly_decreasing(counts, TREND_ALPHA)
    # the indicator must be a pure function of the field
    again = _midpoint_rep(_tasks(cfg, cfg.n_values[0])[0])
    return ExperimentReport(
        "midpoint", cfg.echo(), stats,
        {"strictly_decreasing": trend.holds, "trend_alpha": TREND_ALPHA,
         "difference_lower_bounds": list(trend.lower_bounds)},
        {"replicate_determinism": bool(again) == bool(rows[0][3])},
        ["n", "replicate", "seed", "midpoint_on_geodesic"], rows,
        plotter=_trend_plot(stats, "P(midpoint on geodesic)"))


# ----------------------------------------------------------------------------- coalescence


def _coalescence_rep(task):
    n, r, seed, dist, box_factor, separations, sector, restriction = task
    f = make_field(box_radius(n, box_factor), seed, dist)
    a = arc_endpoint(f, sector, n, "L")
    base = ShortestPaths(f, (0, 0), restriction, targets=[a]).path_to(a)
    out = []
    for d in separations:
        other = ShortestPaths(f, (d, 0), restriction, targets=[a]).path_to(a) if d else base
        z = coalescence_point(base, other)
        out.append((d, z is not None and 2 * z.y <= n, None if z is None else z.y))
    return out


def coalescence_curve(cfg: ExperimentConfig) -> ExperimentReport:
    """Fraction of replicates whose L-proxies from 0 and ``d e1`` meet by line ``n/2``."""
    rows, stats = [], []
    counts = {d: [] for d in cfg.separations}
    for n in cfg.n_values:
        tasks = _tasks(cfg, n, cfg.separations, cfg.sector, cfg.restriction)
        res = replicate_map(_coalescence_rep, tasks, cfg.workers)
        for t, per_d in zip(tasks, res):
            rows += [(n, d, t[1], t[2], int(c), zy) for d, c, zy in per_d]
        for j, d in enumerate(cfg.separations):
            k = sum(int(per_d[j][1]) for per_d in res)
            counts[d].append((k, cfg.replicates))
            stats.append(_proportion_stats(n, k, cfg.replicates, cfg.level, d=d))
    trends = {d: nondecreasing(c, TREND_ALPHA) for d, c in counts.items()}
    zero_ok = all(s["count"] == s["replicates"] for s in stats if s["d"] == 0)
    return ExperimentReport(
        "coalescence", cfg.echo(), stats,
        {"nondecreasing": {str(d): t.holds for d, t in trends.items()}, "trend_alpha": TREND_ALPHA,
         "difference_lower_bounds": {str(d): list(t.lower_bounds) for d, t in trends.items()}},
        {"zero_separation_coalesces": zero_ok},
        ["n_target", "d", "replicate", "seed", "coalesced", "meet_line"], rows,
        plotter=_trend_plot(stats, "P(coalesced by n/2)", key="d"))


# ----------------------------------------------------------------------------- half vs full


def half_full_pair(field: WeightField, sector, n: int) -> tuple[bool, bool]:
    """``(eligible, equal)``: does the full-plane L-proxy from 0 stay in the upper half-plane, and if so is it the half-plane one?"""
    full = extremal_proxy(field, (0, 0), "L", sector, n, FULL).path
    if any(p.y < 0 for p in full.vertices):
        return False, False
    half = extremal_proxy(field, (0, 0), "L", sector, n, HALF).path
    return True, half.vertices == full.vertices


def _half_full_rep(task):
    n, r, seed, dist, box_factor, sector = task
    return half_full_pair(make_field(box_radius(n, box_factor), seed, dist), sector, n)


def half_full_equality(cfg: ExperimentConfig) -> ExperimentReport:
    """Among replicates whose full-plane L-proxy stays in the upper half-plane, how often it equals the half-plane one."""
    rows, stats, counts = [], [], []
    for n in cfg.n_values:
        tasks = _tasks(cfg, n, cfg.sector)
        res = replicate_map(_half_full_rep, tasks, cfg.workers)
        rows += [(n, t[1], t[2], int(e), int(q)) for t, (e, q) in zip(tasks, res)]
        eligible = sum(e for e, _ in res)
        k = sum(q for _, q in res)
        counts.append((k, max(eligible, 1)))
        stats.append(_proportion_stats(n, k, eligible, cfg.level, total_replicates=cfg.replicates))
    trend = nondecreasing(counts, TREND_ALPHA)
    return ExperimentReport(
        "half-full", cfg.echo(), stats,
        {"nondecreasing": trend.holds, "trend_alpha": TREND_ALPHA,
         "difference_lower_bounds": list(trend.lower_bounds)},
        {"equal_only_if_eligible": all(e or not q for *_, e, q in rows)},
        ["n_target", "replicate", "seed", "stays_in_half_plane", "equal"], rows,
        plotter=_trend_plot(stats, "P(full = half | full stays up)"))


# ----------------------------------------------------------------------------- competition


@dataclass
class Competition:
    """Two-source competition on a box: ``labels[j, i]`` is 0 or 1 for the winner at ``(i - r, j - r)``."""

    sources: tuple
    labels: np.ndarray
    ties: int
    interface: list
    connected: tuple
    ends: list

    @property
    def sizes(self) -> tuple:
        ones = int(self.labels.sum())
        return self.labels.size - ones, ones


def competition(field: WeightField, x, y) -> Competition:
    """Partition the box by the nearer source; ties go to the source first in ``(y, x)`` order."""
    x = require_domain(x, field.radius)
    y = require_domain(y, field.radius)
    if x == y:
        raise InvalidParameterError("competition needs two distinct sources")
    w = field.width
    tx = ShortestPaths(field, x).dist.reshape(w, w)
    ty = ShortestPaths(field, y).dist.reshape(w, w)
    tie = tx == ty
    first_wins_ties = 0 if (x.y, x.x) < (y.y, y.x) else 1
    labels = np.where(tx < ty, 0, 1).astype(np.int8)
    labels[tie] = first_wins_ties
    ties = int(tie.sum())
    if ties:
        log.info("competition: %d tied vertices assigned to source %d", ties, first_wins_ties)
    iface = interface_edges(labels, field.radius)
    conn = tuple(ndimage.label(labels == c)[1] == 1 for c in (0, 1))
    return Competition((x, y), labels, ties, iface, conn, interface_ends(iface))


def interface_edges(labels: np.ndarray, radius: int) -> list:
    """Dual edges crossing the primal edges whose endpoints have different labels."""
    out = []
    hj, hi = np.nonzero(labels[:, 1:] != labels[:, :-1])
    out += [dual_of_edge(i - radius, j - radius, HORIZONTAL) for j, i in zip(hj, hi)]
    vj, vi = np.nonzero(labels[1:, :] != labels[:-1, :])
    out += [dual_of_edge(i - radius, j - radius, VERTICAL) for j, i in zip(vj, vi)]
    return sorted(out)


def dual_of_edge(x: int, y: int, orientation: int) -> DualEdge:
    from .weights import EdgeId

    return dual_of(EdgeId(int(x), int(y), orientation))


def interface_ends(edges) -> list:
    """Dual vertices of degree one in the interface, as real coordinates."""
    deg = {}
    for d in edges:
        for v in d.vertex_names():
            deg[v] = deg.get(v, 0) + 1
    return sorted((v[0] + 0.5, v[1] + 0.5) for v, k in deg.items() if k == 1)


def _competition_rep(task):
    n, r, seed, dist, box_factor, sources = task
    c = competition(make_field(n, seed, dist), *sources)
    mid = ((sources[0][0] + sources[1][0]) / 2, (sources[0][1] + sources[1][1]) / 2)
    angles = [math.atan2(e[1] - mid[1], e[0] - mid[0]) for e in c.ends]
    return c.sizes, len(c.interface), c.ties, c.connected, angles


def competition_interface(cfg: ExperimentConfig) -> ExperimentReport:
    """Two-source competition on ``[-n, n]^2`` for each ``n``: cluster sizes, interface length and end directions."""
    if len(cfg.sources) != 2 or cfg.sources[0] == cfg.sources[1]:
        raise ConfigError("competition needs exactly two distinct sources")
    rows, stats = [], []
    partition_ok = connected_ok = True
    for n in cfg.n_values:
        if any(max(abs(p[0]), abs(p[1])) > n for p in cfg.sources):
            raise ConfigError(f"sources lie outside the box of radius {n}")
        tasks = _tasks(cfg, n, cfg.sources)
        res = replicate_map(_competition_rep, tasks, cfg.workers)
        lengths = []
        for t, (sizes, length, ties, conn, angles) in zip(tasks, res):
            partition_ok &= sum(sizes) == (2 * n + 1) ** 2
            connected_ok &= all(conn)
            lengths.append(length)
            rows.append((n, t[1], t[2], sizes[0], sizes[1], length, ties, int(all(conn)),
                         " ".join(repr(a) for a in angles)))
        entry = {"n": n, "replicates": cfg.replicates, "mean_interface_length": float(np.mean(lengths))}
        if cfg.replicates > 1:
            m, lo, hi = mean_interval(np.array(lengths) / n, cfg.level)
            entry.update(mean=m, ci=[lo, hi], statistic="interface_length / n")
        stats.append(entry)
    return ExperimentReport(
        "competition", cfg.echo(), stats, {},
        {"partition": bool(partition_ok), "clusters_connected": bool(connected_ok)},
        ["n", "replicate", "seed", "size_first", "size_second", "interface_length", "ties", "connected",
         "end_angles"], rows)


# ----------------------------------------------------------------------------- ferromagnet


def ferromagnet_weight_map(couplings: dict, radius: int) -> WeightField:
    """Weights ``t_e = J`` of the dual edge crossing ``e``, for every edge of ``[-radius, radius]^2``."""
    w = 2 * radius + 1
    horizontal = np.empty((w, w - 1))
    vertical = np.empty((w - 1, w))
    for arr, o in ((horizontal, HORIZONTAL), (vertical, VERTICAL)):
        for j in range(arr.shape[0]):
            for i in range(arr.shape[1]):
                d = dual_of_edge(i - radius, j - radius, o)
                if d not in couplings:
                    raise InvalidParameterError(f"missing coupling for dual edge {d}")
                value = couplings[d]
                if not value > 0:
                    raise InvalidParameterError(f"coupling on {d} must be positive, got {value}")
                arr[j, i] = value
    return WeightField.from_arrays(radius, horizontal, vertical)


def field_couplings(field: WeightField) -> dict:
    """Inverse of :func:`ferromagnet_weight_map`."""
    from .weights import weight_at

    return {dual_of(e): weight_at(field, e) for e in field.edges()}


def dual_edges(radius: int) -> list:
    """Every dual edge crossing a primal edge of the box."""
    from .weights import EdgeId

    r = radius
    out = [dual_of(EdgeId(x, y, HORIZONTAL)) for y in range(-r, r + 1) for x in range(-r, r)]
    out += [dual_of(EdgeId(x, y, VERTICAL)) for y in range(-r, r) for x in range(-r, r + 1)]
    assert all(dual_of(primal_of(d)) == d for d in out)
    return out


# ----------------------------------------------------------------------------- shape


def shape_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Time-constant estimate on 64 directions at the largest scale, plus the tangent at ``sector.theta``."""
    n = cfg.n_values[-1]
    est = estimate_shape(cfg.dist, n, cfg.replicates, cfg.seed_base, box_factor=cfg.box_factor,
                         level=cfg.level, workers=cfg.workers)
    theta = cfg.sector.theta
    k = int(np.argmin(np.abs(est.directions - theta)))
    tan = fit_tangent(est, float(est.directions[k]), cfg.tolerances.get("tangent"))
    stats = [{"n": n, "theta": float(t), "mean": float(g), "ci": [float(g - c), float(g + c)],
              "replicates": est.replicates} for t, g, c in zip(est.directions, est.ghat, est.ci)]
    rows = [(repr(float(t)), repr(float(g)), repr(float(c)), n, est.replicates)
            for t, g, c in zip(est.directions, est.ghat, est.ci)]
    extra = {"tangent": {"theta": float(est.directions[k]), "rho": list(tan.rho),
                         "contact_sector": [tan.contact_sector.theta1, tan.contact_sector.theta2],
                         "degenerate": tan.degenerate, "tol": tan.tol}}
    return ExperimentReport(
        "shape", cfg.echo(), stats, {},
        {"positive_estimates": bool(np.all(est.ghat > 0)),
         "tangent_supports_point": abs(float(np.dot(tan.rho, tan.point)) - 1) <= tan.tol + 1e-12},
        ["theta", "ghat", "ci", "n", "replicates"], rows, extra,
        plotter=lambda path: shape_svg(est, path))


# ----------------------------------------------------------------------------- Busemann

BUSEMANN_POINTS = (Point(0, 0), Point(1, 0), Point(0, 1), Point(-1, 1))


def _busemann_rep(task):
    n, r, seed, dist, box_factor, sector = task
    f = make_field(box_radius(n, box_factor), seed, dist)
    rows = []
    checks = {"bound": True, "antisymmetry": True, "additivity": True, "monotone": True}
    converged = 0
    for restriction in (FULL, HALF):
        proxy = extremal_proxy(f, (0, 0), "L", sector, n, restriction)
        anchors = list(proxy.path.vertices)
        runs = {p: ShortestPaths(f, p, restriction, targets=anchors + list(BUSEMANN_POINTS))
                for p in BUSEMANN_POINTS}
        b = {}
        for p in BUSEMANN_POINTS:
            for q in BUSEMANN_POINTS:
                s = busemann_along(f, p, q, anchors, restriction, runs[p], runs[q], side="L")
                b[p, q] = s
                checks["bound"] &= bool(np.all(np.abs(s.values) <= runs[p].time_to(q)))
                if p != q:
                    rows.append((seed, f"{p[0]} {p[1]}", f"{q[0]} {q[1]}", "L", restriction,
                                 s.converged_value, s.converged_index))
                    converged += s.converged
        for (p, q), s in b.items():
            if s.converged and b[q, p].converged:
                checks["antisymmetry"] &= s.converged_value == -b[q, p].converged_value
        for p in BUSEMANN_POINTS:
            for q in BUSEMANN_POINTS:
                for t in BUSEMANN_POINTS:
                    trio = (b[p, q], b[q, t], b[p, t])
                    if all(s.converged for s in trio):
                        i = max(s.converged_index for s in trio)
                        checks["additivity"] &= trio[0].values[i] + trio[1].values[i] == trio[2].values[i]
        if restriction == HALF:
            for p in BUSEMANN_POINTS:
                checks["monotone"] &= halfplane_monotone_check(f, p, proxy, runs[p]).ok
    return rows, checks, converged


def busemann_invariants(cfg: ExperimentConfig) -> ExperimentReport:
    """Exact Busemann invariants on converged samples, full- and half-plane, at the largest scale."""
    n = cfg.n_values[-1]
    tasks = _tasks(cfg, n, cfg.sector)
    res = replicate_map(_busemann_rep, tasks, cfg.workers)
    rows = [row for rws, _, _ in res for row in rws]
    checks = {k: all(c[k] for _, c, _ in res) for k in res[0][1]}
    total = len(rows)
    conv = sum(c for *_, c in res)
    stats = [_proportion_stats(n, conv, total, cfg.level, statistic="converged fraction")]
    return ExperimentReport(
        "busemann", cfg.echo(), stats, {}, checks,
        ["seed", "x", "y", "side", "restriction", "value", "converged_at_anchor_index"], rows)


def _delta_rep(task):
    n, r, seed, dist, box_factor, sector = task
    f = make_field(box_radius(n, box_factor), seed, dist)
    value, sl, sr = delta_h(f, (0, 0), (1, 0), sector, n, details=True)
    return value, sl.converged_index, sr.converged_index


def delta_h_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Distribution of ``Delta_H(0, e1)`` at the largest scale."""
    n = cfg.n_values[-1]
    tasks = _tasks(cfg, n, cfg.sector)
    res = replicate_map(_delta_rep, tasks, cfg.workers)
    rows = [(n, t[1], t[2], v, il, ir) for t, (v, il, ir) in zip(tasks, res)]
    vals = np.array([v for v, *_ in res if v is not None])
    level = cfg.tolerances.get("delta_level", 0.99)
    entry = {"n": n, "replicates": cfg.replicates, "count": int(vals.size)}
    verdicts = {}
    if vals.size >= 2:
        m, lo, hi = mean_interval(vals, level)
        se = float(vals.std(ddof=1) / math.sqrt(vals.size))
        entry.update(mean=m, ci=[lo, hi], level=level, sd=float(vals.std(ddof=1)), se=se,
                     fraction_negative=float(np.mean(vals < 0)), fraction_zero=float(np.mean(vals == 0)))
        verdicts = {"mean_nonpositive_3sigma": m <= 3 * se, "ci_contains_zero": lo <= 0 <= hi}
    return ExperimentReport(
        "delta-h", cfg.echo(), [entry], verdicts, {"some_converged": vals.size > 0},
        ["n_target", "replicate", "seed", "delta", "left_converged_at", "right_converged_at"], rows)


# ----------------------------------------------------------------------------- ordering


def ordering_verdicts(f: WeightField, n: int, d: int, sector, restriction=HALF, sides=("L", "R")) -> dict:
    """Compare the ``sides[0]``-proxy from 0 with the ``sides[1]``-proxy from ``d e1`` on the lines ``n/2..n``."""
    g1 = extremal_proxy(f, (0, 0), sides[0], sector, n, restriction).path
    g2 = extremal_proxy(f, (d, 0), sides[1], sector, n, restriction).path
    lines = (n // 2, n)
    v = compare(g1, g2, lines)
    back = compare(g2, g1, lines)
    mirror = compare(g1, g2, lines, by=BY_RIGHTMOST)
    expected_mirror = v.relation if v.relation == COALESCED else reverse_relation(v.relation)
    return {
        "relation": v.relation,
        "stable_line": v.first_stable_line,
        "reverse": back.relation,
        "mirror": mirror.relation,
        "determinate": v.relation in DETERMINATE,
        "dual_ok": back.relation == reverse_relation(v.relation) and mirror.relation == expected_mirror,
    }


def _ordering_rep(task):
    n, r, seed, dist, box_factor, d, sector, restriction = task
    # even replicates aim at opposite arc ends, odd ones at a shared end (mostly coalescing)
    sides = ("L", "R") if r % 2 == 0 else ("L", "L")
    out = ordering_verdicts(make_field(box_radius(n, box_factor), seed, dist), n, d, sector, restriction, sides)
    out["pairing"] = "".join(sides)
    return out


def ordering_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    n = cfg.n_values[-1]
    d = cfg.separations[0]
    restriction = cfg.restriction
    tasks = _tasks(cfg, n, d, cfg.sector, restriction)
    res = replicate_map(_ordering_rep, tasks, cfg.workers)
    rows = [(n, t[1], t[2], o["pairing"], o["relation"], o["reverse"], o["mirror"], o["stable_line"],
             int(o["dual_ok"])) for t, o in zip(tasks, res)]
    det = [o for o in res if o["determinate"]]
    frac = len(det) / len(res)
    dual = sum(o["dual_ok"] for o in det) / len(det) if det else 1.0
    stats = [_proportion_stats(n, len(det), len(res), cfg.level, statistic="determinate fraction",
                               left=sum(o["relation"] == LEFT for o in res),
                               right=sum(o["relation"] == RIGHT for o in res),
                               coalesced=sum(o["relation"] == COALESCED for o in res))]
    need = cfg.tolerances.get("totality", 0.95)
    return ExperimentReport(
        "ordering", cfg.echo(), stats,
        {"totality": frac >= need, "totality_threshold": need, "determinate_fraction": frac,
         "duality_agreement": dual},
        {"duality": dual == 1.0},
        ["n_target", "replicate", "seed", "pairing", "relation", "reverse", "mirror", "stable_line",
         "dual_ok"], rows)


# ----------------------------------------------------------------------------- backward clusters


def _cluster_rep(task):
    n, r, seed, dist, box_factor, sector = task
    f = make_field(box_radius(n, box_factor), seed, dist)
    h = max(1, n // 4)
    # probes sit below the origin, so this is a full-plane question
    probes = [(x, y) for y in range(-h, 1) for x in range(-n // 2, n // 2 + 1)]
    c = backward_cluster(f, (0, 0), probes, sector, n, FULL)
    return len(c), -min(p[1] for p in c), max(abs(p[0]) for p in c)


def cluster_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Size of the backward cluster of the origin among probes below it, per scale."""
    rows, stats = [], []
    for n in cfg.n_values:
        tasks = _tasks(cfg, n, cfg.sector)
        res = replicate_map(_cluster_rep, tasks, cfg.workers)
        rows += [(n, t[1], t[2], *o) for t, o in zip(tasks, res)]
        sizes = np.array([o[0] for o in res], dtype=float)
        entry = {"n": n, "replicates": cfg.replicates, "mean": float(sizes.mean()), "max": int(sizes.max())}
        if cfg.replicates > 1:
            m, lo, hi = mean_interval(sizes, cfg.level)
            entry["ci"] = [lo, hi]
        stats.append(entry)
    return ExperimentReport(
        "cluster", cfg.echo(), stats, {},
        {"contains_origin": all(row[3] >= 1 for row in rows)},
        ["n_target", "replicate", "seed", "size", "depth", "width"], rows)


EXPERIMENTS = {
    "midpoint": midpoint_probability,
    "coalescence": coalescence_curve,
    "half-full": half_full_equality,
    "competition": competition_interface,
    "shape": shape_experiment,
    "busemann": busemann_invariants,
    "delta-h": delta_h_experiment,
    "ordering": ordering_experiment,
    "cluster": cluster_experiment,
}


def run_experiment(name: str, cfg: ExperimentConfig) -> ExperimentReport:
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    return EXPERIMENTS[name](cfg)

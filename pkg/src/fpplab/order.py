"""Ordering of geodesics, finite extremal-geodesic proxies, coalescence and backward clusters.

Convention: ``g1 < g2`` (``left-precedes``) when ``g2`` is asymptotically
to the left of ``g1``, i.e. on every inspected line ``L_n`` the left-most
vertex of ``g2`` is at or to the left of the left-most vertex of ``g1``.
The mirror order compares right-most vertices and asks ``g2`` to be at or to
the right; on non-coalesced pairs it reverses every verdict.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, InvalidParameterError, RangeError
from .geodesic import Geodesic, ShortestPaths, geodesic_tree
from .lattice import FULL, Point, SectorSpec, require_domain, sector_arc
from .weights import WeightField

LEFT = "left-precedes"
RIGHT = "right-precedes"
COALESCED = "coalesced"
UNDETERMINED = "undetermined"
DETERMINATE = (LEFT, RIGHT, COALESCED)

BY_LEFTMOST = "leftmost"
BY_RIGHTMOST = "rightmost"
BY_FIRST = "first"


@dataclass(frozen=True)
class OrderVerdict:
    relation: str
    first_stable_line: int


def reverse_relation(relation: str) -> str:
    return {LEFT: RIGHT, RIGHT: LEFT}.get(relation, relation)


def crossings(g: Geodesic, n: int) -> list:
    """x-coordinates of the vertices of ``g`` on ``L_n``, in path order."""
    return [p[0] for p in g.vertices if p[1] == n]


def _marker(g: Geodesic, n: int, by: str) -> int:
    xs = crossings(g, n)
    if not xs:
        raise RangeError(f"path misses line L_{n}")
    if by == BY_LEFTMOST:
        return min(xs)
    if by == BY_RIGHTMOST:
        return max(xs)
    if by == BY_FIRST:
        return xs[0]
    raise InvalidParameterError(f"unknown comparison {by!r}")


def coalescence_point(g1: Geodesic, g2: Geodesic):
    """First vertex of the longest common suffix, or ``None`` if the paths end apart."""
    a, b = g1.vertices, g2.vertices
    k = 0
    while k < min(len(a), len(b)) and a[-1 - k] == b[-1 - k]:
        k += 1
    return a[-k] if k else None


def compare(g1: Geodesic, g2: Geodesic, line_range, by: str = BY_LEFTMOST) -> OrderVerdict:
    """Order two paths on the lines ``n_lo..n_hi``.

    ``by`` selects the marker per line: ``leftmost`` (the defining order),
    ``first`` (first visit along the path; an equivalent characterization) or
    ``rightmost`` (the mirror order, which should return reversed verdicts).
    """
    lo, hi = line_range
    if lo > hi:
        raise InvalidParameterError("empty line range")
    lines = range(lo, hi + 1)
    m1 = np.array([_marker(g1, n, by) for n in lines])
    m2 = np.array([_marker(g2, n, by) for n in lines])
    same = np.array([set(crossings(g1, n)) == set(crossings(g2, n)) for n in lines])
    if by == BY_RIGHTMOST:
        # mirror: g1 precedes g2 when g2 is at or to the right
        g1_first, g2_first = m2 >= m1, m1 >= m2
    else:
        g1_first, g2_first = m2 <= m1, m1 <= m2

    if same[-1] and coalescence_point(g1, g2) is not None:
        return OrderVerdict(COALESCED, lo + _stable_from(same))
    if g1_first.all() and g2_first.all():
        return OrderVerdict(COALESCED, lo)
    if g1_first.all():
        return OrderVerdict(LEFT, lo)
    if g2_first.all():
        return OrderVerdict(RIGHT, lo)
    return OrderVerdict(UNDETERMINED, lo + min(_stable_from(g1_first), _stable_from(g2_first)))


def _stable_from(flags: np.ndarray) -> int:
    """Index from which ``flags`` is True through the end (len(flags) if the last is False)."""
    k = len(flags)
    while k > 0 and flags[k - 1]:
        k -= 1
    return k


def order_flips(g1: Geodesic, g2: Geodesic, line_range) -> list:
    """Strict order reversals between consecutive lines, with an ``L_0`` touch flag.

    Two geodesics from one vertex of ``L_0`` can only swap strict left-most
    order between lines ``n < n'`` if one of them returns to ``L_0`` between
    its left-most visits of ``L_n`` and ``L_{n'}``.  Each entry is
    ``(n, n', touches_L0)``.
    """
    lo, hi = line_range
    out = []
    prev = None
    for n in range(lo, hi + 1):
        a, b = _marker(g1, n, BY_LEFTMOST), _marker(g2, n, BY_LEFTMOST)
        sign = (a > b) - (a < b)
        if sign == 0:
            continue
        if prev is not None and sign != prev[1]:
            out.append((prev[0], n, _touches_l0(g1, prev[0], n) or _touches_l0(g2, prev[0], n)))
        prev = (n, sign)
    return out


def _touches_l0(g: Geodesic, n: int, n2: int) -> bool:
    verts = g.vertices

    def leftmost_index(k):
        x = _marker(g, k, BY_LEFTMOST)
        return verts.index(Point(x, k))

    i, j = sorted((leftmost_index(n), leftmost_index(n2)))
    return any(p[1] == 0 for p in verts[i:j + 1])


@dataclass(frozen=True)
class ExtremalProxy:
    """Finite stand-in for the left-/right-most geodesic from ``start`` in ``sector``."""

    side: str
    start: Point
    path: Geodesic
    n_target: int
    sector: SectorSpec
    restriction: str = FULL

    @property
    def target(self) -> Point:
        return self.path.end


def arc_endpoint(field: WeightField, sector: SectorSpec, n_target: int, side: str) -> Point:
    if side not in ("L", "R"):
        raise InvalidParameterError("side must be 'L' or 'R'")
    arc = sector_arc(sector, n_target, 0.0, field.radius)
    if not arc:
        raise InsufficientDataError(f"sector arc on L_{n_target} is empty inside the box")
    return arc[0] if side == "L" else arc[-1]


def extremal_proxy(field: WeightField, x, side: str, sector: SectorSpec, n_target: int,
                   restriction: str = FULL, paths: ShortestPaths | None = None) -> ExtremalProxy:
    """Geodesic from ``x`` to the left-most (``L``) or right-most (``R``) point of the sector arc on ``L_n_target``.

    ``paths`` may be a run from ``x`` in the same restriction that already
    settled the arc; otherwise one is computed.
    """
    target = arc_endpoint(field, sector, n_target, side)
    x = require_domain(x, field.radius, restriction)
    if paths is None:
        paths = ShortestPaths(field, x, restriction, targets=[target])
    elif paths.root != x or paths.restriction != restriction:
        raise InvalidParameterError("precomputed paths do not match start/restriction")
    return ExtremalProxy(side, x, paths.path_to(target), n_target, sector, restriction)


def v_proxy(field: WeightField, x, sector: SectorSpec, n: int, eps: float, restriction: str = FULL) -> list:
    """Finite proxy of ``V_x(n)``: leaves on ``L_n`` of the geodesic tree from ``x`` to the widened arc."""
    arc = sector_arc(sector, n, eps, field.radius)
    if not arc:
        raise InsufficientDataError("widened arc is empty")
    tree = geodesic_tree(field, x, arc, restriction)
    return sorted((p for p in tree.leaves if p[1] == n), key=lambda p: p[0])


def backward_cluster(field: WeightField, x, probes, sector: SectorSpec, n_target: int,
                     restriction: str = FULL, side: str = "L", method: str = "reverse") -> set:
    """``{y in probes : x lies on the extremal proxy from y}``.

    Every proxy ends at the same arc endpoint ``a``, so with ``method="reverse"``
    one run from ``a`` answers all probes: ``x`` is on the geodesic from ``y``
    to ``a`` exactly when ``y`` lies below ``x`` in the tree rooted at ``a``.
    This relies on geodesic reversal, which holds whenever path times are
    distinct (always, for continuous laws).  ``method="direct"`` runs one
    proxy per probe.
    """
    x = require_domain(x, field.radius, restriction)
    probes = [require_domain(y, field.radius, restriction) for y in probes]
    if method == "direct":
        out = set()
        for y in probes:
            if x in extremal_proxy(field, y, side, sector, n_target, restriction).path:
                out.add(y)
        return out
    if method != "reverse":
        raise InvalidParameterError(f"unknown method {method!r}")
    a = arc_endpoint(field, sector, n_target, side)
    sp = ShortestPaths(field, a, restriction, targets=probes + [x])
    mask = sp.subtree_mask(x)
    r = field.radius
    return {y for y in probes if mask[y[1] + r, y[0] + r]}

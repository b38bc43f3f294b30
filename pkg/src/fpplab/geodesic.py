"""Exact passage times and geodesics on a WeightField.

The kernel is a label-setting Dijkstra over the vertices of the box with a
binary heap.  Edge weights are strictly positive, so every predecessor of a
vertex is settled before the vertex itself; when two predecessors give
bit-equal times the parent is chosen so that the root-to-vertex vertex
sequence is lexicographically smallest, comparing vertices by ``(y, x)``.
That keeps every answer deterministic on fields with float collisions (the
constant test law in particular).  Under continuous weights ties do not
occur and the tie-break is never exercised.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import FPPError
from .lattice import FULL, HALF, Point, check_restriction, require_domain
from .weights import WeightField, path_time


@njit(cache=True)
def _lex_better(u, p, v, parent, depth):
    """Is (path to u) + v lexicographically smaller than (path to p) + v?

    Flat indices are ordered by (y, x), so comparing indices compares vertices.
    """
    a, b = u, p
    da, db = depth[a], depth[b]
    if da > db:
        while depth[a] > db + 1:
            a = parent[a]
        if parent[a] == b:
            return a < v
        a = parent[a]
    elif db > da:
        while depth[b] > da + 1:
            b = parent[b]
        if parent[b] == a:
            return v < b
        b = parent[b]
    while parent[a] != parent[b]:
        a = parent[a]
        b = parent[b]
    return a < b


@njit(cache=True)
def _heap_push(keys, vals, size, key, val):
    i = size
    keys[i] = key
    vals[i] = val
    while i > 0:
        up = (i - 1) >> 1
        if keys[up] <= keys[i]:
            break
        keys[up], keys[i] = keys[i], keys[up]
        vals[up], vals[i] = vals[i], vals[up]
        i = up
    return size + 1


@njit(cache=True)
def _heap_pop(keys, vals, size):
    key = keys[0]
    val = vals[0]
    size -= 1
    keys[0] = keys[size]
    vals[0] = vals[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        child = left
        if left + 1 < size and keys[left + 1] < keys[left]:
            child = left + 1
        if keys[i] <= keys[child]:
            break
        keys[child], keys[i] = keys[i], keys[child]
        vals[child], vals[i] = vals[i], vals[child]
        i = child
    return key, val, size


@njit(cache=True)
def _dijkstra(horizontal, vertical, width, row_min, source, targets):
    n = width * width
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, np.int64)
    depth = np.zeros(n, np.int64)
    settled = np.zeros(n, np.bool_)
    is_target = np.zeros(n, np.bool_)
    remaining = 0
    for t in targets:
        if not is_target[t]:
            is_target[t] = True
            remaining += 1
    keys = np.empty(4 * n + 4)
    vals = np.empty(4 * n + 4, np.int64)
    size = 0
    dist[source] = 0.0
    size = _heap_push(keys, vals, size, 0.0, source)
    nbr = np.empty(4, np.int64)
    wts = np.empty(4)
    while size > 0:
        d, u, size = _heap_pop(keys, vals, size)
        if settled[u] or d > dist[u]:
            continue
        settled[u] = True
        if is_target[u]:
            remaining -= 1
            if remaining == 0:
                break
        j = u // width
        i = u - j * width
        k = 0
        if i + 1 < width:
            nbr[k] = u + 1
            wts[k] = horizontal[j, i]
            k += 1
        if i > 0:
            nbr[k] = u - 1
            wts[k] = horizontal[j, i - 1]
            k += 1
        if j + 1 < width:
            nbr[k] = u + width
            wts[k] = vertical[j, i]
            k += 1
        if j > row_min:
            nbr[k] = u - width
            wts[k] = vertical[j - 1, i]
            k += 1
        for m in range(k):
            v = nbr[m]
            if settled[v]:
                continue
            nd = d + wts[m]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                depth[v] = depth[u] + 1
                size = _heap_push(keys, vals, size, nd, v)
            elif nd == dist[v] and _lex_better(u, parent[v], v, parent, depth):
                parent[v] = u
                depth[v] = depth[u] + 1
    return dist, parent, settled


@dataclass(frozen=True)
class Geodesic:
    """A time-minimizing lattice path, stored as its vertex sequence."""

    vertices: tuple
    time: float
    restriction: str = FULL

    @property
    def start(self) -> Point:
        return self.vertices[0]

    @property
    def end(self) -> Point:
        return self.vertices[-1]

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, p):
        return tuple(p) in self.vertex_set

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def reversed(self) -> "Geodesic":
        return Geodesic(tuple(reversed(self.vertices)), self.time, self.restriction)

    def to_json(self) -> str:
        return json.dumps([[int(x), int(y)] for x, y in self.vertices])


@dataclass(frozen=True)
class GeodesicTree:
    """Union of geodesics from ``root``, as child -> parent pointers."""

    root: Point
    parent: dict

    def path_to(self, v) -> tuple:
        v = Point(*v)
        out = [v]
        while v != self.root:
            v = self.parent[v]
            out.append(v)
        return tuple(reversed(out))

    @property
    def vertices(self) -> set:
        return set(self.parent) | {self.root}

    @property
    def leaves(self) -> set:
        return self.vertices - set(self.parent.values())

    def children(self) -> dict:
        out = {}
        for c, p in self.parent.items():
            out.setdefault(p, []).append(c)
        return out


class ShortestPaths:
    """Result of one label-setting run from ``root``.

    Only settled vertices carry final labels; with ``targets`` the run stops
    as soon as all of them are settled.
    """

    def __init__(self, field: WeightField, root, restriction: str = FULL, targets=None):
        check_restriction(restriction)
        self.field = field
        self.restriction = restriction
        self.radius = field.radius
        self.width = field.width
        self.root = require_domain(root, field.radius, restriction)
        if targets is None:
            target_idx = np.empty(0, np.int64)
        else:
            target_idx = np.array([self.index(require_domain(t, field.radius, restriction)) for t in targets],
                                  dtype=np.int64)
        row_min = self.radius if restriction == HALF else 0
        self.dist, self.parent, self.settled = _dijkstra(
            field.horizontal, field.vertical, self.width, row_min, self.index(self.root), target_idx)

    def index(self, p) -> int:
        return (p[1] + self.radius) * self.width + (p[0] + self.radius)

    def point(self, idx: int) -> Point:
        j, i = divmod(int(idx), self.width)
        return Point(i - self.radius, j - self.radius)

    def _settled_index(self, p) -> int:
        p = require_domain(p, self.radius, self.restriction)
        idx = self.index(p)
        if not self.settled[idx]:
            raise FPPError(f"{p} was not settled by this run; pass it as a target")
        return idx

    def time_to(self, p) -> float:
        return float(self.dist[self._settled_index(p)])

    def times_to(self, points) -> np.ndarray:
        return np.array([self.time_to(p) for p in points])

    def path_indices(self, p) -> list:
        idx = self._settled_index(p)
        out = [idx]
        while self.parent[idx] >= 0:
            idx = int(self.parent[idx])
            out.append(idx)
        out.reverse()
        return out

    def path_to(self, p) -> Geodesic:
        verts = tuple(self.point(i) for i in self.path_indices(p))
        return Geodesic(verts, self.time_to(p), self.restriction)

    def on_path(self, w, u) -> bool:
        """Is ``w`` a vertex of the geodesic from the root to ``u``?"""
        target = self.index(w)
        idx = self._settled_index(u)
        while idx >= 0:
            if idx == target:
                return True
            idx = int(self.parent[idx])
        return False

    def tree(self, targets) -> GeodesicTree:
        parent = {}
        for t in targets:
            idx = self._settled_index(t)
            while self.parent[idx] >= 0:
                child = self.point(idx)
                if child in parent:
                    break
                idx = int(self.parent[idx])
                parent[child] = self.point(idx)
        return GeodesicTree(self.root, parent)

    def subtree_mask(self, w) -> np.ndarray:
        """Boolean grid of settled vertices whose geodesic from the root passes through ``w``."""
        n = self.width * self.width
        flags = np.zeros(n, np.int8)  # 0 unknown, 1 yes, 2 no
        flags[self._settled_index(w)] = 1
        for idx in np.argsort(self.dist, kind="stable"):
            if not self.settled[idx] or flags[idx]:
                continue
            p = self.parent[idx]
            flags[idx] = 2 if p < 0 else flags[p]
        return (flags == 1).reshape(self.width, self.width)


def shortest_paths(field: WeightField, root, restriction: str = FULL, targets=None) -> ShortestPaths:
    return ShortestPaths(field, root, restriction, targets)


def passage_time(field: WeightField, x, y, restriction: str = FULL) -> float:
    """``T(x, y)``: the infimum of path sums over paths inside the box (and half-plane)."""
    require_domain(y, field.radius, restriction)
    return ShortestPaths(field, x, restriction, targets=[y]).time_to(y)


def geodesic(field: WeightField, x, y, restriction: str = FULL) -> Geodesic:
    """The (tie-broken) unique geodesic from ``x`` to ``y``."""
    require_domain(y, field.radius, restriction)
    return ShortestPaths(field, x, restriction, targets=[y]).path_to(y)


def geodesic_tree(field: WeightField, root, targets, restriction: str = FULL) -> GeodesicTree:
    targets = list(targets)
    for t in targets:
        require_domain(t, field.radius, restriction)
    return ShortestPaths(field, root, restriction, targets=targets).tree(targets)


def out_set(field: WeightField, z, w, probes, restriction: str = FULL) -> set:
    """``{u in probes : w lies on the geodesic from z to u}``."""
    probes = [require_domain(u, field.radius, restriction) for u in probes]
    require_domain(w, field.radius, restriction)
    sp = ShortestPaths(field, z, restriction, targets=probes)
    return {u for u in probes if sp.on_path(w, u)}


def check_geodesic(field: WeightField, g: Geodesic) -> None:
    """Raise unless ``g`` is a simple nearest-neighbour path whose time is its edge sum."""
    verts = g.vertices
    if len(set(verts)) != len(verts):
        raise FPPError("path is not simple")
    if path_time(field, verts) != g.time:
        raise FPPError("stored time differs from the edge sum")

"""Lattice geometry: points, horizontal lines, sectors, the half-plane and the dual lattice."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InvalidParameterError, OutOfDomainError
from .weights import HORIZONTAL, VERTICAL, EdgeId

TWO_PI = 2.0 * math.pi
# slack for inclusive sector endpoints; atan2 of lattice points is exact only on the axes and diagonals
ANGLE_SLACK = 1e-12

FULL = "full"
HALF = "half"
RESTRICTIONS = (FULL, HALF)


class Point(NamedTuple):
    x: int
    y: int


def arg_of(p) -> float:
    """Planar argument of ``p`` in ``[0, 2*pi)``."""
    x, y = p
    if x == 0 and y == 0:
        raise InvalidParameterError("the origin has no argument")
    a = math.atan2(y, x)
    return a + TWO_PI if a < 0 else a


def in_half_plane(p) -> bool:
    return p[1] >= 0


def check_restriction(restriction: str) -> str:
    if restriction not in RESTRICTIONS:
        raise InvalidParameterError(f"restriction must be one of {RESTRICTIONS}, got {restriction!r}")
    return restriction


def in_domain(p, radius: int, restriction: str = FULL) -> bool:
    inside = abs(p[0]) <= radius and abs(p[1]) <= radius
    return inside and (restriction == FULL or in_half_plane(p))


def require_domain(p, radius: int, restriction: str = FULL) -> Point:
    if not in_domain(p, radius, restriction):
        where = "the upper half of " if restriction == HALF else ""
        raise OutOfDomainError(f"{tuple(p)} is outside {where}[-{radius}, {radius}]^2")
    return Point(int(p[0]), int(p[1]))


def line_points(n: int, radius: int) -> list[Point]:
    """Points of ``L_n = {(x, n)}`` inside the box, left to right."""
    if abs(n) > radius:
        return []
    return [Point(x, n) for x in range(-radius, radius + 1)]


def lattice_neighbors(p):
    x, y = p
    return [Point(x + 1, y), Point(x - 1, y), Point(x, y + 1), Point(x, y - 1)]


@dataclass(frozen=True)
class SectorSpec:
    """Closed angular sector ``[theta1, theta2]`` around the reference direction ``theta``.

    Angles are in radians and are not reduced mod 2*pi, so a sector around
    the e1 direction can be written as ``[-0.1, 0.1]``.
    """

    theta: float
    theta1: float
    theta2: float

    def __post_init__(self):
        if not self.theta1 <= self.theta <= self.theta2:
            raise InvalidParameterError("need theta1 <= theta <= theta2")
        if self.theta2 - self.theta1 >= math.pi:
            raise InvalidParameterError("sector must be narrower than a half-plane")

    @classmethod
    def direction(cls, theta: float) -> "SectorSpec":
        return cls(theta, theta, theta)

    @classmethod
    def around(cls, theta: float, half_width: float) -> "SectorSpec":
        return cls(theta, theta - half_width, theta + half_width)

    def contains(self, angle: float, eps: float = 0.0) -> bool:
        lo = self.theta1 - eps - ANGLE_SLACK
        width = self.theta2 - self.theta1 + 2 * eps + 2 * ANGLE_SLACK
        return (angle - lo) % TWO_PI <= width

    @property
    def width(self) -> float:
        return self.theta2 - self.theta1


def sector_arc(spec: SectorSpec, n: int, eps: float, radius: int) -> list[Point]:
    """Points of ``L_n`` whose argument lies in ``[theta1 - eps, theta2 + eps]``."""
    if n < 1:
        raise InvalidParameterError("sector arcs are taken on lines L_n with n >= 1")
    if eps < 0:
        raise InvalidParameterError("eps must be non-negative")
    return [p for p in line_points(n, radius) if spec.contains(arg_of(p), eps)]


class DualEdge(NamedTuple):
    """Edge of the dual lattice ``Z^2 + (1/2, 1/2)``.

    A dual vertex is named by the primal point ``a`` with position
    ``a + (1/2, 1/2)``; the edge joins ``(x, y)`` to ``(x, y) + e_k`` in those
    names, ``orientation`` 0 for e1 and 1 for e2.
    """

    x: int
    y: int
    orientation: int

    def endpoints(self):
        """Real coordinates of the two dual vertices."""
        x0, y0 = self.x + 0.5, self.y + 0.5
        if self.orientation == HORIZONTAL:
            return (x0, y0), (x0 + 1.0, y0)
        return (x0, y0), (x0, y0 + 1.0)

    def vertex_names(self):
        if self.orientation == HORIZONTAL:
            return (self.x, self.y), (self.x + 1, self.y)
        return (self.x, self.y), (self.x, self.y + 1)


def dual_of(e: EdgeId) -> DualEdge:
    """The dual edge crossing the primal edge ``e``."""
    if e.orientation == HORIZONTAL:
        return DualEdge(e.x, e.y - 1, VERTICAL)
    return DualEdge(e.x - 1, e.y, HORIZONTAL)


def primal_of(d: DualEdge) -> EdgeId:
    if d.orientation == VERTICAL:
        return EdgeId(d.x, d.y + 1, HORIZONTAL)
    return EdgeId(d.x + 1, d.y, VERTICAL)

"""2D primitives: vectors, the square arena, and obstacle boundary queries.

All positions are in meters in a world frame whose origin is the arena's
lower-left corner. Boundary queries return the closest boundary point together
with the unit normal pointing into free space (into the arena, away from an
obstacle's interior); both the boundary-avoidance velocity term and target
reflection are built on top of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ArenaEscape, ObstaclePenetration

TWO_PI = 2.0 * math.pi


class Vec2(NamedTuple):
    """Immutable 2D vector (meters, or meters/step for velocities)."""

    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, scalar: float) -> "Vec2":
        return Vec2(self.x * scalar, self.y * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        return self.x * other.y - self.y * other.x

    def norm_sq(self) -> float:
        return self.x * self.x + self.y * self.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def unit(self) -> "Vec2":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return Vec2(self.x / n, self.y / n)

    def perp(self) -> "Vec2":
        """Counterclockwise perpendicular."""
        return Vec2(-self.y, self.x)

    def rotated(self, angle: float) -> "Vec2":
        c, s = math.cos(angle), math.sin(angle)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


ZERO = Vec2(0.0, 0.0)


@dataclass(frozen=True)
class Arena:
    """Axis-aligned square arena with its lower-left corner at the origin."""

    side: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.side) and self.side > 0.0):
            raise ValueError(f"arena side must be finite and > 0, got {self.side}")

    def contains(self, p: Vec2) -> bool:
        return 0.0 <= p.x <= self.side and 0.0 <= p.y <= self.side

    def strictly_inside(self, p: Vec2) -> bool:
        return 0.0 < p.x < self.side and 0.0 < p.y < self.side

    def clamp_inside(self, p: Vec2, margin: float) -> Vec2:
        """Clamp a point to the arena interior, inset by `margin` from the walls."""
        hi = self.side - margin
        return Vec2(min(max(p.x, margin), hi), min(max(p.y, margin), hi))


def closest_wall_point(arena: Arena, p: Vec2) -> tuple[Vec2, Vec2]:
    """Closest point on the nearest arena wall and its inward unit normal.

    Corner-equidistant ties are broken by the fixed wall order
    (left, right, bottom, top) so that runs are bit-reproducible.
    Raises ArenaEscape if ``p`` lies outside the arena.
    """
    if not arena.contains(p):
        raise ArenaEscape(f"point {p} is outside the {arena.side} m arena")
    side = arena.side
    dists = (p.x, side - p.x, p.y, side - p.y)
    wall = min(range(4), key=dists.__getitem__)
    if wall == 0:
        return Vec2(0.0, p.y), Vec2(1.0, 0.0)
    if wall == 1:
        return Vec2(side, p.y), Vec2(-1.0, 0.0)
    if wall == 2:
        return Vec2(p.x, 0.0), Vec2(0.0, 1.0)
    return Vec2(p.x, side), Vec2(0.0, -1.0)


@dataclass(frozen=True)
class Circle:
    """Circular obstacle."""

    center: Vec2
    radius: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise ValueError(f"circle radius must be finite and > 0, got {self.radius}")
        if not self.center.is_finite():
            raise ValueError("circle center must be finite")

    def contains(self, p: Vec2) -> bool:
        """Strict interior test (boundary points are outside)."""
        return (p - self.center).norm_sq() < self.radius * self.radius

    def closest_boundary_point(self, p: Vec2) -> tuple[Vec2, Vec2]:
        d = p - self.center
        n2 = d.norm_sq()
        if n2 < self.radius * self.radius:
            raise ObstaclePenetration(f"point {p} is inside circle obstacle at {self.center}")
        n = math.sqrt(n2)
        direction = Vec2(d.x / n, d.y / n)
        return self.center + direction * self.radius, direction

    def eject(self, p: Vec2) -> tuple[Vec2, Vec2]:
        """Nearest boundary point and outward normal for a point inside."""
        d = p - self.center
        n = d.norm()
        direction = Vec2(1.0, 0.0) if n == 0.0 else Vec2(d.x / n, d.y / n)
        return self.center + direction * self.radius, direction


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon obstacle with counterclockwise vertices."""

    vertices: tuple[Vec2, ...]

    def __post_init__(self) -> None:
        verts = tuple(Vec2(float(v[0]), float(v[1])) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise ValueError(f"polygon needs at least 3 vertices, got {n}")
        for v in verts:
            if not v.is_finite():
                raise ValueError("polygon vertices must be finite")
        for i in range(n):
            a, b, c = verts[i], verts[(i + 1) % n], verts[(i + 2) % n]
            if (b - a).cross(c - b) <= 0.0:
                raise ValueError(
                    "polygon must be strictly convex with counterclockwise vertices"
                )

    def edges(self) -> list[tuple[Vec2, Vec2]]:
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def edge_outward_normal(self, i: int) -> Vec2:
        a = self.vertices[i]
        b = self.vertices[(i + 1) % len(self.vertices)]
        e = b - a
        # interior lies to the left of each CCW edge, so rotate -90 degrees
        return Vec2(e.y, -e.x).unit()

    def contains(self, p: Vec2) -> bool:
        """Strict interior test (boundary points are outside)."""
        n = len(self.vertices)
        for i in range(n):
            a = self.vertices[i]
            b = self.vertices[(i + 1) % n]
            if (b - a).cross(p - a) <= 0.0:
                return False
        return True

    def _closest_on_edges(self, p: Vec2) -> tuple[Vec2, float, int]:
        best_q = self.vertices[0]
        best_d2 = math.inf
        best_i = 0
        n = len(self.vertices)
        for i in range(n):
            a = self.vertices[i]
            b = self.vertices[(i + 1) % n]
            ex, ey = b.x - a.x, b.y - a.y
            t = ((p.x - a.x) * ex + (p.y - a.y) * ey) / (ex * ex + ey * ey)
            t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
            qx, qy = a.x + t * ex, a.y + t * ey
            d2 = (p.x - qx) ** 2 + (p.y - qy) ** 2
            if d2 < best_d2:
                best_q, best_d2, best_i = Vec2(qx, qy), d2, i
        return best_q, best_d2, best_i

    def closest_boundary_point(self, p: Vec2) -> tuple[Vec2, Vec2]:
        if self.contains(p):
            raise ObstaclePenetration(f"point {p} is inside polygon obstacle")
        q, d2, i = self._closest_on_edges(p)
        d = math.sqrt(d2)
        if d > 1e-12:
            normal = (p - q) * (1.0 / d)
        else:
            normal = self.edge_outward_normal(i)
        return q, normal

    def eject(self, p: Vec2) -> tuple[Vec2, Vec2]:
        """Nearest boundary point and outward normal for a point inside."""
        q, _, i = self._closest_on_edges(p)
        return q, self.edge_outward_normal(i)


Obstacle = Circle | ConvexPolygon


def closest_boundary_point(obstacle: Obstacle, p: Vec2) -> tuple[Vec2, Vec2]:
    """Closest point on an obstacle's boundary and the unit normal into free space.

    Raises ObstaclePenetration when ``p`` lies strictly inside the obstacle.
    """
    return obstacle.closest_boundary_point(p)


def obstacle_inside_arena(obstacle: Obstacle, arena: Arena) -> bool:
    if isinstance(obstacle, Circle):
        c, r = obstacle.center, obstacle.radius
        return r < c.x < arena.side - r and r < c.y < arena.side - r
    return all(arena.strictly_inside(v) for v in obstacle.vertices)


def _polygon_axes(poly: ConvexPolygon) -> list[Vec2]:
    return [poly.edge_outward_normal(i) for i in range(len(poly.vertices))]


def _project(poly: ConvexPolygon, axis: Vec2) -> tuple[float, float]:
    dots = [axis.dot(v) for v in poly.vertices]
    return min(dots), max(dots)


def obstacles_overlap(a: Obstacle, b: Obstacle) -> bool:
    """True when the interiors of two obstacles intersect or touch."""
    if isinstance(a, Circle) and isinstance(b, Circle):
        return (a.center - b.center).norm() < a.radius + b.radius
    if isinstance(a, Circle):
        a, b = b, a
    if isinstance(b, Circle):
        assert isinstance(a, ConvexPolygon)
        if a.contains(b.center):
            return True
        _, d2, _ = a._closest_on_edges(b.center)
        return d2 < b.radius * b.radius
    assert isinstance(a, ConvexPolygon) and isinstance(b, ConvexPolygon)
    for axis in _polygon_axes(a) + _polygon_axes(b):
        lo_a, hi_a = _project(a, axis)
        lo_b, hi_b = _project(b, axis)
        if hi_a <= lo_b or hi_b <= lo_a:
            return False
    return True

"""Heavy-tailed wandering of targets with specular wall/obstacle reflection.

Targets move at constant speed along straight segments whose lengths follow a
clamped Pareto tail, redrawing a uniform heading whenever a segment is used
up. Hitting a wall or obstacle reflects the heading about the boundary normal
and truncates the segment, forcing a fresh draw on the next step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import TWO_PI, Arena, Circle, ConvexPolygon, Obstacle, Vec2

# stop this far short of a boundary so reflected targets stay strictly inside
_BACKOFF = 1e-6


@dataclass(frozen=True)
class TargetState:
    """One target: position, constant speed, heading, and remaining segment."""

    id: int
    pos: Vec2
    speed: float
    heading: float = 0.0
    segment_remaining: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.speed) and self.speed >= 0.0):
            raise ValueError(f"target speed must be finite and >= 0, got {self.speed}")
        if not 0.0 <= self.heading < TWO_PI:
            raise ValueError(f"heading must lie in [0, 2*pi), got {self.heading}")
        if self.segment_remaining < 0.0:
            raise ValueError(f"segment_remaining must be >= 0, got {self.segment_remaining}")

    def velocity(self) -> Vec2:
        return Vec2(self.speed * math.cos(self.heading), self.speed * math.sin(self.heading))


@dataclass(frozen=True)
class LevyParams:
    """Tail exponent and clamp range of the segment-length distribution."""

    alpha: float = 1.5
    min_step: float = 5.0
    max_step: float = 125.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and 1.0 < self.alpha <= 2.0):
            raise ValueError(f"alpha must lie in (1, 2], got {self.alpha}")
        if not (0.0 < self.min_step < self.max_step):
            raise ValueError(
                f"need 0 < min_step < max_step, got min_step={self.min_step}, "
                f"max_step={self.max_step}"
            )


def levy_length_from_uniform(u: float, params: LevyParams) -> float:
    """Map a uniform draw u in (0, 1] to a clamped Pareto segment length."""
    if not 0.0 < u <= 1.0:
        raise ValueError(f"u must lie in (0, 1], got {u}")
    raw = params.min_step * u ** (-1.0 / params.alpha)
    return min(max(raw, params.min_step), params.max_step)


def sample_levy_length(rng: np.random.Generator, params: LevyParams) -> float:
    """Draw one segment length; Pareto tail with exponent alpha, then clamped."""
    u = 1.0 - rng.random()
    return levy_length_from_uniform(u, params)


def _first_crossing(
    p0: Vec2, d: Vec2, arena: Arena, obstacles: tuple[Obstacle, ...]
) -> tuple[float, Vec2] | None:
    """Earliest boundary crossing along p0 -> p0+d, as (t, free-space normal).

    Returns None if the open segment stays in free space. Walls are checked
    first, then obstacles in order; equal crossing parameters keep the first
    candidate found, so results are deterministic.
    """
    best_t = math.inf
    best_normal = Vec2(0.0, 0.0)
    side = arena.side
    if d.x < 0.0:
        t = -p0.x / d.x
        if 0.0 < t <= 1.0 and t < best_t:
            best_t, best_normal = t, Vec2(1.0, 0.0)
    if d.x > 0.0:
        t = (side - p0.x) / d.x
        if 0.0 < t <= 1.0 and t < best_t:
            best_t, best_normal = t, Vec2(-1.0, 0.0)
    if d.y < 0.0:
        t = -p0.y / d.y
        if 0.0 < t <= 1.0 and t < best_t:
            best_t, best_normal = t, Vec2(0.0, 1.0)
    if d.y > 0.0:
        t = (side - p0.y) / d.y
        if 0.0 < t <= 1.0 and t < best_t:
            best_t, best_normal = t, Vec2(0.0, -1.0)
    for obstacle in obstacles:
        if isinstance(obstacle, Circle):
            f = p0 - obstacle.center
            a = d.norm_sq()
            if a == 0.0:
                continue
            b = 2.0 * f.dot(d)
            c = f.norm_sq() - obstacle.radius * obstacle.radius
            disc = b * b - 4.0 * a * c
            if disc <= 0.0:
                continue
            t = (-b - math.sqrt(disc)) / (2.0 * a)
            if 0.0 < t <= 1.0 and t < best_t:
                q = p0 + d * t
                best_t, best_normal = t, (q - obstacle.center).unit()
        else:
            assert isinstance(obstacle, ConvexPolygon)
            for i, (a_v, b_v) in enumerate(obstacle.edges()):
                e = b_v - a_v
                denom = d.cross(e)
                if abs(denom) < 1e-18:
                    continue
                rel = a_v - p0
                t = rel.cross(e) / denom
                s = rel.cross(d) / denom
                if 0.0 < t <= 1.0 and 0.0 <= s <= 1.0 and t < best_t:
                    best_t, best_normal = t, obstacle.edge_outward_normal(i)
    if math.isinf(best_t):
        return None
    return best_t, best_normal


def target_step(
    state: TargetState,
    arena: Arena,
    obstacles: tuple[Obstacle, ...],
    levy: LevyParams,
    rng: np.random.Generator,
) -> TargetState:
    """Advance one target by one step.

    Draws a fresh uniform heading and segment length when the previous
    segment is exhausted, then advances by at most ``speed`` meters along the
    heading (capped by the remaining segment). A boundary hit stops just
    short of the crossing, reflects the heading specularly, and zeroes the
    segment. Per-step displacement never exceeds ``speed``.
    """
    heading = state.heading
    segment = state.segment_remaining
    if segment <= 0.0:
        heading = rng.uniform(0.0, TWO_PI)
        segment = sample_levy_length(rng, levy)
    move = min(state.speed, segment)
    if move == 0.0:
        return TargetState(state.id, state.pos, state.speed, heading, segment)
    d = Vec2(move * math.cos(heading), move * math.sin(heading))
    hit = _first_crossing(state.pos, d, arena, obstacles)
    if hit is None:
        return TargetState(state.id, state.pos + d, state.speed, heading, segment - move)
    t, normal = hit
    t_stop = max(0.0, t - _BACKOFF / move)
    new_pos = state.pos + d * t_stop
    v = Vec2(math.cos(heading), math.sin(heading))
    reflected = v - normal * (2.0 * v.dot(normal))
    new_heading = math.atan2(reflected.y, reflected.x) % TWO_PI
    if new_heading >= TWO_PI:  # % can round up to 2*pi for tiny negatives
        new_heading = 0.0
    return TargetState(state.id, new_pos, state.speed, new_heading, 0.0)

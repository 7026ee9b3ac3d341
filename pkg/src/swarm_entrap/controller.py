"""Per-agent velocity law: approach, repulsion, and boundary avoidance terms.

Every function here is a pure function of an immutable snapshot, so the whole
controller can be evaluated for all agents concurrently within one step. The
braking curve gives a speed-vs-distance profile with a constant-acceleration
far field and a linear near field; the boundary term treats walls and
obstacles as virtual agents sitting at the closest boundary point and moving
inward at ``v_shill``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import ZERO, Arena, Obstacle, Vec2, closest_boundary_point, closest_wall_point

WALL_TERM_VARIANTS = ("literal", "distance_reversed")

_COINCIDENT = 1e-9


@dataclass(frozen=True)
class ControllerParams:
    """Gains and distances of the velocity controller (meters, steps).

    ``wall_term_variant`` selects how the boundary braking argument is formed:
    ``literal`` uses distance-to-boundary minus ``r_wall`` (zero inside the
    activation band, so the active branch is a plain velocity-difference
    push), ``distance_reversed`` uses the reversed difference so the push
    fades near the activation edge.
    """

    v_f: float = 1.5
    c_t: float = 1.0
    a_t: float = 0.035
    p_t: float = 0.5
    r_entrap: float = 25.0
    r_arep: float = 22.0
    p_arep: float = 0.45
    r_trep: float = 30.0
    p_trep: float = 0.3
    c_d: float = 2.0
    r_wall: float = 10.0
    a_d: float = 0.5
    p_d: float = 0.5
    v_limit: float = 4.0
    v_shill: float | None = None
    wall_term_variant: str = "literal"

    def __post_init__(self) -> None:
        if self.v_shill is None:
            object.__setattr__(self, "v_shill", self.v_limit)
        positive = (
            ("v_f", self.v_f),
            ("a_t", self.a_t),
            ("p_t", self.p_t),
            ("r_entrap", self.r_entrap),
            ("r_arep", self.r_arep),
            ("p_arep", self.p_arep),
            ("r_trep", self.r_trep),
            ("p_trep", self.p_trep),
            ("r_wall", self.r_wall),
            ("a_d", self.a_d),
            ("p_d", self.p_d),
            ("v_limit", self.v_limit),
            ("v_shill", self.v_shill),
        )
        for name, value in positive:
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {value}")
        for name, value in (("c_t", self.c_t), ("c_d", self.c_d)):
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")
        if self.v_f > self.v_limit:
            raise ValueError(f"v_f must be <= v_limit (v_f={self.v_f}, v_limit={self.v_limit})")
        if self.v_shill > self.v_limit:
            raise ValueError(
                f"v_shill must be <= v_limit (v_shill={self.v_shill}, v_limit={self.v_limit})"
            )
        if self.r_trep < self.r_entrap:
            raise ValueError(
                f"r_trep must be >= r_entrap (r_trep={self.r_trep}, r_entrap={self.r_entrap})"
            )
        if self.wall_term_variant not in WALL_TERM_VARIANTS:
            raise ValueError(
                f"wall_term_variant must be one of {WALL_TERM_VARIANTS}, "
                f"got {self.wall_term_variant!r}"
            )


@dataclass(frozen=True)
class WorldView:
    """Immutable per-agent snapshot of the communicated global state."""

    self_id: int
    self_pos: Vec2
    self_vel: Vec2
    neighbors: tuple[tuple[int, Vec2], ...]
    targets: tuple[tuple[int, Vec2], ...]
    assignment: int
    arena: Arena
    obstacles: tuple[Obstacle, ...] = ()

    def __post_init__(self) -> None:
        if any(nid == self.self_id for nid, _ in self.neighbors):
            raise ValueError(f"agent {self.self_id} listed among its own neighbors")
        if not any(tid == self.assignment for tid, _ in self.targets):
            raise ValueError(f"assigned target {self.assignment} not present in view")


def braking_curve(r: float, a: float, p: float) -> float:
    """Smooth speed-decay profile over distance ``r`` to the stopping point.

    Zero at or behind the stopping point, linear with slope ``p`` close to it,
    and a constant-deceleration square-root branch beyond the crossover at
    ``r = a / p**2``. Continuous and nondecreasing in ``r``.
    """
    if not (math.isfinite(r) and math.isfinite(a) and math.isfinite(p)):
        raise ValueError(f"braking_curve arguments must be finite, got ({r}, {a}, {p})")
    if a <= 0.0 or p <= 0.0:
        raise ValueError(f"braking_curve needs a > 0 and p > 0, got a={a}, p={p}")
    if r <= 0.0:
        return 0.0
    rp = r * p
    if rp <= a / p:
        return rp
    return math.sqrt(2.0 * a * r - (a * a) / (p * p))


def clamp_norm(v: Vec2, limit: float) -> Vec2:
    """Rescale ``v`` to magnitude ``limit`` if it exceeds it, keeping direction.

    Guarantees ``clamp_norm(v, limit).norm() <= limit`` exactly, including
    after floating-point rescaling.
    """
    n = v.norm()
    if n <= limit:
        return v
    out = v * (limit / n)
    while out.norm() > limit:
        out = out * 0.9999999999999999
    return out


_ANGLE_PER_HASH = 2.0 * math.pi / 2.0**32


def _pair_direction(id_a: int, id_b: int) -> Vec2:
    """Deterministic pseudo-random unit direction for a coincident pair.

    Derived from the unordered id pair and antisymmetric in the argument
    order, so coincident repulsion still obeys action-reaction.
    """
    lo, hi = (id_a, id_b) if id_a <= id_b else (id_b, id_a)
    h = (lo * 0x9E3779B1 + hi * 0x85EBCA77) & 0xFFFFFFFF
    h ^= h >> 16
    h = (h * 0x045D9F3B) & 0xFFFFFFFF
    h ^= h >> 16
    angle = _ANGLE_PER_HASH * h
    d = Vec2(math.cos(angle), math.sin(angle))
    return d if id_a <= id_b else -d


def approach_velocity(self_pos: Vec2, target_pos: Vec2, params: ControllerParams) -> Vec2:
    """Velocity toward the assigned target with braking onto the stopping ring.

    Magnitude is ``v_f`` plus the braking profile of the distance beyond
    ``r_entrap``; it never drops below ``v_f``, even inside the ring (target
    repulsion provides the outward push there). Coincident positions yield a
    zero vector since the direction is undefined.
    """
    d = target_pos - self_pos
    r = d.norm()
    if r < _COINCIDENT:
        return ZERO
    speed = params.v_f + params.c_t * braking_curve(r - params.r_entrap, params.a_t, params.p_t)
    return d * (speed / r)


def agent_repulsion(
    self_pos: Vec2,
    other_pos: Vec2,
    params: ControllerParams,
    self_id: int = 0,
    other_id: int = 1,
) -> Vec2:
    """Linear short-range repulsion between two agents, zero beyond ``r_arep``.

    Coincident agents are pushed apart along a deterministic direction derived
    from their id pair, at the full-onset magnitude.
    """
    d = self_pos - other_pos
    r = d.norm()
    if r >= params.r_arep:
        return ZERO
    if r < _COINCIDENT:
        return _pair_direction(self_id, other_id) * (params.p_arep * params.r_arep)
    return d * (params.p_arep * (params.r_arep - r) / r)


def target_repulsion(
    self_pos: Vec2,
    target_pos: Vec2,
    params: ControllerParams,
    self_id: int = 0,
    target_id: int = 0,
) -> Vec2:
    """Unidirectional repulsion pushing an agent away from any nearby target.

    Applied for every target, not only the assigned one; same form as
    agent_repulsion with the (r_trep, p_trep) pair.
    """
    d = self_pos - target_pos
    r = d.norm()
    if r >= params.r_trep:
        return ZERO
    if r < _COINCIDENT:
        return _pair_direction(self_id, target_id) * (params.p_trep * params.r_trep)
    return d * (params.p_trep * (params.r_trep - r) / r)


def boundary_term(
    self_vel: Vec2,
    boundary_point: Vec2,
    inward_normal: Vec2,
    self_pos: Vec2,
    params: ControllerParams,
) -> Vec2:
    """Avoidance velocity from a virtual agent on a wall or obstacle boundary.

    The virtual agent sits at ``boundary_point`` and moves into free space at
    ``v_shill``; inside the ``r_wall`` activation band the agent is steered
    along the velocity difference toward matching it. The max(0, .) clamp
    never fires under the ``literal`` variant (the braking argument is
    negative there) and is kept defensively.
    """
    r_id = (self_pos - boundary_point).norm()
    if r_id >= params.r_wall:
        return ZERO
    v_diff = inward_normal * params.v_shill - self_vel
    v_id = v_diff.norm()
    if v_id < _COINCIDENT:
        return ZERO
    if params.wall_term_variant == "literal":
        brake_arg = r_id - params.r_wall
    else:
        brake_arg = params.r_wall - r_id
    magnitude = params.c_d * max(0.0, v_id - braking_curve(brake_arg, params.a_d, params.p_d))
    if magnitude == 0.0:
        return ZERO
    return v_diff * (magnitude / v_id)


def desired_velocity(view: WorldView, params: ControllerParams) -> Vec2:
    """Sum of all velocity terms for one agent, capped at ``v_limit``.

    Adds neighbor repulsion, repulsion from every target, the approach term
    toward the assigned target, and one boundary term for the nearest wall
    plus one per obstacle, then rescales the sum to at most ``v_limit``.
    """
    total = ZERO
    for nid, npos in view.neighbors:
        total = total + agent_repulsion(view.self_pos, npos, params, view.self_id, nid)
    assigned_pos = view.self_pos
    for tid, tpos in view.targets:
        total = total + target_repulsion(view.self_pos, tpos, params, view.self_id, tid)
        if tid == view.assignment:
            assigned_pos = tpos
    total = total + approach_velocity(view.self_pos, assigned_pos, params)
    wall_point, wall_normal = closest_wall_point(view.arena, view.self_pos)
    total = total + boundary_term(view.self_vel, wall_point, wall_normal, view.self_pos, params)
    for obstacle in view.obstacles:
        point, normal = closest_boundary_point(obstacle, view.self_pos)
        total = total + boundary_term(view.self_vel, point, normal, view.self_pos, params)
    return clamp_norm(total, params.v_limit)

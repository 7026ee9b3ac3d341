"""Deterministic stepping engine composing decision, controller, and targets.

One step runs four phases: (1) a sequential assignment-update pass, (2) an
embarrassingly parallel controller evaluation against the immutable phase-1
snapshot, (3) first-order integration with an arena clamp and obstacle
penetration bookkeeping, (4) target advancement in id order. A run is a pure
function of its scenario, including the seed: one run, one rng stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .controller import ControllerParams, WorldView, desired_velocity
from .decision import Assignment, DecisionWeights, update_assignments
from .errors import ScenarioError
from .geometry import (
    Arena,
    Obstacle,
    Vec2,
    ZERO,
    obstacle_inside_arena,
    obstacles_overlap,
)
from .target_motion import LevyParams, TargetState, target_step

# safety-net inset used when clamping integrated positions to the arena
ARENA_CLAMP_MARGIN = 1e-6


@dataclass(frozen=True)
class AgentState:
    """One swarm agent: position, velocity, and committed target."""

    id: int
    pos: Vec2
    vel: Vec2
    assigned_target: int


@dataclass(frozen=True)
class SpawnBox:
    """Seeded uniform rejection-sampling spec for initial agent placement."""

    count: int
    rect: tuple[float, float, float, float] | None = None
    min_separation: float = 0.0

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"spawn count must be >= 1, got {self.count}")
        if self.min_separation < 0.0:
            raise ValueError(f"min_separation must be >= 0, got {self.min_separation}")
        if self.rect is not None:
            x0, y0, x1, y1 = self.rect
            if not (x0 < x1 and y0 < y1):
                raise ValueError(f"spawn rect must have positive extent, got {self.rect}")


@dataclass(frozen=True)
class Scenario:
    """Everything a run needs: world layout, parameters, and the seed."""

    arena: Arena
    targets: tuple[TargetState, ...]
    agents: tuple[Vec2, ...] | SpawnBox
    steps: int
    seed: int
    obstacles: tuple[Obstacle, ...] = ()
    controller: ControllerParams = ControllerParams()
    weights: DecisionWeights = DecisionWeights()
    hysteresis: float = 5.0
    levy: LevyParams = LevyParams()
    target_priorities: tuple[float, ...] = ()
    sector_radius: float = 32.0
    sector_count: int = 6
    sample_interval: int = 1
    baseline: bool = False
    name: str = ""
    description: str = ""

    def __post_init__(self) -> None:
        if len(self.targets) < 1:
            raise ValueError("scenario needs at least one target")
        if self.agent_count() < 1:
            raise ValueError("scenario needs at least one agent")
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if self.hysteresis < 0.0 or not math.isfinite(self.hysteresis):
            raise ValueError(f"hysteresis must be finite and >= 0, got {self.hysteresis}")
        if self.sector_radius <= 0.0:
            raise ValueError(f"sector_radius must be > 0, got {self.sector_radius}")
        if self.sector_count < 1:
            raise ValueError(f"sector_count must be >= 1, got {self.sector_count}")
        if self.sample_interval < 1:
            raise ValueError(f"sample_interval must be >= 1, got {self.sample_interval}")
        if not self.target_priorities:
            object.__setattr__(self, "target_priorities", (0.0,) * len(self.targets))
        if len(self.target_priorities) != len(self.targets):
            raise ValueError(
                f"got {len(self.target_priorities)} priorities for {len(self.targets)} targets"
            )

    def agent_count(self) -> int:
        if isinstance(self.agents, SpawnBox):
            return self.agents.count
        return len(self.agents)

    def spawn_rect(self) -> tuple[float, float, float, float]:
        """Spawn rectangle, defaulting to the arena's lower-left quarter."""
        if isinstance(self.agents, SpawnBox) and self.agents.rect is not None:
            return self.agents.rect
        half = self.arena.side / 2.0
        return (0.0, 0.0, half, half)

    def extra_factor_rows(self) -> dict[str, tuple[float, ...]]:
        return {"priority": self.target_priorities}

    def effective_decision(self) -> tuple[DecisionWeights, float]:
        """Decision weights and hysteresis actually used by the run.

        The baseline flag degrades the decision rule to pure nearest-target:
        zero crowding weight, zero extra weights, zero hysteresis.
        """
        if not self.baseline:
            return self.weights, self.hysteresis
        zeroed = tuple((name, 0.0) for name, _ in self.weights.extra)
        return replace(self.weights, b=0.0, extra=zeroed), 0.0


def validate_scenario(scenario: Scenario) -> None:
    """Cross-field checks: containment, overlap, and spawn feasibility."""
    arena = scenario.arena
    for i, obstacle in enumerate(scenario.obstacles):
        if not obstacle_inside_arena(obstacle, arena):
            raise ScenarioError(f"obstacles[{i}]: obstacle is not fully inside the arena")
    for i in range(len(scenario.obstacles)):
        for j in range(i + 1, len(scenario.obstacles)):
            if obstacles_overlap(scenario.obstacles[i], scenario.obstacles[j]):
                raise ScenarioError(f"obstacles[{i}] and obstacles[{j}] overlap")
    for t in scenario.targets:
        if not arena.strictly_inside(t.pos):
            raise ScenarioError(f"targets[{t.id}]: position {t.pos} not strictly inside arena")
        for i, obstacle in enumerate(scenario.obstacles):
            if obstacle.contains(t.pos):
                raise ScenarioError(f"targets[{t.id}]: position lies inside obstacles[{i}]")
    if isinstance(scenario.agents, SpawnBox):
        x0, y0, x1, y1 = scenario.spawn_rect()
        if x0 < 0.0 or y0 < 0.0 or x1 > arena.side or y1 > arena.side:
            raise ScenarioError("agents.spawn: spawn rect extends outside the arena")
    else:
        for k, pos in enumerate(scenario.agents):
            if not arena.strictly_inside(pos):
                raise ScenarioError(f"agents[{k}]: position {pos} not strictly inside arena")
            for i, obstacle in enumerate(scenario.obstacles):
                if obstacle.contains(pos):
                    raise ScenarioError(f"agents[{k}]: position lies inside obstacles[{i}]")


@dataclass(frozen=True)
class World:
    """One snapshot: all agents, all targets, and the current assignment."""

    agents: tuple[AgentState, ...]
    targets: tuple[TargetState, ...]
    assignment: Assignment


@dataclass(frozen=True)
class CollisionEvent:
    """An agent ended a step strictly inside an obstacle."""

    step: int
    agent_id: int
    obstacle_index: int


@dataclass
class Trajectory:
    """Time-indexed record of a whole run (steps + 1 snapshots)."""

    snapshots: list[World] = field(default_factory=list)
    events: list[CollisionEvent] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.snapshots) - 1


def _spawn_agents(scenario: Scenario, rng: np.random.Generator) -> list[Vec2]:
    if not isinstance(scenario.agents, SpawnBox):
        return list(scenario.agents)
    x0, y0, x1, y1 = scenario.spawn_rect()
    min_sep_sq = scenario.agents.min_separation**2
    placed: list[Vec2] = []
    for k in range(scenario.agents.count):
        for _ in range(10_000):
            candidate = Vec2(rng.uniform(x0, x1), rng.uniform(y0, y1))
            if not scenario.arena.strictly_inside(candidate):
                continue
            if any(obs.contains(candidate) for obs in scenario.obstacles):
                continue
            if any((candidate - q).norm_sq() < min_sep_sq for q in placed):
                continue
            placed.append(candidate)
            break
        else:
            raise ScenarioError(
                f"agents.spawn: could not place agent {k} after 10000 attempts "
                "(rect too crowded?)"
            )
    return placed


def initial_world(scenario: Scenario, rng: np.random.Generator) -> World:
    """Spawn agents, run the first assignment pass, and freeze snapshot 0."""
    positions = _spawn_agents(scenario, rng)
    target_positions = [t.pos for t in scenario.targets]
    weights, hysteresis = scenario.effective_decision()
    assignment = update_assignments(
        positions,
        target_positions,
        Assignment(n_targets=len(scenario.targets)),
        weights,
        hysteresis,
        rng,
        scenario.extra_factor_rows(),
        step=0,
    )
    agents = tuple(
        AgentState(i, pos, ZERO, assignment.target_of[i]) for i, pos in enumerate(positions)
    )
    return World(agents, scenario.targets, assignment)


def _resolve_penetrations(
    agents: tuple[AgentState, ...], scenario: Scenario
) -> tuple[AgentState, ...]:
    """Project any agent recorded inside an obstacle back to its boundary.

    Recorded snapshots keep the raw integrated position so penetrations stay
    visible in the trajectory; the working state for the next step is
    sanitized here so the controller always sees a valid world.
    """
    fixed: list[AgentState] = []
    for agent in agents:
        pos = agent.pos
        for obstacle in scenario.obstacles:
            if obstacle.contains(pos):
                boundary, outward = obstacle.eject(pos)
                pos = scenario.arena.clamp_inside(
                    boundary + outward * ARENA_CLAMP_MARGIN, ARENA_CLAMP_MARGIN
                )
                break
        fixed.append(agent if pos == agent.pos else replace(agent, pos=pos))
    return tuple(fixed)


def step(
    world: World, scenario: Scenario, rng: np.random.Generator, step_index: int = 0
) -> tuple[World, list[CollisionEvent]]:
    """Advance the world by one step; returns the new world and any collisions."""
    weights, hysteresis = scenario.effective_decision()
    world = World(_resolve_penetrations(world.agents, scenario), world.targets, world.assignment)
    agent_positions = [a.pos for a in world.agents]
    target_positions = [t.pos for t in world.targets]
    assignment = update_assignments(
        agent_positions,
        target_positions,
        world.assignment,
        weights,
        hysteresis,
        rng,
        scenario.extra_factor_rows(),
        step=step_index,
    )

    targets_view = tuple((t.id, t.pos) for t in world.targets)
    desired: list[Vec2] = []
    for agent in world.agents:
        view = WorldView(
            self_id=agent.id,
            self_pos=agent.pos,
            self_vel=agent.vel,
            neighbors=tuple((o.id, o.pos) for o in world.agents if o.id != agent.id),
            targets=targets_view,
            assignment=assignment.target_of[agent.id],
            arena=scenario.arena,
            obstacles=scenario.obstacles,
        )
        desired.append(desired_velocity(view, scenario.controller))

    events: list[CollisionEvent] = []
    new_agents: list[AgentState] = []
    for agent, vel in zip(world.agents, desired):
        pos = scenario.arena.clamp_inside(agent.pos + vel, ARENA_CLAMP_MARGIN)
        for i, obstacle in enumerate(scenario.obstacles):
            if obstacle.contains(pos):
                # recorded as-is; the next step's sanitation pass ejects it
                events.append(CollisionEvent(step_index, agent.id, i))
                break
        new_agents.append(AgentState(agent.id, pos, vel, assignment.target_of[agent.id]))

    new_targets = tuple(
        target_step(t, scenario.arena, scenario.obstacles, scenario.levy, rng)
        for t in world.targets
    )
    return World(tuple(new_agents), new_targets, assignment), events


def run(scenario: Scenario) -> Trajectory:
    """Execute a full seeded run and record every snapshot."""
    validate_scenario(scenario)
    rng = np.random.default_rng(scenario.seed)
    world = initial_world(scenario, rng)
    trajectory = Trajectory(snapshots=[world])
    for s in range(1, scenario.steps + 1):
        world, events = step(world, scenario, rng, step_index=s)
        trajectory.snapshots.append(world)
        trajectory.events.extend(events)
    return trajectory

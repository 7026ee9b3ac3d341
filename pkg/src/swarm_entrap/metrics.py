"""Evaluation indicators computed offline from a finished trajectory.

Covers the per-target assignment counts, angular sector occupancy around each
target, first-encirclement times, the mean path length until all targets are
encircled, the per-step minimum pairwise agent distance, and the cosine
correlation of consecutive agent velocities. A target counts as encircled
when every angular sector of the scoring circle around it holds at least one
agent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .decision import Assignment
from .geometry import TWO_PI, Obstacle, Vec2
from .simulator import Trajectory

_STATIONARY = 1e-9


def sector_index(agent_pos: Vec2, target_pos: Vec2, sectors: int = 6) -> int:
    """Angular bin of an agent around a target; bin 0 starts at the +x axis.

    Sectors are world-fixed, equal wedges of the full circle counted
    counterclockwise; bin k spans [k*360/sectors, (k+1)*360/sectors) degrees.
    """
    d = agent_pos - target_pos
    if d.norm() < _STATIONARY:
        raise ValueError("sector undefined for coincident agent and target")
    theta = math.atan2(d.y, d.x)
    if theta < 0.0:
        theta += TWO_PI
    k = int(theta / (TWO_PI / sectors))
    return min(k, sectors - 1)


def sector_occupancy(
    agent_positions: Sequence[Vec2],
    target_pos: Vec2,
    radius: float,
    sectors: int = 6,
) -> tuple[int, ...]:
    """Per-sector counts of agents within ``radius`` of the target."""
    counts = [0] * sectors
    r2 = radius * radius
    for pos in agent_positions:
        if (pos - target_pos).norm_sq() <= r2:
            counts[sector_index(pos, target_pos, sectors)] += 1
    return tuple(counts)


def is_encircled(occupancy: Sequence[int]) -> bool:
    """Full occupancy: every sector holds at least one agent."""
    return all(c >= 1 for c in occupancy)


def entrapment_times(
    trajectory: Trajectory, radius: float, sectors: int = 6
) -> tuple[tuple[int | None, ...], int | None]:
    """First step of full occupancy per target, and the all-targets step.

    The all-targets step is the earliest step by which every target has been
    fully encircled at least once (the max of the per-target times); None
    marks targets never encircled.
    """
    n_targets = len(trajectory.snapshots[0].targets)
    first: list[int | None] = [None] * n_targets
    for s, world in enumerate(trajectory.snapshots):
        positions = [a.pos for a in world.agents]
        for t in world.targets:
            if first[t.id] is None and is_encircled(
                sector_occupancy(positions, t.pos, radius, sectors)
            ):
                first[t.id] = s
        if all(v is not None for v in first):
            break
    all_step = None if any(v is None for v in first) else max(first)  # type: ignore[type-var]
    return tuple(first), all_step


def avg_entrap_distance(
    trajectory: Trajectory, radius: float, sectors: int = 6
) -> float | None:
    """Mean per-agent path length from step 0 to the all-targets entrapment step."""
    _, all_step = entrapment_times(trajectory, radius, sectors)
    if all_step is None:
        return None
    totals = {a.id: 0.0 for a in trajectory.snapshots[0].agents}
    for s in range(1, all_step + 1):
        prev = {a.id: a.pos for a in trajectory.snapshots[s - 1].agents}
        for a in trajectory.snapshots[s].agents:
            totals[a.id] += (a.pos - prev[a.id]).norm()
    if not totals:
        return 0.0
    return sum(totals.values()) / len(totals)


def min_pairwise_distance(agent_positions: Sequence[Vec2]) -> float:
    """Minimum distance over unordered agent pairs; +inf for fewer than two."""
    n = len(agent_positions)
    best = math.inf
    for i in range(n):
        for j in range(i + 1, n):
            d = (agent_positions[i] - agent_positions[j]).norm()
            if d < best:
                best = d
    return best


def velocity_correlation(v_prev: Vec2, v_curr: Vec2) -> float:
    """Cosine of the angle between consecutive velocities, in [-1, 1].

    A near-zero velocity on either side counts as 1: a parked agent has not
    changed direction.
    """
    n_prev = v_prev.norm()
    n_curr = v_curr.norm()
    if n_prev < _STATIONARY or n_curr < _STATIONARY:
        return 1.0
    c = v_prev.dot(v_curr) / (n_prev * n_curr)
    return max(-1.0, min(1.0, c))


def agents_per_target(assignment: Assignment) -> tuple[int, ...]:
    """Per-target counts by current assignment; sums to the swarm size."""
    return assignment.counts()


def spatial_agents_per_target(
    agent_positions: Sequence[Vec2], target_positions: Sequence[Vec2], radius: float
) -> tuple[int, ...]:
    """Per-target counts of agents within ``radius``, ignoring assignments."""
    r2 = radius * radius
    return tuple(
        sum(1 for p in agent_positions if (p - tp).norm_sq() <= r2)
        for tp in target_positions
    )


@dataclass(frozen=True)
class MetricsReport:
    """All indicators of one run, ready for serialization."""

    agents_per_target: tuple[tuple[int, ...], ...]
    agents_per_target_spatial: tuple[tuple[int, ...], ...]
    sector_occupancy: tuple[tuple[tuple[int, ...], ...], ...]
    entrap_time_per_target: tuple[int | None, ...]
    entrap_time_first: int | None
    entrap_time_all: int | None
    avg_entrap_distance: float | None
    min_pairwise_distance: tuple[float, ...]
    velocity_correlation: tuple[tuple[float, ...], ...]
    collision_events: int
    sample_steps: tuple[int, ...]
    sector_radius: float
    sector_count: int

    def to_dict(self) -> dict:
        """Plain-data form with None for 'never' and non-finite sentinels."""

        def clean(x: float) -> float | None:
            return None if not math.isfinite(x) else x

        return {
            "schema_version": 1,
            "sector_radius": self.sector_radius,
            "sector_count": self.sector_count,
            "sample_steps": list(self.sample_steps),
            "agents_per_target": [list(row) for row in self.agents_per_target],
            "agents_per_target_spatial": [
                list(row) for row in self.agents_per_target_spatial
            ],
            "sector_occupancy": [
                [list(bins) for bins in sample] for sample in self.sector_occupancy
            ],
            "entrap_time_per_target": list(self.entrap_time_per_target),
            "entrap_time_first": self.entrap_time_first,
            "entrap_time_all": self.entrap_time_all,
            "avg_entrap_distance": self.avg_entrap_distance,
            "min_pairwise_distance": [clean(v) for v in self.min_pairwise_distance],
            "velocity_correlation": [list(row) for row in self.velocity_correlation],
            "collision_events": self.collision_events,
        }


def count_collisions(trajectory: Trajectory, obstacles: Sequence[Obstacle]) -> int:
    """Recount penetration events directly from recorded positions."""
    count = 0
    for world in trajectory.snapshots:
        for agent in world.agents:
            if any(obstacle.contains(agent.pos) for obstacle in obstacles):
                count += 1
    return count


def compute_metrics(
    trajectory: Trajectory,
    obstacles: Sequence[Obstacle] = (),
    sector_radius: float = 32.0,
    sector_count: int = 6,
    sample_interval: int = 1,
) -> MetricsReport:
    """Evaluate every indicator over a trajectory."""
    snapshots = trajectory.snapshots
    if not snapshots:
        raise ValueError("cannot compute metrics of an empty trajectory")
    n_steps = len(snapshots) - 1
    sample_steps = tuple(range(0, n_steps + 1, sample_interval))

    per_target_counts: list[tuple[int, ...]] = []
    spatial_counts: list[tuple[int, ...]] = []
    occupancy_samples: list[tuple[tuple[int, ...], ...]] = []
    for s in sample_steps:
        world = snapshots[s]
        positions = [a.pos for a in world.agents]
        target_positions = [t.pos for t in world.targets]
        per_target_counts.append(agents_per_target(world.assignment))
        spatial_counts.append(
            spatial_agents_per_target(positions, target_positions, sector_radius)
        )
        occupancy_samples.append(
            tuple(
                sector_occupancy(positions, tp, sector_radius, sector_count)
                for tp in target_positions
            )
        )

    per_target_first, all_step = entrapment_times(trajectory, sector_radius, sector_count)
    first_step = None
    reached = [v for v in per_target_first if v is not None]
    if reached:
        first_step = min(reached)

    min_distances = tuple(
        min_pairwise_distance([a.pos for a in world.agents]) for world in snapshots
    )

    n_agents = len(snapshots[0].agents)
    correlations: list[tuple[float, ...]] = []
    for agent_index in range(n_agents):
        series = []
        for s in range(1, n_steps + 1):
            v_prev = snapshots[s - 1].agents[agent_index].vel
            v_curr = snapshots[s].agents[agent_index].vel
            series.append(velocity_correlation(v_prev, v_curr))
        correlations.append(tuple(series))

    return MetricsReport(
        agents_per_target=tuple(per_target_counts),
        agents_per_target_spatial=tuple(spatial_counts),
        sector_occupancy=tuple(occupancy_samples),
        entrap_time_per_target=per_target_first,
        entrap_time_first=first_step,
        entrap_time_all=all_step,
        avg_entrap_distance=avg_entrap_distance(trajectory, sector_radius, sector_count),
        min_pairwise_distance=min_distances,
        velocity_correlation=tuple(correlations),
        collision_events=count_collisions(trajectory, obstacles),
        sample_steps=sample_steps,
        sector_radius=sector_radius,
        sector_count=sector_count,
    )

"""Adaptive target selection: score rows over targets and assignment updates.

Each agent scores every target with a weighted sum of its distance to the
target, the number of other agents already committed to it, and any extra
named factors (e.g. per-target priority), then pursues the lowest score. A
score-margin hysteresis suppresses assignment flapping, and one update pass
walks the agents in a seeded random permutation so that later agents see the
switches of earlier ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .geometry import Vec2


@dataclass(frozen=True)
class DecisionWeights:
    """Weights of the target-score factors.

    ``a`` weighs distance (per meter), ``b`` weighs the count of agents
    already surrounding a target, and ``extra`` lists further (factor name,
    weight) pairs whose per-target value rows are supplied by the caller.
    """

    a: float = 1.0
    b: float = 150.0
    extra: tuple[tuple[str, float], ...] = (("priority", 0.0),)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "extra", tuple((str(n), float(w)) for n, w in self.extra)
        )
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise ValueError(f"distance weight a must be finite and > 0, got {self.a}")
        if not (math.isfinite(self.b) and self.b >= 0.0):
            raise ValueError(f"crowding weight b must be finite and >= 0, got {self.b}")
        for name, w in self.extra:
            if not math.isfinite(w):
                raise ValueError(f"extra weight {name!r} must be finite, got {w}")


@dataclass(frozen=True)
class Assignment:
    """Agent -> target map plus the step at which each agent last switched."""

    target_of: dict[int, int] = field(default_factory=dict)
    last_switch_step: dict[int, int] = field(default_factory=dict)
    n_targets: int = 0

    def __post_init__(self) -> None:
        for agent_id, target_id in self.target_of.items():
            if not 0 <= target_id < self.n_targets:
                raise ValueError(
                    f"agent {agent_id} assigned to unknown target {target_id}"
                )

    def counts(self) -> tuple[int, ...]:
        out = [0] * self.n_targets
        for target_id in self.target_of.values():
            out[target_id] += 1
        return tuple(out)


def count_surrounding(target_id: int, assignment: Assignment, self_id: int) -> int:
    """Number of agents other than ``self_id`` currently assigned to a target."""
    if not 0 <= target_id < assignment.n_targets:
        raise ValueError(f"unknown target id {target_id}")
    return sum(
        1
        for agent_id, tid in assignment.target_of.items()
        if tid == target_id and agent_id != self_id
    )


def seq_row(
    distances: Sequence[float],
    counts: Sequence[float],
    extras: Sequence[Sequence[float]],
    weights: DecisionWeights,
) -> list[float]:
    """Weighted per-target score row; lower is more attractive."""
    n = len(distances)
    if len(counts) != n:
        raise ValueError(f"counts row has length {len(counts)}, expected {n}")
    if len(extras) != len(weights.extra):
        raise ValueError(
            f"got {len(extras)} extra factor rows for {len(weights.extra)} extra weights"
        )
    for (name, _), row in zip(weights.extra, extras):
        if len(row) != n:
            raise ValueError(f"extra factor row {name!r} has length {len(row)}, expected {n}")
    out = [weights.a * d + weights.b * c for d, c in zip(distances, counts)]
    for (_, w), row in zip(weights.extra, extras):
        for k in range(n):
            out[k] += w * row[k]
    return out


def choose_target(seq: Sequence[float], current: int | None, hysteresis: float) -> int:
    """Index of the lowest score, unless the current one is within the margin.

    Exact ties between non-current targets resolve to the lowest index. With
    ``current`` set and ``seq[current] <= min(seq) + hysteresis`` the agent
    keeps its target.
    """
    if not seq:
        raise ValueError("cannot choose from an empty score row")
    best = min(seq)
    if current is not None and seq[current] <= best + hysteresis:
        return current
    return seq.index(best)


def update_assignments(
    agent_positions: Sequence[Vec2],
    target_positions: Sequence[Vec2],
    assignment: Assignment,
    weights: DecisionWeights,
    hysteresis: float,
    rng: np.random.Generator,
    extra_factors: Mapping[str, Sequence[float]] | None = None,
    step: int = 0,
) -> Assignment:
    """One sequential decision pass over all agents.

    Agents are visited in a random permutation drawn from ``rng`` (exactly one
    ``rng.permutation(n_agents)`` call), each recomputing its score row from
    current distances and the in-progress assignment counts, so later agents
    react to earlier switches. Agents absent from ``assignment`` (initial
    pass) take a plain lowest-score choice with no hysteresis retention.
    """
    n_targets = len(target_positions)
    extras_rows: list[Sequence[float]] = []
    for name, _ in weights.extra:
        if extra_factors is None or name not in extra_factors:
            raise ValueError(f"missing factor row {name!r} required by decision weights")
        extras_rows.append(extra_factors[name])
    target_of = dict(assignment.target_of)
    last_switch = dict(assignment.last_switch_step)
    order = rng.permutation(len(agent_positions))
    for raw_id in order:
        agent_id = int(raw_id)
        pos = agent_positions[agent_id]
        distances = [(pos - tp).norm() for tp in target_positions]
        counts = [
            sum(1 for aid, tid in target_of.items() if tid == k and aid != agent_id)
            for k in range(n_targets)
        ]
        seq = seq_row(distances, counts, extras_rows, weights)
        current = target_of.get(agent_id)
        chosen = choose_target(seq, current, hysteresis)
        if chosen != current:
            last_switch[agent_id] = step
        target_of[agent_id] = chosen
    return Assignment(target_of, last_switch, n_targets)

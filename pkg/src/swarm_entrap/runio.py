"""Trajectory CSV, metrics JSON, and run-record reading and writing.

The trajectory CSV is flat and stream-appendable with the header
``step,kind,id,x,y,vx,vy,assignment`` (assignment is empty for targets).
Floats are rendered with 17 significant digits so files are byte-identical
across machines and parse back to the exact same doubles.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

from . import canonical
from .decision import Assignment
from .errors import ScenarioError
from .geometry import Vec2
from .metrics import MetricsReport
from .simulator import AgentState, Trajectory, World
from .target_motion import TargetState

CSV_HEADER = "step,kind,id,x,y,vx,vy,assignment"

_F = canonical.format_float


def trajectory_csv(trajectory: Trajectory) -> str:
    """Render a whole trajectory as CSV text."""
    lines = [CSV_HEADER]
    for s, world in enumerate(trajectory.snapshots):
        for a in world.agents:
            lines.append(
                f"{s},agent,{a.id},{_F(a.pos.x)},{_F(a.pos.y)},"
                f"{_F(a.vel.x)},{_F(a.vel.y)},{a.assigned_target}"
            )
        for t in world.targets:
            v = t.velocity()
            lines.append(
                f"{s},target,{t.id},{_F(t.pos.x)},{_F(t.pos.y)},{_F(v.x)},{_F(v.y)},"
            )
    return "\n".join(lines) + "\n"


def write_trajectory_csv(trajectory: Trajectory, path: str | Path) -> None:
    Path(path).write_text(trajectory_csv(trajectory), encoding="utf-8", newline="\n")


def read_trajectory_csv(path: str | Path) -> Trajectory:
    """Reconstruct a trajectory from CSV.

    Target segment bookkeeping and collision events are not part of the CSV;
    targets come back with a zero remaining segment and events empty (metrics
    recount penetrations geometrically).
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if line]
    if not lines or lines[0] != CSV_HEADER:
        raise ScenarioError(f"{path}: not a trajectory CSV (bad or missing header)")
    if len(lines) == 1:
        raise ScenarioError(f"{path}: trajectory contains no snapshots")
    per_step: dict[int, tuple[list[AgentState], list[TargetState]]] = {}
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 8:
            raise ScenarioError(f"{path}:{ln}: expected 8 fields, got {len(parts)}")
        try:
            s = int(parts[0])
            kind = parts[1]
            entity_id = int(parts[2])
            x, y, vx, vy = (float(v) for v in parts[3:7])
        except ValueError as e:
            raise ScenarioError(f"{path}:{ln}: {e}") from None
        agents, targets = per_step.setdefault(s, ([], []))
        if kind == "agent":
            if not parts[7]:
                raise ScenarioError(f"{path}:{ln}: agent row missing assignment")
            agents.append(AgentState(entity_id, Vec2(x, y), Vec2(vx, vy), int(parts[7])))
        elif kind == "target":
            speed = math.hypot(vx, vy)
            heading = math.atan2(vy, vx) % (2.0 * math.pi) if speed > 0.0 else 0.0
            if heading >= 2.0 * math.pi:
                heading = 0.0
            targets.append(TargetState(entity_id, Vec2(x, y), speed, heading, 0.0))
        else:
            raise ScenarioError(f"{path}:{ln}: unknown kind {kind!r}")
    snapshots: list[World] = []
    for s in range(len(per_step)):
        if s not in per_step:
            raise ScenarioError(f"{path}: missing snapshot for step {s}")
        agents, targets = per_step[s]
        agents.sort(key=lambda a: a.id)
        targets.sort(key=lambda t: t.id)
        assignment = Assignment(
            {a.id: a.assigned_target for a in agents},
            {},
            len(targets),
        )
        snapshots.append(World(tuple(agents), tuple(targets), assignment))
    return Trajectory(snapshots=snapshots)


def metrics_json(report: MetricsReport) -> str:
    return canonical.dumps(report.to_dict(), indent=2) + "\n"


def write_metrics_json(report: MetricsReport, path: str | Path) -> None:
    Path(path).write_text(metrics_json(report), encoding="utf-8", newline="\n")


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True)
class RunRecord:
    """Provenance of one replicate: digests, file references, and summary."""

    scenario_name: str
    scenario_digest: str
    seed: int
    steps: int
    baseline: bool
    trajectory_file: str
    trajectory_sha256: str
    metrics_file: str
    metrics_sha256: str
    engine_version: str
    applied_defaults: dict
    collision_events: int
    entrap_time_all: int | None

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "engine_version": self.engine_version,
            "scenario_name": self.scenario_name,
            "scenario_digest": self.scenario_digest,
            "seed": self.seed,
            "steps": self.steps,
            "baseline": self.baseline,
            "trajectory_file": self.trajectory_file,
            "trajectory_sha256": self.trajectory_sha256,
            "metrics_file": self.metrics_file,
            "metrics_sha256": self.metrics_sha256,
            "applied_defaults": self.applied_defaults,
            "collision_events": self.collision_events,
            "entrap_time_all": self.entrap_time_all,
        }


def write_run_record(record: RunRecord, path: str | Path) -> None:
    Path(path).write_text(
        canonical.dumps(record.to_dict(), indent=2) + "\n", encoding="utf-8", newline="\n"
    )


def run_record_path_for(trajectory_path: str | Path) -> Path:
    """Sibling run-record path of a trajectory file (.traj.csv -> .run.json)."""
    p = Path(trajectory_path)
    name = p.name
    if name.endswith(".traj.csv"):
        return p.with_name(name[: -len(".traj.csv")] + ".run.json")
    return p.with_name(p.stem + ".run.json")

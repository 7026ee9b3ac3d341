"""Deterministic 2D swarm simulation of adaptive multi-target entrapment.

A potential-field velocity controller with realistic braking drives agents
onto stopping rings around moving targets; a distributed scoring rule groups
the swarm across targets; targets wander on heavy-tailed random flights. The
package also ships the evaluation indicators (sector occupancy, entrapment
times, distances, velocity correlation), strict JSON scenario files, and a
CLI (``swarm-entrap run|metrics|plot``).
"""

__version__ = "0.1.0"

from .controller import (
    ControllerParams,
    WorldView,
    agent_repulsion,
    approach_velocity,
    boundary_term,
    braking_curve,
    clamp_norm,
    desired_velocity,
    target_repulsion,
)
from .decision import (
    Assignment,
    DecisionWeights,
    choose_target,
    count_surrounding,
    seq_row,
    update_assignments,
)
from .errors import ArenaEscape, ObstaclePenetration, ScenarioError, SimulationFault
from .geometry import (
    Arena,
    Circle,
    ConvexPolygon,
    Obstacle,
    Vec2,
    closest_boundary_point,
    closest_wall_point,
)
from .metrics import (
    MetricsReport,
    agents_per_target,
    avg_entrap_distance,
    compute_metrics,
    entrapment_times,
    min_pairwise_distance,
    sector_index,
    sector_occupancy,
    velocity_correlation,
)
from .scenario import (
    bundled_scenario_path,
    load_scenario,
    parse_scenario,
    scenario_digest,
    serialize_scenario,
)
from .simulator import (
    AgentState,
    CollisionEvent,
    Scenario,
    SpawnBox,
    Trajectory,
    World,
    run,
    step,
    validate_scenario,
)
from .target_motion import LevyParams, TargetState, sample_levy_length, target_step

__all__ = [
    "__version__",
    "Arena", "Circle", "ConvexPolygon", "Obstacle", "Vec2",
    "closest_boundary_point", "closest_wall_point",
    "ControllerParams", "WorldView", "braking_curve", "clamp_norm",
    "approach_velocity", "agent_repulsion", "target_repulsion",
    "boundary_term", "desired_velocity",
    "DecisionWeights", "Assignment", "count_surrounding", "seq_row",
    "choose_target", "update_assignments",
    "LevyParams", "TargetState", "sample_levy_length", "target_step",
    "AgentState", "SpawnBox", "Scenario", "World", "CollisionEvent",
    "Trajectory", "run", "step", "validate_scenario",
    "MetricsReport", "sector_index", "sector_occupancy", "entrapment_times",
    "avg_entrap_distance", "min_pairwise_distance", "velocity_correlation",
    "agents_per_target", "compute_metrics",
    "parse_scenario", "load_scenario", "serialize_scenario", "scenario_digest",
    "bundled_scenario_path",
    "SimulationFault", "ObstaclePenetration", "ArenaEscape", "ScenarioError",
]

import math

import numpy as np
import pytest

from swarm_entrap.controller import ControllerParams, WorldView, desired_velocity
from swarm_entrap.decision import Assignment, DecisionWeights
from swarm_entrap.errors import ScenarioError
from swarm_entrap.geometry import Arena, Circle, Vec2
from swarm_entrap.simulator import (
    AgentState,
    Scenario,
    SpawnBox,
    World,
    initial_world,
    run,
    step,
    validate_scenario,
)
from swarm_entrap.target_motion import TargetState


def _scenario(**kwargs):
    defaults = dict(
        arena=Arena(250.0),
        targets=(TargetState(0, Vec2(175.0, 125.0), 0.0),),
        agents=(Vec2(75.0, 125.0),),
        steps=1,
        seed=7,
    )
    defaults.update(kwargs)
    return Scenario(**defaults)


def test_single_agent_first_step_clamped_toward_target():
    # far-field approach exceeds the limit, so the first step covers v_limit
    params = ControllerParams(
        v_f=1.0, c_t=1.0, a_t=5.0, p_t=1.0, r_entrap=20.0,
        r_arep=10.0, p_arep=0.5, r_trep=20.0, p_trep=0.3, v_limit=4.0,
    )
    scenario = _scenario(controller=params)
    traj = run(scenario)
    assert len(traj.snapshots) == 2
    agent = traj.snapshots[1].agents[0]
    assert abs(agent.pos.x - 79.0) < 1e-12
    assert abs(agent.pos.y - 125.0) < 1e-12
    assert abs(agent.vel.norm() - 4.0) < 1e-12


def test_zero_agents_world_targets_still_advance():
    scenario = _scenario(targets=(TargetState(0, Vec2(100.0, 100.0), 2.6),))
    world = World((), scenario.targets, Assignment(n_targets=1))
    rng = np.random.default_rng(3)
    new_world, events = step(world, scenario, rng, step_index=1)
    assert new_world.agents == ()
    assert events == []
    assert new_world.targets[0].pos != world.targets[0].pos


def test_steps_zero_yields_initial_snapshot_only():
    scenario = _scenario(steps=0)
    traj = run(scenario)
    assert len(traj.snapshots) == 1
    assert traj.snapshots[0].agents[0].vel == Vec2(0.0, 0.0)


def test_run_determinism():
    scenario = _scenario(
        agents=SpawnBox(6, (10.0, 10.0, 115.0, 115.0), 5.0),
        targets=(TargetState(0, Vec2(175.0, 125.0), 1.8),
                 TargetState(1, Vec2(125.0, 175.0), 1.8)),
        steps=80,
    )
    t1 = run(scenario)
    t2 = run(scenario)
    assert t1.snapshots == t2.snapshots
    assert t1.events == t2.events


def test_speed_cap_and_containment():
    scenario = _scenario(
        agents=SpawnBox(8, (10.0, 10.0, 115.0, 115.0), 5.0),
        targets=(TargetState(0, Vec2(175.0, 125.0), 1.8),),
        obstacles=(Circle(Vec2(125.0, 125.0), 15.0),),
        steps=150,
    )
    traj = run(scenario)
    limit = scenario.controller.v_limit
    for world in traj.snapshots:
        for agent in world.agents:
            assert agent.vel.norm() <= limit
            assert scenario.arena.contains(agent.pos)
        for target in world.targets:
            assert scenario.arena.strictly_inside(target.pos)


def test_phase_two_is_order_independent():
    scenario = _scenario(
        agents=SpawnBox(6, (10.0, 10.0, 115.0, 115.0), 5.0),
        targets=(TargetState(0, Vec2(175.0, 125.0), 1.8),),
        steps=5,
    )
    traj = run(scenario)
    world = traj.snapshots[-1]
    targets_view = tuple((t.id, t.pos) for t in world.targets)

    def views():
        return [
            WorldView(
                self_id=a.id,
                self_pos=a.pos,
                self_vel=a.vel,
                neighbors=tuple((o.id, o.pos) for o in world.agents if o.id != a.id),
                targets=targets_view,
                assignment=a.assigned_target,
                arena=scenario.arena,
                obstacles=scenario.obstacles,
            )
            for a in world.agents
        ]

    forward = [desired_velocity(v, scenario.controller) for v in views()]
    backward = [desired_velocity(v, scenario.controller) for v in reversed(views())]
    assert forward == list(reversed(backward))


def test_collision_event_recorded_and_run_continues():
    # boundary gain zero: the agent drives straight through the obstacle
    params = ControllerParams(c_d=0.0)
    scenario = _scenario(
        agents=(Vec2(75.0, 125.0),),
        targets=(TargetState(0, Vec2(185.0, 125.0), 0.0),),
        obstacles=(Circle(Vec2(125.0, 125.0), 12.0),),
        controller=params,
        steps=40,
    )
    traj = run(scenario)
    assert len(traj.snapshots) == 41
    assert len(traj.events) > 0
    e = traj.events[0]
    hit = traj.snapshots[e.step].agents[e.agent_id]
    assert scenario.obstacles[e.obstacle_index].contains(hit.pos)
    # the agent eventually makes it past and stays valid afterwards
    final = traj.snapshots[-1].agents[0]
    assert scenario.arena.contains(final.pos)


def test_initial_assignment_is_recorded_in_snapshot_zero():
    scenario = _scenario(
        agents=SpawnBox(4, (10.0, 10.0, 60.0, 60.0), 2.0),
        targets=(TargetState(0, Vec2(175.0, 125.0), 1.8),
                 TargetState(1, Vec2(125.0, 175.0), 1.8)),
        steps=0,
    )
    traj = run(scenario)
    world = traj.snapshots[0]
    assert set(world.assignment.target_of) == {0, 1, 2, 3}
    for agent in world.agents:
        assert agent.assigned_target == world.assignment.target_of[agent.id]


def test_spawn_respects_min_separation_and_obstacles():
    scenario = _scenario(
        agents=SpawnBox(10, (10.0, 10.0, 80.0, 80.0), 12.0),
        obstacles=(Circle(Vec2(45.0, 45.0), 20.0),),
        steps=0,
    )
    world = initial_world(scenario, np.random.default_rng(scenario.seed))
    positions = [a.pos for a in world.agents]
    for i in range(len(positions)):
        assert not scenario.obstacles[0].contains(positions[i])
        for j in range(i + 1, len(positions)):
            assert (positions[i] - positions[j]).norm() >= 12.0


def test_spawn_impossible_raises():
    scenario = _scenario(agents=SpawnBox(50, (10.0, 10.0, 20.0, 20.0), 15.0), steps=0)
    with pytest.raises(ScenarioError, match="could not place"):
        initial_world(scenario, np.random.default_rng(0))


def test_validate_scenario_rejects_bad_layouts():
    with pytest.raises(ScenarioError, match="inside the arena"):
        validate_scenario(_scenario(obstacles=(Circle(Vec2(5.0, 125.0), 15.0),)))
    with pytest.raises(ScenarioError, match="overlap"):
        validate_scenario(_scenario(
            obstacles=(Circle(Vec2(125.0, 125.0), 15.0), Circle(Vec2(135.0, 125.0), 15.0))
        ))
    with pytest.raises(ScenarioError, match="targets"):
        validate_scenario(_scenario(
            targets=(TargetState(0, Vec2(125.0, 125.0), 1.8),),
            obstacles=(Circle(Vec2(125.0, 125.0), 15.0),),
        ))
    with pytest.raises(ScenarioError, match="agents"):
        validate_scenario(_scenario(
            agents=(Vec2(125.0, 125.0),),
            obstacles=(Circle(Vec2(125.0, 125.0), 15.0),),
        ))


def test_scenario_invariants():
    with pytest.raises(ValueError):
        _scenario(targets=())
    with pytest.raises(ValueError):
        _scenario(steps=-1)
    with pytest.raises(ValueError):
        _scenario(sample_interval=0)
    with pytest.raises(ValueError):
        _scenario(target_priorities=(1.0, 2.0))


def test_baseline_flag_degrades_decision():
    scenario = _scenario(baseline=True, weights=DecisionWeights(a=1.0, b=150.0))
    weights, hysteresis = scenario.effective_decision()
    assert weights.b == 0.0
    assert hysteresis == 0.0
    assert all(w == 0.0 for _, w in weights.extra)


def test_agent_velocity_matches_assignment_switch():
    # agents' recorded assignment always matches the step's assignment map
    scenario = _scenario(
        agents=SpawnBox(6, (10.0, 10.0, 115.0, 115.0), 5.0),
        targets=(TargetState(0, Vec2(175.0, 125.0), 1.8),
                 TargetState(1, Vec2(125.0, 175.0), 1.8)),
        steps=30,
    )
    traj = run(scenario)
    for world in traj.snapshots:
        for agent in world.agents:
            assert agent.assigned_target == world.assignment.target_of[agent.id]

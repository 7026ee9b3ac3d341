"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
summary lines. The heavyweight fixtures (20 seeded benchmark runs plus their
nearest-target baseline twins) are computed once per session.

Thresholds frozen from the 100-seed calibration pilot: entrapment success and
correlation-win rates at 80% of seeds, safety margin at 0.25 * r_arep.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from swarm_entrap.controller import ControllerParams, WorldView, braking_curve, desired_velocity
from swarm_entrap.decision import Assignment, count_surrounding, seq_row, update_assignments
from swarm_entrap.geometry import Arena, Circle, Vec2
from swarm_entrap.metrics import (
    compute_metrics,
    min_pairwise_distance,
    sector_occupancy,
    velocity_correlation,
)
from swarm_entrap.runio import metrics_json, trajectory_csv
from swarm_entrap.scenario import bundled_scenario_path, parse_scenario
from swarm_entrap.simulator import run
from swarm_entrap.target_motion import LevyParams, sample_levy_length

N_SEEDS = 20
SUCCESS_RATE = 0.80          # criteria 4-6, frozen from the pilot
SAFETY_FACTOR = 0.25         # criterion 7, frozen from the pilot


def _announce(criterion, ok, detail):
    print(f"\nacceptance criterion {criterion}: {'PASS' if ok else 'FAIL'} ({detail})",
          flush=True)
    assert ok, detail


@pytest.fixture(scope="module")
def benchmark():
    scenario = parse_scenario(bundled_scenario_path("paper_comparison"))
    seeds = [scenario.seed + i for i in range(N_SEEDS)]
    t0 = time.perf_counter()
    runs = []
    for seed in seeds:
        sc = replace(scenario, seed=seed)
        traj = run(sc)
        report = compute_metrics(
            traj, obstacles=sc.obstacles, sector_radius=sc.sector_radius,
            sector_count=sc.sector_count, sample_interval=sc.sample_interval,
        )
        runs.append((sc, traj, report))
    elapsed = time.perf_counter() - t0
    return scenario, seeds, runs, elapsed


@pytest.fixture(scope="module")
def baseline(benchmark):
    scenario, seeds, _, _ = benchmark
    runs = []
    for seed in seeds:
        sc = replace(scenario, seed=seed, baseline=True)
        traj = run(sc)
        report = compute_metrics(
            traj, obstacles=sc.obstacles, sector_radius=sc.sector_radius,
            sector_count=sc.sector_count, sample_interval=sc.sample_interval,
        )
        runs.append((sc, traj, report))
    return runs


def _mean_correlation(report):
    rows = report.velocity_correlation
    return sum(sum(r) / len(r) for r in rows) / len(rows)


def test_criterion_01_braking_curve(benchmark):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2022)
    worst_gap = 0.0
    for _ in range(100):
        a = float(rng.uniform(0.01, 10.0))
        p = float(rng.uniform(0.05, 5.0))
        crossover = a / p**2
        gap = abs(braking_curve(crossover, a, p) - crossover * p)
        worst_gap = max(worst_gap, gap)
        rs = np.linspace(-5.0, 50.0 * crossover + 100.0, 100)
        values = [braking_curve(float(r), a, p) for r in rs]
        assert all(v2 >= v1 for v1, v2 in zip(values, values[1:]))
        eps = 1e-6
        for r in rs:
            jump = braking_curve(float(r) + eps, a, p) - braking_curve(float(r), a, p)
            assert jump <= p * eps * (1.0 + 1e-6) + 1e-15
    dense = np.linspace(-10.0, 1000.0, 10_000)
    vals = [braking_curve(float(r), 0.8, 0.4) for r in dense]
    assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))
    elapsed = time.perf_counter() - t0
    ok = worst_gap <= 1e-9 and elapsed < 1.0
    _announce(1, ok, f"branch gap {worst_gap:.2e}, runtime {elapsed:.2f}s")


def test_criterion_02_controller_equivariance():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4096)
    params = ControllerParams()
    arena = Arena(250.0)
    center = Vec2(125.0, 125.0)
    worst = 0.0
    for _ in range(1000):
        theta = float(rng.uniform(0.0, 2.0 * math.pi))
        shift = Vec2(float(rng.uniform(-10, 10)), float(rng.uniform(-10, 10)))
        self_pos = center + Vec2(float(rng.uniform(-55, 55)), float(rng.uniform(-55, 55)))
        self_vel = Vec2(float(rng.uniform(-3, 3)), float(rng.uniform(-3, 3)))
        neighbors = tuple(
            (i + 1, center + Vec2(float(rng.uniform(-55, 55)), float(rng.uniform(-55, 55))))
            for i in range(int(rng.integers(0, 4)))
        )
        targets = tuple(
            (k, center + Vec2(float(rng.uniform(-55, 55)), float(rng.uniform(-55, 55))))
            for k in range(int(rng.integers(1, 3)))
        )
        assignment = int(rng.integers(0, len(targets)))

        def make(transform, vel_transform):
            return WorldView(
                self_id=0,
                self_pos=transform(self_pos),
                self_vel=vel_transform(self_vel),
                neighbors=tuple((i, transform(p)) for i, p in neighbors),
                targets=tuple((k, transform(p)) for k, p in targets),
                assignment=assignment,
                arena=arena,
                obstacles=(),
            )

        v = desired_velocity(make(lambda p: p, lambda v: v), params)
        rot = desired_velocity(
            make(lambda p: center + (p - center).rotated(theta),
                 lambda u: u.rotated(theta)),
            params,
        )
        expected = v.rotated(theta)
        worst = max(worst, abs(rot.x - expected.x), abs(rot.y - expected.y))
        moved = desired_velocity(make(lambda p: p + shift, lambda u: u), params)
        worst = max(worst, abs(moved.x - v.x), abs(moved.y - v.y))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5.0
    _announce(2, ok, f"worst deviation {worst:.2e}, runtime {elapsed:.2f}s")


def test_criterion_03_speed_cap_and_containment(benchmark):
    scenario, _, runs, elapsed = benchmark
    limit = scenario.controller.v_limit
    cap_violations = 0
    escapes = 0
    penetrations = 0
    for sc, traj, report in runs:
        for world in traj.snapshots:
            for agent in world.agents:
                if agent.vel.norm() > limit:
                    cap_violations += 1
                if not sc.arena.contains(agent.pos):
                    escapes += 1
        penetrations += report.collision_events
    ok = cap_violations == 0 and escapes == 0 and penetrations == 0 and elapsed < 30.0
    _announce(3, ok, f"cap violations {cap_violations}, escapes {escapes}, "
                     f"penetrations {penetrations}, 20 runs in {elapsed:.1f}s")


def test_criterion_04_entrapment_success(benchmark):
    _, _, runs, _ = benchmark
    successes = sum(1 for _, _, rep in runs if rep.entrap_time_all is not None)
    rate = successes / len(runs)
    ok = rate >= SUCCESS_RATE
    _announce(4, ok, f"both targets encircled in {successes}/{len(runs)} seeds")


def test_criterion_05_grouping_balance(benchmark):
    _, _, runs, _ = benchmark
    balanced = 0
    successful = 0
    for _, traj, rep in runs:
        if rep.entrap_time_all is None:
            continue
        successful += 1
        diffs = []
        for world in traj.snapshots[rep.entrap_time_all:]:
            counts = world.assignment.counts()
            diffs.append(abs(counts[0] - counts[1]))
        if sum(diffs) / len(diffs) <= 2.0:
            balanced += 1
    ok = successful > 0 and balanced / successful >= SUCCESS_RATE
    _announce(5, ok, f"time-averaged count gap <= 2 in {balanced}/{successful} "
                     "successful seeds")


def test_criterion_06_motion_smoothness(benchmark, baseline):
    _, _, runs, _ = benchmark
    wins = 0
    compared = 0
    for (_, _, rep), (_, _, rep_base) in zip(runs, baseline):
        if rep.entrap_time_all is None:
            continue
        compared += 1
        if _mean_correlation(rep) > _mean_correlation(rep_base):
            wins += 1
    ok = compared > 0 and wins / compared >= SUCCESS_RATE
    _announce(6, ok, f"velocity correlation beats nearest-target baseline in "
                     f"{wins}/{compared} successful seeds")


def test_criterion_07_safety_margin(benchmark):
    scenario, _, runs, _ = benchmark
    threshold = SAFETY_FACTOR * scenario.controller.r_arep
    worst = math.inf
    for _, _, rep in runs:
        worst = min(worst, min(rep.min_pairwise_distance))
    ok = worst > threshold
    _announce(7, ok, f"run-minimum pairwise distance {worst:.2f} m > {threshold:.2f} m")


def test_criterion_08_decision_oracle():
    rng_cases = np.random.default_rng(31337)
    checked = 0
    for _ in range(500):
        n_agents = int(rng_cases.integers(1, 7))
        n_targets = int(rng_cases.integers(1, 4))
        agents = [Vec2(float(x), float(y))
                  for x, y in rng_cases.uniform(0.0, 100.0, size=(n_agents, 2))]
        targets = [Vec2(float(x), float(y))
                   for x, y in rng_cases.uniform(0.0, 100.0, size=(n_targets, 2))]
        from swarm_entrap.decision import DecisionWeights
        weights = DecisionWeights(a=1.0, b=float(rng_cases.uniform(0.0, 40.0)), extra=())
        seed = int(rng_cases.integers(0, 2**31))

        # one pass must match an independent straight-loop replica exactly
        start = Assignment(
            {i: int(rng_cases.integers(0, n_targets)) for i in range(n_agents)},
            {}, n_targets,
        )
        result = update_assignments(agents, targets, start, weights, 0.0,
                                    np.random.default_rng(seed))
        order = [int(i) for i in np.random.default_rng(seed).permutation(n_agents)]
        expected = dict(start.target_of)
        for aid in order:
            values = []
            for k in range(n_targets):
                d = math.dist(agents[aid], targets[k])
                crowd = sum(1 for o, t in expected.items() if t == k and o != aid)
                values.append(weights.a * d + weights.b * crowd)
            best = min(values)
            current = expected.get(aid)
            expected[aid] = current if (current is not None and values[current] <= best) \
                else values.index(best)
        assert result.target_of == expected

        # iterate to a fixed point; every agent must then hold a minimal score
        assignment = result
        for it in range(200):
            nxt = update_assignments(agents, targets, assignment, weights, 0.0,
                                     np.random.default_rng(it))
            if nxt.target_of == assignment.target_of:
                break
            assignment = nxt
        else:
            pytest.fail("assignment pass did not reach a fixed point")
        for aid in range(n_agents):
            seq = seq_row(
                [(agents[aid] - tp).norm() for tp in targets],
                [count_surrounding(k, assignment, aid) for k in range(n_targets)],
                [], weights,
            )
            assert seq[assignment.target_of[aid]] == min(seq)
        checked += 1
    _announce(8, checked == 500, f"{checked}/500 instances match the brute-force oracle")


def test_criterion_09_metrics_oracle():
    rng = np.random.default_rng(90210)
    for _ in range(100):
        n = int(rng.integers(2, 15))
        agents = [Vec2(float(x), float(y)) for x, y in rng.uniform(0, 250, size=(n, 2))]
        target = Vec2(float(rng.uniform(50, 200)), float(rng.uniform(50, 200)))
        radius = float(rng.uniform(10.0, 60.0))

        occ = sector_occupancy(agents, target, radius)
        recount = [0] * 6
        for p in agents:
            dx, dy = p.x - target.x, p.y - target.y
            if math.sqrt(dx * dx + dy * dy) > radius:
                continue
            ang = math.atan2(dy, dx)
            if ang < 0.0:
                ang += 2.0 * math.pi
            k = int(ang / (math.pi / 3.0))
            recount[min(k, 5)] += 1
        assert list(occ) == recount

        expected_min = min(
            math.dist(agents[i], agents[j])
            for i in range(n) for j in range(i + 1, n)
        )
        assert min_pairwise_distance(agents) == expected_min
    _announce(9, True, "sector occupancy and min distance match brute force on "
                       "100 random snapshots")


def test_criterion_10_determinism():
    mismatches = []
    for name in ("paper_comparison", "baseline_comparison", "scene1", "scene2"):
        scenario = replace(parse_scenario(bundled_scenario_path(name)), steps=60)
        outputs = []
        for _ in range(2):
            traj = run(scenario)
            report = compute_metrics(
                traj, obstacles=scenario.obstacles, sector_radius=scenario.sector_radius,
                sector_count=scenario.sector_count, sample_interval=scenario.sample_interval,
            )
            outputs.append((trajectory_csv(traj), metrics_json(report)))
        if outputs[0] != outputs[1]:
            mismatches.append(name)
    ok = not mismatches
    _announce(10, ok, "byte-identical trajectory CSV and metrics JSON for all "
                      "bundled scenarios" if ok else f"mismatch in {mismatches}")


def test_criterion_11_levy_tail():
    params = LevyParams(alpha=1.5, min_step=5.0, max_step=125.0)
    rng = np.random.default_rng(555)
    samples = np.array([sample_levy_length(rng, params) for _ in range(100_000)])
    xs = np.geomspace(params.min_step, params.max_step / 10.0, 24)
    survival = np.array([(samples >= x).mean() for x in xs])
    slope = float(np.polyfit(np.log(xs), np.log(survival), 1)[0])
    ok = abs(slope - (-1.5)) <= 0.1
    _announce(11, ok, f"survival log-log slope {slope:.3f} within -1.5 +/- 0.1")

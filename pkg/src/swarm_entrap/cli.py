"""Command-line interface: run scenarios, recompute metrics, render plots.

Exit codes: 0 ok, 1 usage error, 2 invalid scenario, 3 runtime fault. Only
requested machine-readable output goes to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__
from .errors import ScenarioError, SimulationFault
from .metrics import compute_metrics
from .runio import (
    RunRecord,
    metrics_json,
    read_trajectory_csv,
    run_record_path_for,
    sha256_file,
    write_metrics_json,
    write_run_record,
    write_trajectory_csv,
)
from .scenario import load_scenario, resolve_scenario_path, scenario_digest
from .simulator import Scenario, run

THREADS_ENV = "SWARM_ENTRAP_THREADS"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="swarm-entrap", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    p_run = sub.add_parser("run", help="simulate a scenario and write result files")
    p_run.add_argument("scenario", help="scenario file path or bundled scenario name")
    p_run.add_argument("--out", default="out", metavar="DIR", help="output directory")
    p_run.add_argument("--seed", type=int, default=None, metavar="S", help="base seed override")
    p_run.add_argument(
        "--seeds", type=int, default=1, metavar="N", help="number of replicates (seed S..S+N-1)"
    )
    p_run.add_argument("--steps", type=int, default=None, metavar="K", help="step-count override")
    p_run.add_argument(
        "--baseline",
        action="store_true",
        help="replace the adaptive decision with pure nearest-target",
    )

    p_metrics = sub.add_parser("metrics", help="recompute metrics from a stored trajectory")
    p_metrics.add_argument("trajectory", help="trajectory CSV path")
    p_metrics.add_argument("scenario", help="scenario file path or bundled scenario name")

    p_plot = sub.add_parser("plot", help="render SVG figures from stored results")
    p_plot.add_argument("trajectory", help="trajectory CSV path")
    p_plot.add_argument("metrics", help="metrics JSON path")
    p_plot.add_argument("--scenario", required=True, help="scenario file (arena and obstacles)")
    p_plot.add_argument("--out", default="plots", metavar="DIR", help="output directory")
    return parser


def _worker_count(replicates: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    workers = os.cpu_count() or 1
    if cap is not None:
        try:
            workers = max(1, int(cap))
        except ValueError:
            raise ScenarioError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return max(1, min(workers, replicates))


def _run_one(scenario: Scenario, seed: int, out_dir: str, applied_defaults: dict) -> str:
    scenario = replace(scenario, seed=seed)
    trajectory = run(scenario)
    report = compute_metrics(
        trajectory,
        obstacles=scenario.obstacles,
        sector_radius=scenario.sector_radius,
        sector_count=scenario.sector_count,
        sample_interval=scenario.sample_interval,
    )
    base = f"{scenario.name or 'run'}.seed{seed}"
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    traj_path = out / f"{base}.traj.csv"
    metrics_path = out / f"{base}.metrics.json"
    write_trajectory_csv(trajectory, traj_path)
    write_metrics_json(report, metrics_path)
    record = RunRecord(
        scenario_name=scenario.name,
        scenario_digest=scenario_digest(scenario),
        seed=seed,
        steps=scenario.steps,
        baseline=scenario.baseline,
        trajectory_file=traj_path.name,
        trajectory_sha256=sha256_file(traj_path),
        metrics_file=metrics_path.name,
        metrics_sha256=sha256_file(metrics_path),
        engine_version=__version__,
        applied_defaults=applied_defaults,
        collision_events=report.collision_events,
        entrap_time_all=report.entrap_time_all,
    )
    write_run_record(record, out / f"{base}.run.json")
    return base


def _cmd_run(args) -> int:
    scenario, applied = load_scenario(resolve_scenario_path(args.scenario))
    if args.steps is not None:
        if args.steps < 0:
            raise ScenarioError(f"--steps must be >= 0, got {args.steps}")
        scenario = replace(scenario, steps=args.steps)
    if args.baseline:
        scenario = replace(scenario, baseline=True)
    if args.seeds < 1:
        raise ScenarioError(f"--seeds must be >= 1, got {args.seeds}")
    base_seed = scenario.seed if args.seed is None else args.seed
    seeds = [base_seed + i for i in range(args.seeds)]
    workers = _worker_count(len(seeds))
    if workers == 1:
        for seed in seeds:
            base = _run_one(scenario, seed, args.out, applied)
            print(f"completed {base}", file=sys.stderr)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_one, scenario, seed, args.out, applied) for seed in seeds
            ]
            for future in futures:
                print(f"completed {future.result()}", file=sys.stderr)
    return 0


def _cmd_metrics(args) -> int:
    scenario, _ = load_scenario(resolve_scenario_path(args.scenario))
    traj_path = Path(args.trajectory)
    if not traj_path.exists():
        raise ScenarioError(f"trajectory file not found: {traj_path}")
    record_path = run_record_path_for(traj_path)
    if record_path.exists():
        record = json.loads(record_path.read_text(encoding="utf-8"))
        if record.get("trajectory_sha256") != sha256_file(traj_path):
            print(
                f"warning: {traj_path} does not match the digest in {record_path.name}; "
                "the trajectory may have been modified",
                file=sys.stderr,
            )
        if record.get("scenario_digest") != scenario_digest(scenario):
            print(
                f"warning: scenario digest mismatch with {record_path.name}; "
                "metrics are computed against a different scenario than the run used",
                file=sys.stderr,
            )
    trajectory = read_trajectory_csv(traj_path)
    report = compute_metrics(
        trajectory,
        obstacles=scenario.obstacles,
        sector_radius=scenario.sector_radius,
        sector_count=scenario.sector_count,
        sample_interval=scenario.sample_interval,
    )
    sys.stdout.write(metrics_json(report))
    return 0


def _cmd_plot(args) -> int:
    from . import plots  # deferred: pulls in matplotlib

    scenario, _ = load_scenario(resolve_scenario_path(args.scenario))
    trajectory = read_trajectory_csv(args.trajectory)
    metrics_path = Path(args.metrics)
    if not metrics_path.exists():
        raise ScenarioError(f"metrics file not found: {metrics_path}")
    metrics = json.loads(metrics_path.read_text(encoding="utf-8"))
    paths = plots.render_all(trajectory, metrics, scenario, args.out)
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a command is required (run, metrics, or plot)")
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "metrics":
            return _cmd_metrics(args)
        return _cmd_plot(args)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except ScenarioError as e:
        print(f"scenario error: {e}", file=sys.stderr)
        return 2
    except (SimulationFault, OSError, json.JSONDecodeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

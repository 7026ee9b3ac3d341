"""Static SVG figures rendered from a trajectory and its metrics report."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import Circle as CirclePatch
from matplotlib.patches import Polygon as PolygonPatch
from matplotlib.patches import Rectangle

from .geometry import Circle, ConvexPolygon
from .simulator import Scenario, Trajectory

PLOT_FILES = (
    "overview.svg",
    "agents_per_target.svg",
    "sector_occupancy.svg",
    "min_distance.svg",
    "velocity_correlation.svg",
)


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_overview(trajectory: Trajectory, scenario: Scenario, path: Path) -> None:
    """Agent and target paths with the arena and obstacles."""
    fig, ax = plt.subplots(figsize=(7, 7))
    side = scenario.arena.side
    ax.add_patch(Rectangle((0, 0), side, side, fill=False, edgecolor="black", linewidth=1.2))
    for obstacle in scenario.obstacles:
        if isinstance(obstacle, Circle):
            ax.add_patch(
                CirclePatch(
                    (obstacle.center.x, obstacle.center.y),
                    obstacle.radius,
                    facecolor="0.75",
                    edgecolor="0.4",
                )
            )
        elif isinstance(obstacle, ConvexPolygon):
            ax.add_patch(
                PolygonPatch(
                    [(v.x, v.y) for v in obstacle.vertices],
                    facecolor="0.75",
                    edgecolor="0.4",
                )
            )
    n_agents = len(trajectory.snapshots[0].agents)
    for i in range(n_agents):
        xs = [w.agents[i].pos.x for w in trajectory.snapshots]
        ys = [w.agents[i].pos.y for w in trajectory.snapshots]
        ax.plot(xs, ys, linewidth=0.7, alpha=0.8)
        ax.plot(xs[-1], ys[-1], "o", markersize=3)
    for k in range(len(trajectory.snapshots[0].targets)):
        xs = [w.targets[k].pos.x for w in trajectory.snapshots]
        ys = [w.targets[k].pos.y for w in trajectory.snapshots]
        ax.plot(xs, ys, "--", linewidth=1.4, label=f"target {k}")
        ax.plot(xs[-1], ys[-1], "*", markersize=12)
    margin = 0.02 * side
    ax.set_xlim(-margin, side + margin)
    ax.set_ylim(-margin, side + margin)
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title("trajectories")
    ax.legend(loc="upper right", fontsize=8)
    _save(fig, path)


def plot_agents_per_target(metrics: dict, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(8, 4))
    series = np.asarray(metrics["agents_per_target"], dtype=float)
    steps = np.asarray(metrics["sample_steps"], dtype=float)
    for k in range(series.shape[1]):
        ax.plot(steps, series[:, k], label=f"target {k}")
    ax.set_xlabel("step")
    ax.set_ylabel("assigned agents")
    ax.set_title("agents per target")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_sector_occupancy(metrics: dict, path: Path) -> None:
    """Mean per-sector agent count per target over all samples."""
    occupancy = np.asarray(metrics["sector_occupancy"], dtype=float)
    n_targets = occupancy.shape[1]
    sectors = occupancy.shape[2]
    fig, ax = plt.subplots(figsize=(8, 4))
    width = 0.8 / n_targets
    xs = np.arange(sectors)
    for k in range(n_targets):
        ax.bar(xs + k * width, occupancy[:, k, :].mean(axis=0), width, label=f"target {k}")
    ax.set_xticks(xs + 0.4 - width / 2)
    ax.set_xticklabels([f"{i * 360 // sectors}-{(i + 1) * 360 // sectors}" for i in range(sectors)])
    ax.set_xlabel("sector [deg]")
    ax.set_ylabel("mean agents in sector")
    ax.set_title(f"sector occupancy (radius {metrics['sector_radius']} m)")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_min_distance(metrics: dict, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(8, 4))
    values = [v if v is not None else np.nan for v in metrics["min_pairwise_distance"]]
    ax.plot(values, linewidth=0.9)
    ax.set_xlabel("step")
    ax.set_ylabel("min pairwise distance [m]")
    ax.set_title("minimum agent separation")
    _save(fig, path)


def plot_velocity_correlation(metrics: dict, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(8, 4))
    series = np.asarray(metrics["velocity_correlation"], dtype=float)
    for row in series:
        ax.plot(row, linewidth=0.4, alpha=0.25, color="tab:blue")
    if series.size:
        ax.plot(series.mean(axis=0), linewidth=1.4, color="tab:red", label="mean")
        ax.legend(fontsize=8)
    ax.set_xlabel("step")
    ax.set_ylabel("velocity correlation")
    ax.set_ylim(-1.05, 1.05)
    ax.set_title("consecutive-velocity correlation")
    _save(fig, path)


def render_all(
    trajectory: Trajectory, metrics: dict, scenario: Scenario, out_dir: str | Path
) -> list[Path]:
    """Write the five standard figures into ``out_dir``; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / name for name in PLOT_FILES]
    plot_overview(trajectory, scenario, paths[0])
    plot_agents_per_target(metrics, paths[1])
    plot_sector_occupancy(metrics, paths[2])
    plot_min_distance(metrics, paths[3])
    plot_velocity_correlation(metrics, paths[4])
    return paths

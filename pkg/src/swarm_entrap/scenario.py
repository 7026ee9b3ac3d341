"""Scenario file loading, validation, serialization, and content digests.

Scenario files are strict JSON: unknown keys are rejected, every parameter
invariant is enforced at load time with a field-level message, and omitted
optional parameters fall back to engine defaults (the loader reports which
defaults were applied so run logs can echo them).
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path

from . import canonical
from .controller import ControllerParams
from .decision import DecisionWeights
from .errors import ScenarioError
from .geometry import Arena, Circle, ConvexPolygon, Obstacle, Vec2
from .simulator import Scenario, SpawnBox, validate_scenario
from .target_motion import LevyParams, TargetState

SCHEMA_VERSION = 1

_TOP_KEYS = {
    "schema_version", "name", "description", "arena", "obstacles", "agents",
    "targets", "controller", "decision", "levy", "steps", "seed",
    "sector_radius", "sector_count", "sample_interval", "baseline",
}
_CONTROLLER_KEYS = {
    "v_f", "c_t", "a_t", "p_t", "r_entrap", "r_arep", "p_arep", "r_trep",
    "p_trep", "c_d", "r_wall", "a_d", "p_d", "v_limit", "v_shill",
    "wall_term_variant",
}
_DECISION_KEYS = {"a", "b", "hysteresis", "extra"}
_LEVY_KEYS = {"alpha", "min_step", "max_step"}

_MISSING = object()


def _reject_unknown(obj: dict, allowed: set[str], context: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ScenarioError(f"{context}: unknown key(s) {unknown}")


def _number(value, context: str) -> float:
    if type(value) is bool or not isinstance(value, (int, float)):
        raise ScenarioError(f"{context}: expected a number, got {value!r}")
    return float(value)


def _integer(value, context: str) -> int:
    if type(value) is not int:
        raise ScenarioError(f"{context}: expected an integer, got {value!r}")
    return value


def _point(value, context: str) -> Vec2:
    if not (isinstance(value, list) and len(value) == 2):
        raise ScenarioError(f"{context}: expected [x, y], got {value!r}")
    return Vec2(_number(value[0], context + "[0]"), _number(value[1], context + "[1]"))


def _parse_obstacle(entry, context: str) -> Obstacle:
    if not isinstance(entry, dict):
        raise ScenarioError(f"{context}: expected an object, got {entry!r}")
    kind = entry.get("kind")
    try:
        if kind == "circle":
            _reject_unknown(entry, {"kind", "center", "radius"}, context)
            return Circle(
                _point(entry["center"], context + ".center"),
                _number(entry["radius"], context + ".radius"),
            )
        if kind == "polygon":
            _reject_unknown(entry, {"kind", "vertices"}, context)
            vertices = entry.get("vertices")
            if not isinstance(vertices, list):
                raise ScenarioError(f"{context}.vertices: expected a list")
            return ConvexPolygon(
                tuple(_point(v, f"{context}.vertices[{i}]") for i, v in enumerate(vertices))
            )
    except KeyError as e:
        raise ScenarioError(f"{context}: missing key {e.args[0]!r}") from None
    except ValueError as e:
        raise ScenarioError(f"{context}: {e}") from None
    raise ScenarioError(f"{context}.kind: expected 'circle' or 'polygon', got {kind!r}")


def _parse_agents(value, arena: Arena, context: str, applied: dict):
    if isinstance(value, list):
        return tuple(_point(v, f"{context}[{i}]") for i, v in enumerate(value))
    if isinstance(value, dict):
        _reject_unknown(value, {"count", "spawn", "min_separation"}, context)
        if "count" not in value:
            raise ScenarioError(f"{context}: spawn spec needs a 'count'")
        count = _integer(value["count"], context + ".count")
        if "spawn" in value:
            raw = value["spawn"]
            if not (isinstance(raw, list) and len(raw) == 4):
                raise ScenarioError(f"{context}.spawn: expected [x0, y0, x1, y1]")
            rect = tuple(_number(v, f"{context}.spawn[{i}]") for i, v in enumerate(raw))
        else:
            half = arena.side / 2.0
            rect = (0.0, 0.0, half, half)
            applied[context + ".spawn"] = list(rect)
        if "min_separation" in value:
            min_sep = _number(value["min_separation"], context + ".min_separation")
        else:
            min_sep = 0.0
            applied[context + ".min_separation"] = min_sep
        try:
            return SpawnBox(count, rect, min_sep)
        except ValueError as e:
            raise ScenarioError(f"{context}: {e}") from None
    raise ScenarioError(f"{context}: expected a list of points or a spawn spec object")


def _parse_targets(value, context: str, applied: dict):
    if not (isinstance(value, list) and value):
        raise ScenarioError(f"{context}: expected a non-empty list")
    states = []
    priorities = []
    for i, entry in enumerate(value):
        ctx = f"{context}[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioError(f"{ctx}: expected an object, got {entry!r}")
        _reject_unknown(entry, {"pos", "speed", "priority"}, ctx)
        if "pos" not in entry or "speed" not in entry:
            raise ScenarioError(f"{ctx}: needs 'pos' and 'speed'")
        pos = _point(entry["pos"], ctx + ".pos")
        speed = _number(entry["speed"], ctx + ".speed")
        if "priority" in entry:
            priorities.append(_number(entry["priority"], ctx + ".priority"))
        else:
            priorities.append(0.0)
            applied[ctx + ".priority"] = 0.0
        try:
            states.append(TargetState(id=i, pos=pos, speed=speed))
        except ValueError as e:
            raise ScenarioError(f"{ctx}: {e}") from None
    return tuple(states), tuple(priorities)


def _build_section(data: dict, key: str, allowed: set[str], builder, applied: dict):
    section = data.get(key, {})
    if not isinstance(section, dict):
        raise ScenarioError(f"{key}: expected an object, got {section!r}")
    _reject_unknown(section, allowed, key)
    try:
        built = builder(**section)
    except TypeError as e:
        raise ScenarioError(f"{key}: {e}") from None
    except ValueError as e:
        raise ScenarioError(f"{key}: {e}") from None
    for field_name in sorted(allowed - set(section)):
        if hasattr(built, field_name):
            applied[f"{key}.{field_name}"] = getattr(built, field_name)
    return built


def build_scenario(data: dict) -> tuple[Scenario, dict]:
    """Construct and fully validate a Scenario from plain JSON data.

    Returns the scenario plus a mapping of every defaulted field to the value
    that was applied.
    """
    if not isinstance(data, dict):
        raise ScenarioError(f"top level: expected an object, got {type(data).__name__}")
    _reject_unknown(data, _TOP_KEYS, "top level")
    applied: dict = {}

    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioError(
            f"schema_version: expected {SCHEMA_VERSION}, got {version!r}"
        )
    for key in ("arena", "agents", "targets", "steps", "seed"):
        if key not in data:
            raise ScenarioError(f"{key}: required key is missing")

    if not isinstance(data["arena"], dict):
        raise ScenarioError("arena: expected an object")
    _reject_unknown(data["arena"], {"side"}, "arena")
    if "side" not in data["arena"]:
        raise ScenarioError("arena.side: required key is missing")
    try:
        arena = Arena(_number(data["arena"]["side"], "arena.side"))
    except ValueError as e:
        raise ScenarioError(f"arena: {e}") from None

    raw_obstacles = data.get("obstacles", [])
    if not isinstance(raw_obstacles, list):
        raise ScenarioError("obstacles: expected a list")
    if "obstacles" not in data:
        applied["obstacles"] = []
    obstacles = tuple(
        _parse_obstacle(entry, f"obstacles[{i}]") for i, entry in enumerate(raw_obstacles)
    )

    agents = _parse_agents(data["agents"], arena, "agents", applied)
    targets, priorities = _parse_targets(data["targets"], "targets", applied)

    controller = _build_section(data, "controller", _CONTROLLER_KEYS, ControllerParams, applied)

    decision_section = data.get("decision", {})
    if not isinstance(decision_section, dict):
        raise ScenarioError("decision: expected an object")
    _reject_unknown(decision_section, _DECISION_KEYS, "decision")
    weight_kwargs = {}
    for key in ("a", "b"):
        if key in decision_section:
            weight_kwargs[key] = _number(decision_section[key], f"decision.{key}")
    if "extra" in decision_section:
        raw_extra = decision_section["extra"]
        if not isinstance(raw_extra, list):
            raise ScenarioError("decision.extra: expected a list of [name, weight] pairs")
        pairs = []
        for i, pair in enumerate(raw_extra):
            if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str)):
                raise ScenarioError(
                    f"decision.extra[{i}]: expected [name, weight], got {pair!r}"
                )
            pairs.append((pair[0], _number(pair[1], f"decision.extra[{i}][1]")))
        weight_kwargs["extra"] = tuple(pairs)
    try:
        weights = DecisionWeights(**weight_kwargs)
    except ValueError as e:
        raise ScenarioError(f"decision: {e}") from None
    for field_name in sorted({"a", "b", "extra"} - set(weight_kwargs)):
        value = getattr(weights, field_name)
        applied[f"decision.{field_name}"] = (
            [list(p) for p in value] if field_name == "extra" else value
        )
    if "hysteresis" in decision_section:
        hysteresis = _number(decision_section["hysteresis"], "decision.hysteresis")
    else:
        hysteresis = 5.0
        applied["decision.hysteresis"] = hysteresis
    for name, _ in weights.extra:
        if name != "priority":
            raise ScenarioError(
                f"decision.extra: no factor row available for {name!r} "
                "(only 'priority' is supplied by scenarios)"
            )

    levy = _build_section(data, "levy", _LEVY_KEYS, LevyParams, applied)

    steps = _integer(data["steps"], "steps")
    if steps < 1:
        raise ScenarioError(f"steps: must be >= 1, got {steps}")
    seed = _integer(data["seed"], "seed")

    simple_defaults = {
        "name": "",
        "description": "",
        "sector_radius": 32.0,
        "sector_count": 6,
        "sample_interval": 1,
        "baseline": False,
    }
    simple = {}
    for key, default in simple_defaults.items():
        if key in data:
            value = data[key]
            if key in ("name", "description"):
                if not isinstance(value, str):
                    raise ScenarioError(f"{key}: expected a string")
            elif key == "baseline":
                if not isinstance(value, bool):
                    raise ScenarioError(f"{key}: expected true or false")
            elif key in ("sector_count", "sample_interval"):
                value = _integer(value, key)
            else:
                value = _number(value, key)
            simple[key] = value
        else:
            simple[key] = default
            applied[key] = default

    try:
        scenario = Scenario(
            arena=arena,
            targets=targets,
            agents=agents,
            steps=steps,
            seed=seed,
            obstacles=obstacles,
            controller=controller,
            weights=weights,
            hysteresis=hysteresis,
            levy=levy,
            target_priorities=priorities,
            sector_radius=simple["sector_radius"],
            sector_count=simple["sector_count"],
            sample_interval=simple["sample_interval"],
            baseline=simple["baseline"],
            name=simple["name"],
            description=simple["description"],
        )
    except ValueError as e:
        raise ScenarioError(str(e)) from None
    validate_scenario(scenario)
    return scenario, applied


def load_scenario(path: str | Path) -> tuple[Scenario, dict]:
    """Parse a scenario file; returns (scenario, applied defaults)."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: invalid JSON at byte {e.pos}: {e.msg}") from None
    return build_scenario(data)


def parse_scenario(path: str | Path) -> Scenario:
    """Parse and fully validate a scenario file."""
    return load_scenario(path)[0]


def bundled_scenario_path(name: str) -> Path:
    """Filesystem path of a scenario shipped with the package."""
    if not name.endswith(".json"):
        name += ".json"
    ref = resources.files("swarm_entrap").joinpath("scenarios", name)
    with resources.as_file(ref) as p:
        return Path(p)


def resolve_scenario_path(spec: str) -> Path:
    """Interpret a CLI argument as a file path or a bundled scenario name."""
    p = Path(spec)
    if p.exists():
        return p
    base = Path(spec).name
    try:
        bundled = bundled_scenario_path(base)
    except (FileNotFoundError, ModuleNotFoundError):
        raise ScenarioError(f"scenario file not found: {spec}") from None
    if bundled.exists():
        return bundled
    raise ScenarioError(f"scenario file not found: {spec}")


def scenario_to_dict(s: Scenario) -> dict:
    """Fully explicit plain-data form (all defaults materialized)."""
    if isinstance(s.agents, SpawnBox):
        agents = {
            "count": s.agents.count,
            "spawn": list(s.spawn_rect()),
            "min_separation": s.agents.min_separation,
        }
    else:
        agents = [[p.x, p.y] for p in s.agents]
    obstacles = []
    for obstacle in s.obstacles:
        if isinstance(obstacle, Circle):
            obstacles.append(
                {
                    "kind": "circle",
                    "center": [obstacle.center.x, obstacle.center.y],
                    "radius": obstacle.radius,
                }
            )
        else:
            obstacles.append(
                {"kind": "polygon", "vertices": [[v.x, v.y] for v in obstacle.vertices]}
            )
    return {
        "schema_version": SCHEMA_VERSION,
        "name": s.name,
        "description": s.description,
        "arena": {"side": s.arena.side},
        "obstacles": obstacles,
        "agents": agents,
        "targets": [
            {"pos": [t.pos.x, t.pos.y], "speed": t.speed, "priority": prio}
            for t, prio in zip(s.targets, s.target_priorities)
        ],
        "controller": {
            "v_f": s.controller.v_f,
            "c_t": s.controller.c_t,
            "a_t": s.controller.a_t,
            "p_t": s.controller.p_t,
            "r_entrap": s.controller.r_entrap,
            "r_arep": s.controller.r_arep,
            "p_arep": s.controller.p_arep,
            "r_trep": s.controller.r_trep,
            "p_trep": s.controller.p_trep,
            "c_d": s.controller.c_d,
            "r_wall": s.controller.r_wall,
            "a_d": s.controller.a_d,
            "p_d": s.controller.p_d,
            "v_limit": s.controller.v_limit,
            "v_shill": s.controller.v_shill,
            "wall_term_variant": s.controller.wall_term_variant,
        },
        "decision": {
            "a": s.weights.a,
            "b": s.weights.b,
            "hysteresis": s.hysteresis,
            "extra": [[name, w] for name, w in s.weights.extra],
        },
        "levy": {
            "alpha": s.levy.alpha,
            "min_step": s.levy.min_step,
            "max_step": s.levy.max_step,
        },
        "steps": s.steps,
        "seed": s.seed,
        "sector_radius": s.sector_radius,
        "sector_count": s.sector_count,
        "sample_interval": s.sample_interval,
        "baseline": s.baseline,
    }


def serialize_scenario(s: Scenario) -> str:
    return canonical.dumps(scenario_to_dict(s), indent=2) + "\n"


def scenario_digest(s: Scenario) -> str:
    """SHA-256 of the canonical serialized scenario content."""
    return hashlib.sha256(serialize_scenario(s).encode("utf-8")).hexdigest()

"""Scenario description, JSON schema and loader."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, fields, replace
from functools import cached_property
from pathlib import Path

import jsonschema
import numpy as np

from .controller import Guidance, MppiController, MppiParams
from .geometry import FIXTURE_DIR, FootprintSpec, footprint_from_dict, footprint_to_dict
from .hybrid import HybridController, HybridParams, ModeSpec
from .kinematics import KinematicLimits, MotionModel, default_limits
from .world import Obstacle, SensorConfig


class ScenarioError(ValueError):
    """Invalid scenario; ``path`` is a JSON pointer to the offending value."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path


_vec2 = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_pose = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_nums = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_limits = {
    "type": "object",
    "properties": {
        "v": _nums, "a": _nums,
        "v_min": _nums, "v_max": _nums, "a_min": _nums, "a_max": _nums,
    },
    "additionalProperties": False,
}
_model = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["diff", "ackermann", "omni", "spin", "parallel"]},
        "wheelbase": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}
_footprint = {
    "oneOf": [
        {"type": "string"},
        {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "name": {"type": "string"},
                "kind": {"enum": ["rectangles", "polygon"]},
                "rectangles": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["center", "half_extent"],
                        "properties": {"center": _vec2, "half_extent": _vec2},
                    },
                },
                "vertices": {"type": "array", "items": _vec2, "minItems": 3},
            },
        },
    ]
}
_obstacle = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["polygon", "disc"]},
        "vertices": {"type": "array", "items": _vec2, "minItems": 3},
        "center": _vec2,
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "trail": {
            "type": "object",
            "required": ["waypoints", "speed"],
            "properties": {
                "waypoints": {"type": "array", "items": _vec2, "minItems": 2},
                "speed": {"type": "number", "minimum": 0},
            },
        },
    },
    "allOf": [
        {"if": {"properties": {"type": {"const": "polygon"}}}, "then": {"required": ["vertices"]}},
        {"if": {"properties": {"type": {"const": "disc"}}}, "then": {"required": ["center", "radius"]}},
    ],
}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["footprint", "model", "obstacles", "start", "goal", "goal_tolerance", "guidance", "time_limit"],
    "properties": {
        "name": {"type": "string"},
        "footprint": _footprint,
        "model": _model,
        "limits": _limits,
        "mppi": {"type": "object"},
        "hybrid": {
            "type": "object",
            "required": ["modes"],
            "properties": {
                "params": {"type": "object"},
                "initial_mode": {"type": "integer", "minimum": 0},
                "modes": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["name", "kind"],
                        "properties": {
                            "name": {"type": "string"},
                            "kind": {"enum": ["diff", "ackermann", "omni", "spin", "parallel"]},
                            "wheelbase": {"type": "number", "exclusiveMinimum": 0},
                            "limits": _limits,
                        },
                    },
                },
            },
        },
        "obstacles": {"type": "array", "items": _obstacle},
        "start": _pose,
        "goal": _pose,
        "goal_tolerance": {
            "type": "object",
            "required": ["position", "heading"],
            "properties": {
                "position": {"type": "number", "exclusiveMinimum": 0},
                "heading": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "guidance": {"type": "array", "items": _vec2, "minItems": 1},
        "sensor": {
            "type": "object",
            "properties": {
                "range": {"type": "number", "exclusiveMinimum": 0},
                "budget": {"type": "integer", "minimum": 1},
                "spacing": {"type": "number", "exclusiveMinimum": 0},
                "bins": {"type": "integer", "minimum": 1},
                "downsample": {"enum": ["uniform", "nearest"]},
            },
            "additionalProperties": False,
        },
        "time_limit": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "gap": {
            "type": "object",
            "required": ["a", "b"],
            "properties": {"a": _vec2, "b": _vec2},
        },
        "planner": {"enum": ["exact", "hull"]},
        "stall": {
            "type": "object",
            "properties": {
                "window": {"type": "number", "exclusiveMinimum": 0},
                "distance": {"type": "number", "minimum": 0},
            },
        },
        "warm_start": _nums,
    },
    "additionalProperties": False,
}


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else ""


def validate_scenario_dict(data) -> None:
    """Raise :class:`ScenarioError` for the first schema violation found."""
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ScenarioError(err.message, _pointer(err.absolute_path))


def _limits_from(data: dict | None, kind: str, where: str) -> KinematicLimits:
    if not data:
        return default_limits(kind)
    try:
        if "v" in data:
            return KinematicLimits.symmetric(data["v"], data["a"])
        return KinematicLimits(*(tuple(data[k]) for k in ("v_min", "v_max", "a_min", "a_max")))
    except (KeyError, ValueError, TypeError) as exc:
        raise ScenarioError(str(exc), where) from exc


def _limits_to(lim: KinematicLimits) -> dict:
    return {"v_min": list(lim.v_min), "v_max": list(lim.v_max), "a_min": list(lim.a_min), "a_max": list(lim.a_max)}


def _resolve_footprint(spec, base_dir: Path | None) -> FootprintSpec:
    if isinstance(spec, dict):
        return footprint_from_dict(spec)
    candidates = []
    if base_dir is not None:
        candidates.append(base_dir / spec)
    candidates += [Path(spec), FIXTURE_DIR / "footprints" / spec, FIXTURE_DIR / "footprints" / f"{spec}.json"]
    for c in candidates:
        if c.is_file():
            with open(c) as f:
                return footprint_from_dict(json.load(f))
    raise ScenarioError(f"footprint file {spec!r} not found", "/footprint")


@dataclass(frozen=True, eq=False)
class Scenario:
    footprint: FootprintSpec
    model: MotionModel
    limits: KinematicLimits
    mppi: MppiParams
    obstacles: tuple[Obstacle, ...]
    start: tuple[float, float, float]
    goal: tuple[float, float, float]
    goal_tolerance: tuple[float, float]
    guidance: np.ndarray
    sensor: SensorConfig
    time_limit: float
    seed: int = 0
    gap: tuple | None = None
    hybrid: HybridParams | None = None
    hybrid_modes: tuple[ModeSpec, ...] = ()
    initial_mode: int = 0
    planner: str = "exact"
    stall_window: float = 15.0
    stall_distance: float = 0.05
    warm_start: tuple[float, ...] | None = None
    name: str = "scenario"

    @cached_property
    def guidance_obj(self) -> Guidance:
        return Guidance(self.guidance, self.goal)

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=int(seed), mppi=replace(self.mppi, rng_seed=int(seed)))

    def build_controller(self, footprint: FootprintSpec | None = None):
        fp = footprint if footprint is not None else self.footprint
        if self.hybrid is not None:
            return HybridController(list(self.hybrid_modes), fp, self.mppi, self.hybrid, self.initial_mode)
        ctrl = MppiController(self.model, fp, self.limits, self.mppi)
        if self.warm_start is not None:
            ctrl.warm_start(self.warm_start)
        return ctrl

    # -- serialisation ---------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> "Scenario":
        validate_scenario_dict(data)
        fp = _resolve_footprint(data["footprint"], base_dir)
        m = data["model"]
        model = MotionModel(m["kind"], float(m.get("wheelbase", 1.0)))
        limits = _limits_from(data.get("limits"), model.kind, "/limits")
        seed = int(data.get("seed", 0))
        mp = dict(data.get("mppi", {}))
        known = {f.name for f in fields(MppiParams)}
        for k in mp:
            if k not in known:
                raise ScenarioError(f"unknown mppi parameter {k!r}", f"/mppi/{k}")
        for k in ("sigma", "w_ctrl"):
            if isinstance(mp.get(k), list):
                mp[k] = tuple(mp[k])
        mp.setdefault("rng_seed", seed)
        try:
            mppi = MppiParams(**mp)
        except (TypeError, ValueError) as exc:
            raise ScenarioError(str(exc), "/mppi") from exc
        obstacles = []
        for i, ob in enumerate(data["obstacles"]):
            trail = ob.get("trail")
            try:
                obstacles.append(
                    Obstacle(
                        ob["type"],
                        vertices=ob.get("vertices"),
                        center=ob.get("center"),
                        radius=float(ob.get("radius", 0.0)),
                        trail=None if trail is None else trail["waypoints"],
                        speed=0.0 if trail is None else float(trail["speed"]),
                    )
                )
            except ValueError as exc:
                raise ScenarioError(str(exc), f"/obstacles/{i}") from exc
        hybrid, modes, initial = None, (), 0
        if "hybrid" in data:
            h = data["hybrid"]
            try:
                hybrid = HybridParams(**h.get("params", {}))
            except (TypeError, ValueError) as exc:
                raise ScenarioError(str(exc), "/hybrid/params") from exc
            modes = tuple(
                ModeSpec(
                    md["name"],
                    MotionModel(md["kind"], float(md.get("wheelbase", 1.0))),
                    _limits_from(md.get("limits"), md["kind"], f"/hybrid/modes/{i}/limits"),
                )
                for i, md in enumerate(h["modes"])
            )
            initial = int(h.get("initial_mode", 0))
            if initial >= len(modes):
                raise ScenarioError("initial mode out of range", "/hybrid/initial_mode")
        gap = None
        if "gap" in data:
            gap = (tuple(data["gap"]["a"]), tuple(data["gap"]["b"]))
        tol = data["goal_tolerance"]
        stall = data.get("stall", {})
        return cls(
            footprint=fp,
            model=model,
            limits=limits,
            mppi=mppi,
            obstacles=tuple(obstacles),
            start=tuple(float(v) for v in data["start"]),
            goal=tuple(float(v) for v in data["goal"]),
            goal_tolerance=(float(tol["position"]), float(tol["heading"])),
            guidance=np.asarray(data["guidance"], dtype=float),
            sensor=SensorConfig(**data.get("sensor", {})),
            time_limit=float(data["time_limit"]),
            seed=seed,
            gap=gap,
            hybrid=hybrid,
            hybrid_modes=modes,
            initial_mode=initial,
            planner=data.get("planner", "exact"),
            stall_window=float(stall.get("window", 15.0)),
            stall_distance=float(stall.get("distance", 0.05)),
            warm_start=tuple(data["warm_start"]) if "warm_start" in data else None,
            name=data.get("name", "scenario"),
        )

    def to_dict(self) -> dict:
        mp = {f.name: getattr(self.mppi, f.name) for f in fields(MppiParams)}
        for k in ("sigma", "w_ctrl"):
            if isinstance(mp[k], tuple):
                mp[k] = list(mp[k])
        if mp["sigma"] is None:
            del mp["sigma"]
        obs = []
        for ob in self.obstacles:
            d: dict = {"type": ob.kind}
            if ob.kind == "polygon":
                d["vertices"] = np.asarray(ob.vertices).tolist()
            else:
                d["center"] = list(ob.center)
                d["radius"] = ob.radius
            if ob.trail is not None:
                d["trail"] = {"waypoints": ob.trail.tolist(), "speed": ob.speed}
            obs.append(d)
        out = {
            "name": self.name,
            "footprint": footprint_to_dict(self.footprint),
            "model": {"kind": self.model.kind, "wheelbase": self.model.wheelbase},
            "limits": _limits_to(self.limits),
            "mppi": mp,
            "obstacles": obs,
            "start": list(self.start),
            "goal": list(self.goal),
            "goal_tolerance": {"position": self.goal_tolerance[0], "heading": self.goal_tolerance[1]},
            "guidance": np.asarray(self.guidance).tolist(),
            "sensor": {f.name: getattr(self.sensor, f.name) for f in fields(SensorConfig)},
            "time_limit": self.time_limit,
            "seed": self.seed,
            "planner": self.planner,
            "stall": {"window": self.stall_window, "distance": self.stall_distance},
        }
        if self.gap is not None:
            out["gap"] = {"a": list(self.gap[0]), "b": list(self.gap[1])}
        if self.hybrid is not None:
            out["hybrid"] = {
                "params": {f.name: getattr(self.hybrid, f.name) for f in fields(HybridParams)},
                "initial_mode": self.initial_mode,
                "modes": [
                    {"name": m.name, "kind": m.model.kind, "wheelbase": m.model.wheelbase,
                     "limits": _limits_to(m.resolved_limits())}
                    for m in self.hybrid_modes
                ],
            }
        if self.warm_start is not None:
            out["warm_start"] = list(self.warm_start)
        return out


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed JSON: {exc}") from exc
    return Scenario.from_dict(data, base_dir=path.parent)


def save_scenario(scenario: Scenario | dict, path) -> None:
    data = scenario.to_dict() if isinstance(scenario, Scenario) else copy.deepcopy(scenario)
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
        f.write("\n")

"""Deterministic 2D world: obstacles, a point sensor, truth checks, episodes.

Obstacles are polygons or discs, either static or sliding back and forth
along a waypoint trail. They never move inside a control horizon; the world
advances between control cycles only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .geometry import (
    FootprintSpec,
    ObstacleSet,
    PolygonFootprint,
    body_to_world,
    boundary_distance,
    hull_footprint,
    point_in_polygon,
    world_to_body,
)
from .kinematics import wrap_angle


# ---------------------------------------------------------------------------
# obstacles


@dataclass(frozen=True, eq=False)
class Obstacle:
    """Polygon (``vertices``) or disc (``center``, ``radius``).

    A moving obstacle is displaced by ``trail(s) - trail(0)`` where ``s`` is
    the ping-pong arc length travelled at ``speed``.
    """

    kind: str
    vertices: np.ndarray | None = None
    center: tuple[float, float] | None = None
    radius: float = 0.0
    trail: np.ndarray | None = None
    speed: float = 0.0

    def __post_init__(self):
        if self.kind == "polygon":
            poly = PolygonFootprint(self.vertices)
            object.__setattr__(self, "vertices", np.asarray(poly.vertices))
        elif self.kind == "disc":
            if not self.radius > 0:
                raise ValueError("disc radius must be positive")
            object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        else:
            raise ValueError(f"unknown obstacle kind {self.kind!r}")
        if self.speed < 0:
            raise ValueError("obstacle speed must be nonnegative")
        if self.trail is not None:
            tr = np.asarray(self.trail, dtype=float).reshape(-1, 2)
            if len(tr) < 2:
                raise ValueError("a trail needs at least two waypoints")
            object.__setattr__(self, "trail", tr)

    @property
    def moving(self) -> bool:
        return self.trail is not None and self.speed > 0

    @cached_property
    def _trail_geometry(self):
        seg = np.diff(self.trail, axis=0)
        lens = np.linalg.norm(seg, axis=1)
        return seg, lens, np.concatenate([[0.0], np.cumsum(lens)])

    def trail_position(self, t: float) -> np.ndarray:
        if self.trail is None:
            return np.zeros(2)
        seg, lens, cum = self._trail_geometry
        total = cum[-1]
        if total == 0 or self.speed == 0:
            return self.trail[0].copy()
        s = math.fmod(self.speed * t, 2 * total)
        if s > total:
            s = 2 * total - s
        i = int(np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(lens) - 1))
        frac = (s - cum[i]) / lens[i] if lens[i] > 0 else 0.0
        return self.trail[i] + frac * seg[i]

    def offset(self, t: float) -> np.ndarray:
        if not self.moving:
            return np.zeros(2)
        return self.trail_position(t) - self.trail[0]

    def boundary_samples(self, spacing: float) -> np.ndarray:
        """Boundary points at the initial position, vertices included."""
        if self.kind == "disc":
            n = max(8, int(math.ceil(2 * math.pi * self.radius / spacing)))
            a = np.arange(n) * (2 * math.pi / n)
            return np.asarray(self.center) + self.radius * np.stack([np.cos(a), np.sin(a)], axis=1)
        out = []
        v = self.vertices
        for a, b in zip(v, np.roll(v, -1, axis=0)):
            n = max(1, int(math.ceil(np.linalg.norm(b - a) / spacing)))
            f = np.arange(n)[:, None] / n
            out.append(a + f * (b - a))
        return np.concatenate(out)


@dataclass(frozen=True, eq=False)
class WorldState:
    obstacles: tuple[Obstacle, ...]
    time: float = 0.0

    def shapes(self):
        """Current (kind, geometry) pairs; polygons as vertex arrays."""
        out = []
        for ob in self.obstacles:
            off = ob.offset(self.time)
            if ob.kind == "polygon":
                out.append(("polygon", ob.vertices + off))
            else:
                out.append(("disc", (np.asarray(ob.center) + off, ob.radius)))
        return out


def step_world(world: WorldState, dt: float) -> WorldState:
    if not dt > 0:
        raise ValueError("dt must be positive")
    return WorldState(world.obstacles, world.time + dt)


# ---------------------------------------------------------------------------
# sensing


@dataclass(frozen=True)
class SensorConfig:
    range: float = 8.0
    budget: int = 100
    spacing: float = 0.05
    bins: int = 720
    downsample: str = "uniform"  # or "nearest"

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("sensor budget must be at least 1")
        if self.downsample not in ("uniform", "nearest"):
            raise ValueError(f"unknown downsample mode {self.downsample!r}")


class Sensor:
    """Caches boundary samples so each cycle only shifts moving obstacles."""

    def __init__(self, obstacles, config: SensorConfig):
        self.config = config
        self.obstacles = tuple(obstacles)
        self._samples = [ob.boundary_samples(config.spacing) for ob in self.obstacles]

    def sample_points(self, world: WorldState) -> np.ndarray:
        if not self._samples:
            return np.zeros((0, 2))
        return np.concatenate(
            [s + ob.offset(world.time) for s, ob in zip(self._samples, self.obstacles)]
        )

    def __call__(self, world: WorldState, pose, seed: int = 0, cycle: int = 0) -> ObstacleSet:
        return sense(world, pose, self.config, seed, cycle, self)


def _ray_ranges(origin, angles, shapes, max_range) -> np.ndarray:
    """Distance along each ray to the first obstacle boundary (capped)."""
    d = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    best = np.full(len(angles), np.inf)
    seg_a, seg_b, discs = [], [], []
    for kind, geom in shapes:
        if kind == "polygon":
            seg_a.append(geom)
            seg_b.append(np.roll(geom, -1, axis=0))
        else:
            discs.append(geom)
    if seg_a:
        a = np.concatenate(seg_a) - origin
        e = np.concatenate(seg_b) - origin - a
        # solve origin + t d = a + u e
        den = d[:, None, 0] * e[None, :, 1] - d[:, None, 1] * e[None, :, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (a[None, :, 0] * e[None, :, 1] - a[None, :, 1] * e[None, :, 0]) / den
            u = (a[None, :, 0] * d[:, None, 1] - a[None, :, 1] * d[:, None, 0]) / den
        ok = (np.abs(den) > 1e-15) & (t >= 0) & (u >= 0) & (u <= 1)
        best = np.minimum(best, np.min(np.where(ok, t, np.inf), axis=1))
    for c, r in discs:
        oc = np.asarray(c) - origin
        b = d @ oc
        disc = b * b - (oc @ oc - r * r)
        sq = np.sqrt(np.maximum(disc, 0.0))
        t0, t1 = b - sq, b + sq
        t = np.where(t0 >= 0, t0, np.where(t1 >= 0, 0.0, np.inf))
        best = np.minimum(best, np.where(disc >= 0, t, np.inf))
    return np.minimum(best, max_range)


def sense(world: WorldState, pose, sensor: SensorConfig, seed: int = 0, cycle: int = 0, cache: Sensor | None = None) -> ObstacleSet:
    """Visible boundary samples within range, at most ``budget`` of them."""
    cache = cache if cache is not None else Sensor(world.obstacles, sensor)
    pts = cache.sample_points(world)
    origin = np.array(pose[:2], dtype=float)
    if len(pts) == 0:
        return ObstacleSet.empty(sensor.budget)
    rel = pts - origin
    rng_ = np.hypot(rel[:, 0], rel[:, 1])
    keep = rng_ <= sensor.range
    pts, rel, rng_ = pts[keep], rel[keep], rng_[keep]
    if len(pts):
        width = 2 * math.pi / sensor.bins
        ang = np.arctan2(rel[:, 1], rel[:, 0])
        b = np.minimum(((ang + math.pi) / width).astype(int), sensor.bins - 1)
        # nearest sample per bin
        order = np.lexsort((rng_, b))
        first = np.ones(len(order), dtype=bool)
        first[1:] = b[order][1:] != b[order][:-1]
        sel = order[first]
        # drop samples hidden behind another shape along both bin-edge rays
        edges = -math.pi + np.arange(sensor.bins + 1) * width
        ranges = _ray_ranges(origin, edges, world.shapes(), np.inf)
        limit = np.maximum(ranges[b[sel]], ranges[b[sel] + 1]) + sensor.spacing
        sel = np.sort(sel[rng_[sel] <= limit])
        pts, rng_ = pts[sel], rng_[sel]
    if len(pts) > sensor.budget:
        if sensor.downsample == "nearest":
            idx = np.sort(np.argsort(rng_, kind="stable")[: sensor.budget])
        else:
            gen = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 0x5E75, cycle])))
            idx = np.sort(gen.choice(len(pts), sensor.budget, replace=False))
        pts = pts[idx]
    return ObstacleSet.from_points(pts, sensor.budget)


# ---------------------------------------------------------------------------
# ground truth


def _segments_intersect_any(a0, a1, b0, b1) -> bool:
    """Any closed-segment intersection between two edge lists (vectorised)."""

    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])

    A0, A1 = a0[:, None, :], a1[:, None, :]
    B0, B1 = b0[None, :, :], b1[None, :, :]
    o1, o2 = orient(A0, A1, B0), orient(A0, A1, B1)
    o3, o4 = orient(B0, B1, A0), orient(B0, B1, A1)
    proper = (o1 * o2 <= 0) & (o3 * o4 <= 0)
    # reject collinear-but-disjoint pairs that the <= test lets through
    collinear = (o1 == 0) & (o2 == 0)
    if np.any(proper & collinear):
        lo_a = np.minimum(A0, A1)
        hi_a = np.maximum(A0, A1)
        lo_b = np.minimum(B0, B1)
        hi_b = np.maximum(B0, B1)
        overlap = np.all((lo_a <= hi_b) & (lo_b <= hi_a), axis=-1)
        proper = proper & (~collinear | overlap)
    return bool(np.any(proper))


def _posed_polygons(footprint: FootprintSpec, pose) -> list[np.ndarray]:
    return [body_to_world(p, pose) for p in footprint.polygons()]


def ground_truth_collision(footprint: FootprintSpec, pose, shapes) -> bool:
    """Shape-vs-shape intersection of the posed footprint with ``shapes``."""
    polys = _posed_polygons(footprint, pose)
    for kind, geom in shapes:
        if kind == "disc":
            c, r = geom
            if float(footprint.signed_distance(world_to_body(np.asarray(c), pose))) < r:
                return True
            continue
        for fpoly in polys:
            if _segments_intersect_any(fpoly, np.roll(fpoly, -1, axis=0), geom, np.roll(geom, -1, axis=0)):
                return True
            if point_in_polygon(fpoly[0], PolygonFootprint(geom, check_simple=False)):
                return True
            if point_in_polygon(geom[0], PolygonFootprint(fpoly, check_simple=False)):
                return True
    return False


def ground_truth_clearance(footprint: FootprintSpec, pose, shapes) -> float:
    """Euclidean gap between the posed footprint and the nearest shape (0 on contact)."""
    if ground_truth_collision(footprint, pose, shapes):
        return 0.0
    best = math.inf
    polys = _posed_polygons(footprint, pose)
    for kind, geom in shapes:
        if kind == "disc":
            c, r = geom
            d = float(footprint.signed_distance(world_to_body(np.asarray(c), pose))) - r
            best = min(best, d)
            continue
        body_v = world_to_body(geom, pose)
        best = min(best, float(np.min(footprint.signed_distance(body_v))))
        ob = PolygonFootprint(geom, check_simple=False)
        for fpoly in polys:
            best = min(best, float(np.min(boundary_distance(fpoly, ob))))
    return max(best, 0.0)


# ---------------------------------------------------------------------------
# DoN


def don_width(footprint: FootprintSpec, model_kind: str, translation_direction=None, omni_rule: str = "axes") -> float:
    """Robot width W_r across the direction of travel.

    ``omni_rule="axes"`` takes the smaller of the body x/y widths, which is how
    the gap sweep tables quote the L-shape; ``"all"`` minimises over every
    direction (hull edge normals).
    """
    from .geometry import convex_hull, directional_width

    if translation_direction is not None:
        d = np.asarray(translation_direction, dtype=float)
        d = d / np.linalg.norm(d)
        return directional_width(footprint, np.array([-d[1], d[0]]))
    if model_kind in ("diff", "ackermann"):
        return directional_width(footprint, np.array([0.0, 1.0]))
    if model_kind == "parallel":
        return directional_width(footprint, np.array([1.0, 0.0]))
    if model_kind == "omni":
        if omni_rule == "axes":
            return min(directional_width(footprint, np.array([1.0, 0.0])),
                       directional_width(footprint, np.array([0.0, 1.0])))
        if omni_rule == "all":
            h = convex_hull(footprint.extreme_points())
            e = np.roll(h, -1, axis=0) - h
            normals = np.stack([-e[:, 1], e[:, 0]], axis=1) / np.linalg.norm(e, axis=1)[:, None]
            return min(directional_width(footprint, n) for n in normals)
        raise ValueError(f"unknown omni rule {omni_rule!r}")
    raise ValueError(f"no translation direction for model {model_kind!r}")


def compute_don(scenario, footprint: FootprintSpec | None = None, translation_direction=None, omni_rule: str = "axes") -> float:
    if scenario.gap is None:
        raise ValueError("scenario declares no gap; DoN is undefined")
    fp = footprint if footprint is not None else scenario.footprint
    a, b = (np.asarray(x, dtype=float) for x in scenario.gap)
    w_p = float(np.linalg.norm(b - a))
    return don_width(fp, scenario.model.kind, translation_direction, omni_rule) / w_p


# ---------------------------------------------------------------------------
# episodes


@dataclass
class EpisodeResult:
    success: bool
    failure_kind: str
    nav_time: float
    path_length: float
    mean_speed: float
    min_clearance: float
    trajectory: dict = field(repr=False, default_factory=dict)
    cycles: int = 0

    def summary(self) -> dict:
        return {
            "success": self.success,
            "failure_kind": self.failure_kind,
            "nav_time": self.nav_time,
            "path_length": self.path_length,
            "mean_speed": self.mean_speed,
            "min_clearance": self.min_clearance,
            "cycles": self.cycles,
        }


def goal_reached(q, goal, tol_pos: float, tol_head: float) -> bool:
    return (
        math.hypot(q[0] - goal[0], q[1] - goal[1]) <= tol_pos
        and abs(float(wrap_angle(q[2] - goal[2]))) <= tol_head
    )


def run_episode(scenario, planner: str | None = None, record: bool = True, substeps: int = 4) -> EpisodeResult:
    """Closed-loop episode: sense, plan, execute one command, advance the world.

    ``planner`` overrides ``scenario.planner`` ("exact" or "hull"). Truth checks
    always use the scenario footprint.
    """
    from .kinematics import step

    planner = planner or scenario.planner
    truth_fp = scenario.footprint
    plan_fp = hull_footprint(truth_fp) if planner == "hull" else truth_fp
    ctrl = scenario.build_controller(plan_fp)
    hybrid = scenario.hybrid is not None
    sensor = Sensor(scenario.obstacles, scenario.sensor)
    world = WorldState(tuple(scenario.obstacles))
    dt = scenario.mppi.dt
    q = np.asarray(scenario.start, dtype=float)
    goal = scenario.goal
    if ground_truth_collision(truth_fp, q, world.shapes()):
        raise ValueError("start pose collides with an obstacle")

    rows: list[tuple] = []
    positions = [q[:2].copy()]
    clearance = ground_truth_clearance(truth_fp, q, world.shapes())
    t, cycle, path = 0.0, 0, 0.0
    stall_steps = int(round(scenario.stall_window / dt))
    failure = "none"
    n_steps = int(math.floor(scenario.time_limit / dt + 1e-9))

    while True:
        if goal_reached(q, goal, *scenario.goal_tolerance):
            break
        if cycle >= n_steps:
            failure = "timeout"
            break
        obs = sensor(world, q, scenario.seed, cycle)
        dec = ctrl.step(q, obs, scenario.guidance_obj)
        if hybrid:
            cmd, model, mode = dec.command, scenario.hybrid_modes[dec.mode].model, dec.mode
            d_plan = float(dec.diagnostics["d0"])
        else:
            cmd, model, mode = dec.command, scenario.model, 0
            d_plan = float(dec.diagnostics["nominal_d_min"][0])
        if record:
            padded = np.zeros(3)
            padded[: len(cmd)] = cmd
            rows.append((t, q[0], q[1], q[2], *padded, d_plan, mode))
        q_next = step(model, q, cmd, dt)
        world = step_world(world, dt)
        t = (cycle + 1) * dt
        cycle += 1
        hit = False
        for k in range(1, substeps + 1):
            qk = q + (q_next - q) * (k / substeps)
            if ground_truth_collision(truth_fp, qk, world.shapes()):
                hit = True
                break
        path += float(np.hypot(*(q_next[:2] - q[:2])))
        q = q_next
        positions.append(q[:2].copy())
        if hit:
            failure = "collision"
            clearance = 0.0
            break
        clearance = min(clearance, ground_truth_clearance(truth_fp, q, world.shapes()))
        if cycle >= stall_steps and np.hypot(*(positions[-1] - positions[-1 - stall_steps])) < scenario.stall_distance:
            if not goal_reached(q, goal, *scenario.goal_tolerance):
                failure = "stall"
                break

    if record:
        rows.append((t, q[0], q[1], q[2], 0.0, 0.0, 0.0, math.nan, rows[-1][-1] if rows else 0))
    success = failure == "none"
    traj = {}
    if record:
        arr = np.array(rows, dtype=float)
        cols = ("t", "x", "y", "theta", "u0", "u1", "u2", "d_min_planner", "mode")
        traj = {c: arr[:, i] for i, c in enumerate(cols)}
    return EpisodeResult(
        success=success,
        failure_kind=failure,
        nav_time=t,
        path_length=path,
        mean_speed=path / t if t > 0 else 0.0,
        min_clearance=clearance,
        trajectory=traj,
        cycles=cycle,
    )

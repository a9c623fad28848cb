"""Signed distance between planar points and robot footprints.

Two footprint representations are supported: a union of axis-aligned boxes
(``RectangleCover``) and a simple polygon (``PolygonFootprint``).  All point
arguments may be a single ``(2,)`` point or an ``(..., 2)`` array; results
broadcast over the leading axes.

The reference implementations here are plain numpy.  The batched kernels the
controller uses live in :mod:`footprint_mppi.kernels` and are tested against
these.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

PAD_VALUE = 1e9
EMPTY_CLEARANCE = 1e6
BOUNDARY_EPS = 1e-12
DEFAULT_CELL_CAP = 4_000_000


class Pose2(NamedTuple):
    x: float
    y: float
    theta: float


def _as_points(p) -> np.ndarray:
    return np.asarray(p, dtype=float)


# ---------------------------------------------------------------------------
# footprint types


@dataclass(frozen=True)
class Rect:
    center: tuple[float, float]
    half_extent: tuple[float, float]

    def __post_init__(self):
        hx, hy = self.half_extent
        if not (hx > 0 and hy > 0):
            raise ValueError(f"half extents must be positive, got {self.half_extent}")

    def corners(self) -> np.ndarray:
        cx, cy = self.center
        hx, hy = self.half_extent
        return np.array(
            [[cx - hx, cy - hy], [cx + hx, cy - hy], [cx + hx, cy + hy], [cx - hx, cy + hy]]
        )


@dataclass(frozen=True, eq=False)
class RectangleCover:
    rectangles: tuple[Rect, ...]

    def __post_init__(self):
        if len(self.rectangles) == 0:
            raise ValueError("rectangle cover needs at least one rectangle")

    @property
    def centers(self) -> np.ndarray:
        return np.array([r.center for r in self.rectangles], dtype=float)

    @property
    def half_extents(self) -> np.ndarray:
        return np.array([r.half_extent for r in self.rectangles], dtype=float)

    def corners(self) -> np.ndarray:
        return np.concatenate([r.corners() for r in self.rectangles])


def shoelace_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _segments_cross(a, b, c, d) -> bool:
    """Closed-segment intersection test (collinear overlap counts)."""

    def orient(p, q, r):
        v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        return 0 if abs(v) < 1e-14 else (1 if v > 0 else -1)

    def on_seg(p, q, r):
        return min(p[0], r[0]) - 1e-14 <= q[0] <= max(p[0], r[0]) + 1e-14 and min(
            p[1], r[1]
        ) - 1e-14 <= q[1] <= max(p[1], r[1]) + 1e-14

    o1, o2, o3, o4 = orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_seg(a, c, b):
        return True
    if o2 == 0 and on_seg(a, d, b):
        return True
    if o3 == 0 and on_seg(c, a, d):
        return True
    if o4 == 0 and on_seg(c, b, d):
        return True
    return False


def is_simple_polygon(vertices: np.ndarray) -> bool:
    """Pairwise test of non-adjacent edges; O(B^2), fine for footprints."""
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            if _segments_cross(a, b, vertices[j], vertices[(j + 1) % n]):
                return False
    return True


@dataclass(frozen=True, eq=False)
class PolygonFootprint:
    """Simple polygon, stored counter-clockwise.

    Clockwise input is reversed with a warning. Zero-length edges and
    self-intersections are rejected.
    """

    vertices: np.ndarray
    check_simple: bool = field(default=True, repr=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValueError("polygon needs at least 3 vertices of shape (B, 2)")
        if not np.all(np.isfinite(v)):
            raise ValueError("polygon vertices must be finite")
        edge_len = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
        if np.any(edge_len <= 0):
            raise ValueError("polygon has a zero-length edge")
        area = shoelace_area(v)
        if area == 0:
            raise ValueError("polygon has zero area")
        if area < 0:
            warnings.warn("polygon vertices were clockwise; reversed to CCW", stacklevel=3)
            v = v[::-1].copy()
        if self.check_simple and not is_simple_polygon(v):
            raise ValueError("polygon boundary self-intersects")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    @property
    def area(self) -> float:
        return shoelace_area(self.vertices)


@dataclass(frozen=True, eq=False)
class FootprintSpec:
    """Named footprint.

    ``shape`` is the representation the evaluator uses. A rectangle cover may
    also carry its outline polygon (``outline``), which the benchmark and the
    ground-truth collision checker use.
    """

    name: str
    shape: RectangleCover | PolygonFootprint
    outline: PolygonFootprint | None = None

    def __post_init__(self):
        if isinstance(self.shape, PolygonFootprint) and self.outline is None:
            object.__setattr__(self, "outline", self.shape)

    @property
    def kind(self) -> str:
        return "rectangles" if isinstance(self.shape, RectangleCover) else "polygon"

    def extreme_points(self) -> np.ndarray:
        """Vertices or rectangle corners; projection extrema lie among these."""
        if isinstance(self.shape, RectangleCover):
            return self.shape.corners()
        return np.asarray(self.shape.vertices)

    def polygons(self) -> list[np.ndarray]:
        """Polygons whose union is the footprint (for truth checks and drawing)."""
        if isinstance(self.shape, PolygonFootprint):
            return [np.asarray(self.shape.vertices)]
        return [r.corners() for r in self.shape.rectangles]

    def signed_distance(self, p) -> np.ndarray:
        if isinstance(self.shape, RectangleCover):
            return sd_rect_cover(p, self.shape)
        return sd_polygon(p, self.shape)

    def bounding_radius(self, center=(0.0, 0.0)) -> float:
        return float(np.max(np.linalg.norm(self.extreme_points() - np.asarray(center), axis=1)))

    def as_polygon(self) -> "FootprintSpec":
        if self.outline is None:
            raise ValueError(f"footprint {self.name!r} has no polygon outline")
        return FootprintSpec(self.name, self.outline)


def polygon_footprint(name: str, vertices) -> FootprintSpec:
    return FootprintSpec(name, PolygonFootprint(np.asarray(vertices, dtype=float)))


def rect_footprint(name: str, rects: Sequence[tuple], outline=None) -> FootprintSpec:
    cover = RectangleCover(tuple(Rect(tuple(c), tuple(s)) for c, s in rects))
    poly = PolygonFootprint(np.asarray(outline, dtype=float)) if outline is not None else None
    return FootprintSpec(name, cover, poly)


# ---------------------------------------------------------------------------
# distance primitives


def sd_box(p, center, half_extent) -> np.ndarray:
    p = _as_points(p)
    a = np.abs(p - np.asarray(center, dtype=float)) - np.asarray(half_extent, dtype=float)
    outside = np.linalg.norm(np.maximum(a, 0.0), axis=-1)
    inside = np.minimum(np.max(a, axis=-1), 0.0)
    return outside + inside


def sd_rect_cover(p, cover: RectangleCover) -> np.ndarray:
    p = _as_points(p)
    d = np.full(p.shape[:-1], np.inf)
    for r in cover.rectangles:
        d = np.minimum(d, sd_box(p, r.center, r.half_extent))
    return d


def point_segment_distance(p, v_a, v_b) -> np.ndarray:
    p = _as_points(p)
    a = np.asarray(v_a, dtype=float)
    e = np.asarray(v_b, dtype=float) - a
    alpha = np.clip(((p - a) @ e) / float(e @ e), 0.0, 1.0)
    return np.linalg.norm(p - (a + alpha[..., None] * e), axis=-1)


def point_in_polygon(p, poly: PolygonFootprint) -> np.ndarray:
    """Ray cast along +x with the half-open rule (y_i < py) != (y_j < py)."""
    p = _as_points(p)
    px, py = p[..., 0], p[..., 1]
    inside = np.zeros(p.shape[:-1], dtype=bool)
    v0, v1 = poly.edges
    for (xi, yi), (xj, yj) in zip(v0, v1):
        straddle = (yi < py) != (yj < py)
        if not np.any(straddle):
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = xi + (py - yi) * (xj - xi) / (yj - yi)
        inside ^= straddle & (x_cross > px)
    return inside


def boundary_distance(p, poly: PolygonFootprint) -> np.ndarray:
    p = _as_points(p)
    d = np.full(p.shape[:-1], np.inf)
    v0, v1 = poly.edges
    for a, b in zip(v0, v1):
        d = np.minimum(d, point_segment_distance(p, a, b))
    return d


def sd_polygon(p, poly: PolygonFootprint) -> np.ndarray:
    d = boundary_distance(p, poly)
    sign = np.where(point_in_polygon(p, poly), -1.0, 1.0)
    return np.where(d < BOUNDARY_EPS, 0.0, sign * d)


# ---------------------------------------------------------------------------
# obstacle sets and frames


@dataclass(frozen=True, eq=False)
class ObstacleSet:
    """Fixed-capacity point buffer with a validity mask.

    Invalid slots hold ``PAD_VALUE``; reductions read the mask only.
    """

    points: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        m = np.array(self.mask, dtype=bool).reshape(-1)
        if len(pts) != len(m):
            raise ValueError("points and mask lengths differ")
        if not np.all(np.isfinite(pts[m])):
            raise ValueError("valid obstacle points must be finite")
        pts[~m] = PAD_VALUE
        pts.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "mask", m)

    @property
    def capacity(self) -> int:
        return len(self.mask)

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    def valid_points(self) -> np.ndarray:
        return self.points[self.mask]

    @classmethod
    def from_points(cls, points, capacity: int | None = None) -> "ObstacleSet":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        cap = len(pts) if capacity is None else capacity
        if len(pts) > cap:
            raise ValueError(f"{len(pts)} points exceed capacity {cap}")
        buf = np.full((cap, 2), PAD_VALUE)
        buf[: len(pts)] = pts
        mask = np.zeros(cap, dtype=bool)
        mask[: len(pts)] = True
        return cls(buf, mask)

    @classmethod
    def empty(cls, capacity: int) -> "ObstacleSet":
        return cls(np.full((capacity, 2), PAD_VALUE), np.zeros(capacity, dtype=bool))


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def world_to_body(points, pose) -> np.ndarray:
    """p = R(theta)^T (o - t) for raw point arrays."""
    x, y, th = pose
    c, s = math.cos(th), math.sin(th)
    d = _as_points(points) - np.array([x, y])
    return np.stack([c * d[..., 0] + s * d[..., 1], -s * d[..., 0] + c * d[..., 1]], axis=-1)


def body_to_world(points, pose) -> np.ndarray:
    x, y, th = pose
    c, s = math.cos(th), math.sin(th)
    p = _as_points(points)
    return np.stack([x + c * p[..., 0] - s * p[..., 1], y + s * p[..., 0] + c * p[..., 1]], axis=-1)


def transform_to_body(points: ObstacleSet, pose) -> ObstacleSet:
    out = np.full_like(points.points, PAD_VALUE)
    out[points.mask] = world_to_body(points.points[points.mask], pose)
    return ObstacleSet(out, points.mask)


def min_signed_distance(
    footprint: FootprintSpec, body_points: ObstacleSet, empty_value: float = EMPTY_CLEARANCE
) -> float:
    pts = body_points.valid_points()
    if len(pts) == 0:
        return empty_value
    return float(np.min(footprint.signed_distance(pts)))


# ---------------------------------------------------------------------------
# width, hull, grids


def directional_width(footprint: FootprintSpec, n) -> float:
    n = np.asarray(n, dtype=float)
    if n.shape != (2,) or abs(float(np.linalg.norm(n)) - 1.0) > 1e-9:
        raise ValueError(f"direction must be a unit 2-vector, got {n}")
    proj = footprint.extreme_points() @ n
    return float(proj.max() - proj.min())


def convex_hull(points) -> np.ndarray:
    """Andrew's monotone chain; returns CCW hull without collinear points."""
    pts = sorted(set(map(tuple, np.asarray(points, dtype=float).tolist())))
    if len(pts) <= 2:
        return np.array(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def hull_footprint(footprint: FootprintSpec) -> FootprintSpec:
    """Convex-hull wrapper used for the convex baseline planner."""
    return polygon_footprint(f"{footprint.name}-hull", convex_hull(footprint.extreme_points()))


def sdf_grid(
    footprint: FootprintSpec,
    bounds: tuple[float, float, float, float],
    resolution: float,
    max_cells: int = DEFAULT_CELL_CAP,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample sd at cell centers over ``bounds = (xmin, ymin, xmax, ymax)``.

    Returns ``(grid, xs, ys)``; ``grid[i, j]`` is the value at ``(xs[j], ys[i])``.
    """
    xmin, ymin, xmax, ymax = map(float, bounds)
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    if not (xmax > xmin and ymax > ymin):
        raise ValueError("bounds are empty")
    nx = max(1, int(math.floor((xmax - xmin) / resolution + 1e-9)))
    ny = max(1, int(math.floor((ymax - ymin) / resolution + 1e-9)))
    if nx * ny > max_cells:
        raise ValueError(f"grid of {nx}x{ny} cells exceeds the cap of {max_cells}")
    xs = xmin + (np.arange(nx) + 0.5) * resolution
    ys = ymin + (np.arange(ny) + 0.5) * resolution
    gx, gy = np.meshgrid(xs, ys)
    grid = footprint.signed_distance(np.stack([gx, gy], axis=-1))
    return grid, xs, ys


# ---------------------------------------------------------------------------
# JSON IO


def footprint_from_dict(data: dict) -> FootprintSpec:
    name = str(data.get("name", "footprint"))
    kind = data.get("kind")
    if kind == "polygon":
        return polygon_footprint(name, data["vertices"])
    if kind == "rectangles":
        rects = [(r["center"], r["half_extent"]) for r in data["rectangles"]]
        return rect_footprint(name, rects, data.get("vertices"))
    raise ValueError(f"unknown footprint kind {kind!r}")


def footprint_to_dict(fp: FootprintSpec) -> dict:
    out: dict = {"name": fp.name, "kind": fp.kind}
    if isinstance(fp.shape, RectangleCover):
        out["rectangles"] = [
            {"center": list(r.center), "half_extent": list(r.half_extent)}
            for r in fp.shape.rectangles
        ]
        if fp.outline is not None:
            out["vertices"] = fp.outline.vertices.tolist()
    else:
        out["vertices"] = fp.shape.vertices.tolist()
    return out


def load_footprint(path) -> FootprintSpec:
    with open(path) as f:
        return footprint_from_dict(json.load(f))


FIXTURE_DIR = Path(__file__).parent / "fixtures"


def fixture_footprint(name: str) -> FootprintSpec:
    """Load ``fixtures/footprints/<name>.json``."""
    return load_footprint(FIXTURE_DIR / "footprints" / f"{name}.json")

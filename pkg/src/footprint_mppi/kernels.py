"""Compiled batch kernels for the signed-distance evaluators.

Each evaluator comes in a serial and a ``prange`` flavour. The pose kernels fuse
the body-frame transform, the per-point distance and the masked minimum, so a
K*T*N rollout batch never materialises the transformed point cloud.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

from .geometry import BOUNDARY_EPS, FootprintSpec, RectangleCover

# TBB in this image is too old and numba warns on every import otherwise.
if nb.config.THREADING_LAYER == "default":
    nb.config.THREADING_LAYER = "omp"

KIND_RECT = 0
KIND_POLY = 1


@nb.njit(cache=True)
def _sd_rect_pt(px, py, centers, halfs):
    best = np.inf
    for j in range(centers.shape[0]):
        ax = abs(px - centers[j, 0]) - halfs[j, 0]
        ay = abs(py - centers[j, 1]) - halfs[j, 1]
        ox = ax if ax > 0.0 else 0.0
        oy = ay if ay > 0.0 else 0.0
        m = ax if ax > ay else ay
        d = math.sqrt(ox * ox + oy * oy) + (m if m < 0.0 else 0.0)
        if d < best:
            best = d
    return best


@nb.njit(cache=True)
def _sd_poly_pt(px, py, verts):
    n = verts.shape[0]
    best2 = np.inf
    inside = False
    for i in range(n):
        xi = verts[i, 0]
        yi = verts[i, 1]
        j = i + 1 if i + 1 < n else 0
        xj = verts[j, 0]
        yj = verts[j, 1]
        ex = xj - xi
        ey = yj - yi
        wx = px - xi
        wy = py - yi
        t = (wx * ex + wy * ey) / (ex * ex + ey * ey)
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        dx = wx - t * ex
        dy = wy - t * ey
        d2 = dx * dx + dy * dy
        if d2 < best2:
            best2 = d2
        if (yi < py) != (yj < py):
            xc = xi + (py - yi) * ex / ey
            if xc > px:
                inside = not inside
    d = math.sqrt(best2)
    if d < BOUNDARY_EPS:
        return 0.0
    return -d if inside else d


@nb.njit(cache=True)
def sd_rect_serial(points, centers, halfs):
    out = np.empty(points.shape[0])
    for i in range(points.shape[0]):
        out[i] = _sd_rect_pt(points[i, 0], points[i, 1], centers, halfs)
    return out


@nb.njit(cache=True, parallel=True)
def sd_rect_parallel(points, centers, halfs):
    out = np.empty(points.shape[0])
    for i in nb.prange(points.shape[0]):
        out[i] = _sd_rect_pt(points[i, 0], points[i, 1], centers, halfs)
    return out


@nb.njit(cache=True)
def sd_poly_serial(points, verts):
    out = np.empty(points.shape[0])
    for i in range(points.shape[0]):
        out[i] = _sd_poly_pt(points[i, 0], points[i, 1], verts)
    return out


@nb.njit(cache=True, parallel=True)
def sd_poly_parallel(points, verts):
    out = np.empty(points.shape[0])
    for i in nb.prange(points.shape[0]):
        out[i] = _sd_poly_pt(points[i, 0], points[i, 1], verts)
    return out


@nb.njit(cache=True, parallel=True)
def min_sd_poses(poses, points, mask, kind, verts, centers, halfs, radius, empty):
    """d_min for every pose in ``poses`` (M, 3) against world ``points``.

    Points whose distance lower bound ``|p| - radius`` cannot beat the running
    minimum are skipped; the bound is exact so the result is unchanged.
    """
    m = poses.shape[0]
    out = np.empty(m)
    n = points.shape[0]
    for k in nb.prange(m):
        x = poses[k, 0]
        y = poses[k, 1]
        c = math.cos(poses[k, 2])
        s = math.sin(poses[k, 2])
        best = empty
        for i in range(n):
            if not mask[i]:
                continue
            dx = points[i, 0] - x
            dy = points[i, 1] - y
            bx = c * dx + s * dy
            by = -s * dx + c * dy
            if math.sqrt(bx * bx + by * by) - radius >= best:
                continue
            if kind == KIND_RECT:
                d = _sd_rect_pt(bx, by, centers, halfs)
            else:
                d = _sd_poly_pt(bx, by, verts)
            if d < best:
                best = d
        out[k] = best
    return out


_DUMMY = np.zeros((1, 2))


def footprint_arrays(fp: FootprintSpec):
    """Pack a footprint into the argument tuple the pose kernel expects."""
    if isinstance(fp.shape, RectangleCover):
        return (KIND_RECT, _DUMMY, fp.shape.centers, fp.shape.half_extents, fp.bounding_radius())
    verts = np.ascontiguousarray(fp.shape.vertices, dtype=float)
    return (KIND_POLY, verts, _DUMMY, _DUMMY, fp.bounding_radius())


def batch_min_signed_distance(fp_arrays, poses, points, mask, empty) -> np.ndarray:
    """Vectorised d_min over an arbitrary-shaped array of poses ``(..., 3)``."""
    poses = np.asarray(poses, dtype=float)
    flat = np.ascontiguousarray(poses.reshape(-1, 3))
    kind, verts, centers, halfs, radius = fp_arrays
    out = min_sd_poses(
        flat,
        np.ascontiguousarray(points, dtype=float),
        np.ascontiguousarray(mask, dtype=np.bool_),
        kind,
        verts,
        centers,
        halfs,
        radius,
        float(empty),
    )
    return out.reshape(poses.shape[:-1])


def evaluate_points(fp: FootprintSpec, points: np.ndarray, evaluator: str, parallel: bool):
    """Per-point sd using the named evaluator ("rect" or "poly")."""
    points = np.ascontiguousarray(points, dtype=float)
    if evaluator == "rect":
        if not isinstance(fp.shape, RectangleCover):
            raise ValueError(f"{fp.name} has no rectangle cover")
        fn = sd_rect_parallel if parallel else sd_rect_serial
        return fn(points, fp.shape.centers, fp.shape.half_extents)
    if evaluator == "poly":
        if fp.outline is None:
            raise ValueError(f"{fp.name} has no polygon outline")
        verts = np.ascontiguousarray(fp.outline.vertices, dtype=float)
        fn = sd_poly_parallel if parallel else sd_poly_serial
        return fn(points, verts)
    raise ValueError(f"unknown evaluator {evaluator!r}")


def set_threads(n: int | None) -> int:
    """Cap numba's worker pool; returns the count in effect."""
    if n is not None:
        nb.set_num_threads(max(1, min(int(n), nb.config.NUMBA_NUM_THREADS)))
    return nb.get_num_threads()

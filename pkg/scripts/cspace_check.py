"""Offline feasibility check for diff-drive scenes.

Discretises (x, y, theta), marks poses whose footprint keeps ``d_safe`` from
every obstacle boundary sample, and runs a breadth-first search with
forward/backward steps and in-place turns. Used to vet generated corridor
layouts for the exact footprint versus its convex hull before spending MPPI
time on them.

    python scripts/cspace_check.py path/to/scenario.json
"""
from __future__ import annotations

import argparse
import math
from collections import deque

import numpy as np

from footprint_mppi import kernels
from footprint_mppi.geometry import hull_footprint
from footprint_mppi.scenario import load_scenario


def free_poses(fp, points, xs, ys, thetas, d_safe):
    fa = kernels.footprint_arrays(fp)
    gx, gy, gt = np.meshgrid(xs, ys, thetas, indexing="ij")
    poses = np.stack([gx, gy, gt], axis=-1)
    mask = np.ones(len(points), dtype=bool)
    d = kernels.batch_min_signed_distance(fa, poses, points, mask, 1e6)
    return d >= d_safe


def search(free, xs, ys, thetas, start, goal, goal_tol, allow_reverse=True):
    res = xs[1] - xs[0]
    nth = len(thetas)

    def idx(q):
        i = int(round((q[0] - xs[0]) / res))
        j = int(round((q[1] - ys[0]) / res))
        k = int(round((q[2] % (2 * math.pi)) / (2 * math.pi / nth))) % nth
        return i, j, k

    s = idx(start)
    if not free[s]:
        return None
    prev = {s: None}
    dq = deque([s])
    gi = (goal[0] - xs[0]) / res, (goal[1] - ys[0]) / res
    while dq:
        cur = dq.popleft()
        i, j, k = cur
        if math.hypot(i - gi[0], j - gi[1]) * res <= goal_tol:
            path = []
            while cur is not None:
                path.append((xs[cur[0]], ys[cur[1]], thetas[cur[2]]))
                cur = prev[cur]
            return path[::-1]
        th = thetas[k]
        nbrs = [(i, j, (k + 1) % nth), (i, j, (k - 1) % nth)]
        for sgn in ((1, -1) if allow_reverse else (1,)):
            ni = int(round(i + sgn * math.cos(th)))
            nj = int(round(j + sgn * math.sin(th)))
            nbrs.append((ni, nj, k))
        for n in nbrs:
            if 0 <= n[0] < free.shape[0] and 0 <= n[1] < free.shape[1] and free[n] and n not in prev:
                prev[n] = cur
                dq.append(n)
    return None


def check(scenario, res=0.05, n_theta=144, margin=1.5):
    pts = np.concatenate([ob.boundary_samples(0.02) for ob in scenario.obstacles])
    lo = np.minimum(scenario.start[:2], scenario.goal[:2]) - margin - 1.0
    hi = np.maximum(scenario.start[:2], scenario.goal[:2]) + margin + 1.0
    xs = np.arange(lo[0], hi[0], res)
    ys = np.arange(lo[1], hi[1], res)
    thetas = np.arange(n_theta) * (2 * math.pi / n_theta)
    out = {}
    for label, fp in (("exact", scenario.footprint), ("hull", hull_footprint(scenario.footprint))):
        free = free_poses(fp, pts, xs, ys, thetas, scenario.mppi.d_safe)
        path = search(free, xs, ys, thetas, scenario.start, scenario.goal, max(scenario.goal_tolerance[0], res))
        out[label] = path
    return out


def door_check(fp, door, d_safe, wall_thickness=0.1, res=0.04, n_theta=72):
    """Can ``fp`` drive (diff-drive moves) through an isolated doorway?

    Only the two wall segments around the door are modelled, so the search
    space stays small. Returns the pose path or ``None``.
    """
    from footprint_mppi.world import Obstacle

    h, t2 = door / 2, wall_thickness / 2
    walls = [
        Obstacle("polygon", vertices=[[-t2, h], [t2, h], [t2, 3], [-t2, 3]]),
        Obstacle("polygon", vertices=[[-t2, -3], [t2, -3], [t2, -h], [-t2, -h]]),
    ]
    pts = np.concatenate([w.boundary_samples(0.02) for w in walls])
    pts = pts[np.abs(pts[:, 1]) < 2.8]
    xs = np.arange(-2.4, 2.4 + 1e-9, res)
    ys = np.arange(-2.0, 2.0 + 1e-9, res)
    thetas = np.arange(n_theta) * (2 * math.pi / n_theta)
    free = free_poses(fp, pts, xs, ys, thetas, d_safe)
    return search(free, xs, ys, thetas, (-2.0, 0.0, 0.0), (2.0, 0.0, 0.0), 0.1)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("scenario")
    ap.add_argument("--res", type=float, default=0.05)
    ap.add_argument("--n-theta", type=int, default=144)
    args = ap.parse_args()
    sc = load_scenario(args.scenario)
    for label, path in check(sc, args.res, args.n_theta).items():
        print(f"{label}: {'feasible' if path else 'infeasible'}" + (f" ({len(path)} steps)" if path else ""))


if __name__ == "__main__":
    main()

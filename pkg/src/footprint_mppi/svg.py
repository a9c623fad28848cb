"""Plain-text SVG output: signed-distance heatmaps and episode plots."""
from __future__ import annotations

import math

import numpy as np

from .geometry import FootprintSpec, body_to_world

SNAPSHOT_PERIOD = 0.5


def _f(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".")


def _points_attr(pts) -> str:
    return " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)


def _doc(bounds, body: list[str], px_per_m: float = 100.0) -> str:
    xmin, ymin, xmax, ymax = bounds
    w, h = xmax - xmin, ymax - ymin
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(w * px_per_m)}" height="{_f(h * px_per_m)}" '
        f'viewBox="{_f(xmin)} {_f(-ymax)} {_f(w)} {_f(h)}">'
    )
    # world y points up; flip once for the whole drawing
    return "\n".join([head, '<g transform="scale(1,-1)">', *body, "</g>", "</svg>", ""])


def _color(sd: float, scale: float) -> str:
    t = max(-1.0, min(1.0, sd / scale))
    if t < 0:
        a = -t
        r, g, b = 255 * (1 - a) + 33 * a, 255 * (1 - a) + 102 * a, 255 * (1 - a) + 172 * a
    else:
        r, g, b = 255 * (1 - t) + 178 * t, 255 * (1 - t) + 24 * t, 255 * (1 - t) + 43 * t
    return f"#{int(r):02x}{int(g):02x}{int(b):02x}"


def zero_contour(grid: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Marching-squares segments of the level set between negative and nonnegative samples."""
    inside = grid < 0
    segs = []

    def cross(i0, j0, i1, j1):
        a, b = grid[i0, j0], grid[i1, j1]
        t = a / (a - b)
        return (xs[j0] + t * (xs[j1] - xs[j0]), ys[i0] + t * (ys[i1] - ys[i0]))

    for i in range(len(ys) - 1):
        for j in range(len(xs) - 1):
            corners = [(i, j), (i, j + 1), (i + 1, j + 1), (i + 1, j)]
            flags = [inside[c] for c in corners]
            if all(flags) or not any(flags):
                continue
            pts = []
            for k in range(4):
                c0, c1 = corners[k], corners[(k + 1) % 4]
                if inside[c0] != inside[c1]:
                    pts.append(cross(*c0, *c1))
            # two crossings is the common case; a saddle yields four, paired in order
            for k in range(0, len(pts) - 1, 2):
                segs.append((pts[k], pts[k + 1]))
    return segs


def sdf_svg(footprint: FootprintSpec, grid: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> str:
    res_x = xs[1] - xs[0] if len(xs) > 1 else 1.0
    res_y = ys[1] - ys[0] if len(ys) > 1 else 1.0
    bounds = (xs[0] - res_x / 2, ys[0] - res_y / 2, xs[-1] + res_x / 2, ys[-1] + res_y / 2)
    scale = float(np.max(np.abs(grid))) or 1.0
    body = ['<g shape-rendering="crispEdges">']
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            body.append(
                f'<rect x="{_f(x - res_x / 2)}" y="{_f(y - res_y / 2)}" width="{_f(res_x)}" '
                f'height="{_f(res_y)}" fill="{_color(grid[i, j], scale)}"/>'
            )
    body.append("</g>")
    lw = _f(max(res_x, res_y) * 0.6)
    body.append(f'<g stroke="black" stroke-width="{lw}" fill="none" class="zero-contour">')
    for (a, b) in zero_contour(grid, xs, ys):
        body.append(f'<line x1="{_f(a[0])}" y1="{_f(a[1])}" x2="{_f(b[0])}" y2="{_f(b[1])}"/>')
    body.append("</g>")
    return _doc(bounds, body, px_per_m=max(50.0, 400.0 / (bounds[2] - bounds[0])))


def _obstacle_svg(ob, offset=(0.0, 0.0), style='fill="#555" fill-opacity="0.8"') -> str:
    dx, dy = offset
    if ob.kind == "polygon":
        return f'<polygon points="{_points_attr(ob.vertices + [dx, dy])}" {style}/>'
    cx, cy = ob.center
    return f'<circle cx="{_f(cx + dx)}" cy="{_f(cy + dy)}" r="{_f(ob.radius)}" {style}/>'


def trajectory_svg(scenario, trajectory: dict, footprint: FootprintSpec | None = None,
                   period: float = SNAPSHOT_PERIOD) -> str:
    """Obstacles, guidance, executed path and posed footprint outlines every ``period`` s."""
    fp = footprint or scenario.footprint
    xs, ys, th, ts = (np.asarray(trajectory[k]) for k in ("x", "y", "theta", "t"))
    r = fp.bounding_radius()
    pts = [np.c_[xs, ys], np.asarray(scenario.guidance).reshape(-1, 2)]
    for ob in scenario.obstacles:
        pts.append(ob.vertices if ob.kind == "polygon" else np.array([ob.center]))
    allp = np.concatenate(pts)
    lo = allp.min(axis=0) - r * 0.25 - 0.2
    hi = allp.max(axis=0) + r * 0.25 + 0.2
    bounds = (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))
    sw = _f(0.02 * max(1.0, (hi - lo).max() / 10))

    body = ['<rect x="{}" y="{}" width="{}" height="{}" fill="white"/>'.format(
        _f(lo[0]), _f(lo[1]), _f(hi[0] - lo[0]), _f(hi[1] - lo[1]))]
    body.append('<g class="obstacles">')
    for ob in scenario.obstacles:
        body.append(_obstacle_svg(ob))
        if ob.moving and len(ts):
            body.append(_obstacle_svg(ob, ob.offset(float(ts[-1])), 'fill="#999" fill-opacity="0.4"'))
    body.append("</g>")
    body.append(f'<polyline class="guidance" points="{_points_attr(scenario.guidance)}" fill="none" '
                f'stroke="#2a9d8f" stroke-width="{sw}" stroke-dasharray="0.1,0.06"/>')
    body.append(f'<g class="footprints" fill="#4361ee" fill-opacity="0.08" stroke="#4361ee" stroke-width="{sw}">')
    outlines = [fp.outline.vertices] if fp.outline is not None else fp.polygons()
    next_t = 0.0
    for k in range(len(ts)):
        if ts[k] + 1e-9 >= next_t or k == len(ts) - 1:
            pose = (xs[k], ys[k], th[k])
            for poly in outlines:
                body.append(f'<polygon points="{_points_attr(body_to_world(poly, pose))}"/>')
            next_t = math.floor(ts[k] / period + 1e-9) * period + period
    body.append("</g>")
    body.append(f'<polyline class="path" points="{_points_attr(np.c_[xs, ys])}" fill="none" '
                f'stroke="#e63946" stroke-width="{sw}"/>')
    for (px, py), color in ((scenario.start[:2], "#2b9348"), (scenario.goal[:2], "#f77f00")):
        body.append(f'<circle cx="{_f(px)}" cy="{_f(py)}" r="{_f(3 * float(sw))}" fill="{color}"/>')
    return _doc(bounds, body, px_per_m=60.0)

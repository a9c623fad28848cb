"""Parametric scenario generators keyed by a target degree of narrowness.

Each generator returns a plain scenario dict (JSON-ready) whose declared gap
reproduces the requested DoN exactly for the given footprint and model.
"""
from __future__ import annotations

import math

import numpy as np

from .geometry import FootprintSpec, footprint_to_dict
from .world import don_width


def _box(x0, y0, x1, y1) -> dict:
    return {"type": "polygon", "vertices": [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]}


def _arena(x0, y0, x1, y1, t=0.1) -> list[dict]:
    """Four thin walls whose inner faces bound [x0,x1] x [y0,y1]."""
    return [
        _box(x0 - t, y0 - t, x1 + t, y0),
        _box(x0 - t, y1, x1 + t, y1 + t),
        _box(x0 - t, y0, x0, y1),
        _box(x1, y0, x1 + t, y1),
    ]


def _round(x: float) -> float:
    return float(np.round(x, 12))


def gap_scenario(footprint: FootprintSpec, don: float, *, model: str = "omni", seed: int = 0,
                 wall_thickness: float = 0.1, heading: float = math.pi / 4, omni_rule: str = "axes") -> dict:
    """Thin wall with one opening between two free half-arenas.

    The robot starts and ends at ``heading`` (45 degrees by default, the
    orientation in which the L-shape presents its narrowest cross-section to
    the wall).
    """
    if not 0 < don <= 1.2:
        raise ValueError("don must lie in (0, 1.2]")
    w_r = don_width(footprint, model, omni_rule=omni_rule)
    gap = w_r / don
    half = gap / 2
    ext_x, ext_y = 5.0, 3.5
    t2 = wall_thickness / 2
    obstacles = _arena(-ext_x, -ext_y, ext_x, ext_y) + [
        _box(-t2, _round(half), t2, ext_y),
        _box(-t2, -ext_y, t2, _round(-half)),
    ]
    return {
        "name": f"gap-{footprint.name}-don{don:g}",
        "footprint": footprint_to_dict(footprint),
        "model": {"kind": model},
        "limits": {"v": [1.0, 1.0, 1.0], "a": [1.5, 1.5, 1.5]} if model == "omni" else {},
        "mppi": {
            "K": 256, "T": 30, "dt": 0.1, "lam": 1.0, "sigma": [0.3, 0.3, 0.3],
            "d_safe": 0.12, "w_goal": 1.0, "w_terminal": 5.0, "w_head": 2.0,
            "w_xtrack": 0.0, "w_prog": 0.0, "w_ctrl": 0.05,
        },
        "obstacles": obstacles,
        "start": [-3.0, 0.0, heading],
        "goal": [3.0, 0.0, heading],
        "goal_tolerance": {"position": 0.15, "heading": 0.35},
        "guidance": [[-3.0, 0.0], [0.0, 0.0], [3.0, 0.0]],
        "sensor": {"range": 4.0, "budget": 128, "downsample": "nearest"},
        "time_limit": 40.0,
        "seed": seed,
        "gap": {"a": [0.0, _round(-half)], "b": [0.0, _round(half)]},
    }


# static clutter in the corridor template, clear of the straight centre line
_CORRIDOR_CLUTTER = (
    (-3.2, 1.7, -2.6, 2.5),
    (-1.9, -2.5, -1.3, -1.6),
    (1.4, 1.6, 2.0, 2.5),
    (2.6, -2.5, 3.3, -1.7),
)


def corridor_scenario(footprint: FootprintSpec, don: float, *, model: str = "diff", seed: int = 0,
                      wall_thickness: float = 0.1) -> dict:
    """Cluttered straight corridor crossed by a thin wall with one doorway.

    The doorway width is ``W_r / don`` with ``W_r`` the footprint's width
    across forward travel. Everything else (start, goal, clutter, limits) is
    independent of ``don``.
    """
    if not 0 < don <= 1.2:
        raise ValueError("don must lie in (0, 1.2]")
    if model not in ("diff", "ackermann"):
        raise ValueError("the corridor template drives forward; use a diff or ackermann model")
    w_r = don_width(footprint, model)
    half = w_r / don / 2
    x0, x1, hw = -5.0, 5.0, 2.5
    t2 = wall_thickness / 2
    obstacles = _arena(x0, -hw, x1, hw) + [
        _box(-t2, _round(half), t2, hw),
        _box(-t2, -hw, t2, _round(-half)),
    ] + [_box(*b) for b in _CORRIDOR_CLUTTER]
    return {
        "name": f"corridor-{footprint.name}-don{don:g}",
        "footprint": footprint_to_dict(footprint),
        "model": {"kind": model},
        "limits": {"v": [1.0, 1.0], "a": [1.0, 2.0]},
        "mppi": {
            "K": 256, "T": 30, "dt": 0.1, "lam": 1.0, "sigma": [0.3, 0.4],
            "d_safe": 0.08, "w_goal": 1.0, "w_terminal": 5.0, "w_head": 0.0,
            "w_xtrack": 2.0, "w_prog": 0.0, "w_ctrl": 0.05,
        },
        "obstacles": obstacles,
        "start": [-3.5, 0.0, 0.0],
        "goal": [3.5, 0.0, 0.0],
        "goal_tolerance": {"position": 0.2, "heading": math.pi},
        "guidance": [[-3.5, 0.0], [3.5, 0.0]],
        "sensor": {"range": 4.0, "budget": 128, "downsample": "nearest"},
        "time_limit": 40.0,
        "seed": seed,
        "gap": {"a": [0.0, _round(-half)], "b": [0.0, _round(half)]},
    }





def trap_scenario(footprint: FootprintSpec, don: float = 1.0, *, seed: int = 0, hybrid: bool = True,
                  wall_thickness: float = 0.1) -> dict:
    """Closed room whose only exit is a channel beside the robot.

    The channel width is ``W_r / don`` with ``W_r`` measured across forward
    (Ackermann) travel, so at ``don = 1`` the robot cannot drive into it and
    must translate sideways. With ``hybrid=False`` the scenario keeps only the
    Ackermann mode (the ablation).
    """
    if not 0 < don <= 1.2:
        raise ValueError("don must lie in (0, 1.2]")
    w_r = don_width(footprint, "ackermann")
    ext = footprint.extreme_points()
    half = w_r / don / 2
    # room: comfortably larger than the robot in x, tight behind it
    rx = float(np.max(np.abs(ext[:, 0]))) + 1.1
    y_lo = float(np.min(ext[:, 1])) - 0.5
    y_hi = float(np.max(ext[:, 1])) + 0.3
    ch_top = y_hi + 1.6
    t = wall_thickness
    obstacles = [
        _box(-rx - t, y_lo - t, rx + t, y_lo),            # back wall
        _box(-rx - t, y_lo, -rx, y_hi + t),              # left wall
        _box(rx, y_lo, rx + t, y_hi + t),                # right wall
        _box(-rx - t, y_hi, _round(-half), y_hi + t),   # front wall, left of channel
        _box(_round(half), y_hi, rx + t, y_hi + t),     # front wall, right of channel
        _box(_round(-half - t), y_hi + t, _round(-half), ch_top),
        _box(_round(half), y_hi + t, _round(half + t), ch_top),
    ]
    goal_y = _round(ch_top + 1.2)
    modes = [{"name": "ackermann", "kind": "ackermann", "wheelbase": 0.8}]
    if hybrid:
        modes += [{"name": "parallel", "kind": "parallel"}, {"name": "spin", "kind": "spin"}]
    return {
        "name": f"trap-{footprint.name}-{'hybrid' if hybrid else 'ackermann'}",
        "footprint": footprint_to_dict(footprint),
        "model": {"kind": "ackermann", "wheelbase": 0.8},
        "mppi": {
            "K": 256, "T": 30, "dt": 0.1, "lam": 1.0, "sigma": [0.3],
            "d_safe": 0.08, "w_goal": 1.0, "w_terminal": 5.0, "w_head": 0.0,
            "w_xtrack": 0.0, "w_prog": 0.0, "w_ctrl": 0.05,
        },
        "hybrid": {
            "params": {"lambda_switch": 5.0, "tau_cool_max": 10},
            "initial_mode": 0,
            "modes": modes,
        },
        "obstacles": obstacles,
        "start": [0.0, 0.0, 0.0],
        "goal": [0.0, goal_y, 0.0],
        "goal_tolerance": {"position": 0.25, "heading": math.pi},
        "guidance": [[0.0, 0.0], [0.0, goal_y]],
        "sensor": {"range": 4.0, "budget": 128, "downsample": "nearest"},
        "time_limit": 40.0,
        "seed": seed,
        "gap": {"a": [_round(-half), y_hi], "b": [_round(half), y_hi]},
    }


TEMPLATES = {"corridor": corridor_scenario, "gap": gap_scenario, "trap": trap_scenario}

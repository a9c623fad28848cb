"""Regenerate the shipped scenario fixtures.

    python scripts/make_fixtures.py
"""
from __future__ import annotations

import json

from footprint_mppi.generators import _arena, _box, corridor_scenario, gap_scenario, trap_scenario
from footprint_mppi.geometry import FIXTURE_DIR, fixture_footprint

OUT = FIXTURE_DIR / "scenarios"

DIFF_MPPI = {
    "K": 256, "T": 30, "dt": 0.1, "lam": 1.0, "sigma": [0.3, 0.4], "d_safe": 0.1,
    "w_goal": 1.0, "w_terminal": 5.0, "w_xtrack": 5.0, "w_ctrl": 0.05,
}


def open_field() -> dict:
    return {
        "name": "open-field",
        "footprint": "t_shape",
        "model": {"kind": "diff"},
        "mppi": DIFF_MPPI,
        "obstacles": [],
        "start": [0.0, 0.0, 0.0],
        "goal": [5.0, 0.0, 0.0],
        "goal_tolerance": {"position": 0.05, "heading": 3.15},
        "guidance": [[0.0, 0.0], [5.0, 0.0]],
        "sensor": {"range": 4.0, "budget": 64},
        "time_limit": 20.0,
        "seed": 0,
    }


def goal_behind_wall() -> dict:
    # the wall spans the whole arena, so no path exists
    return {
        "name": "goal-behind-wall",
        "footprint": "t_shape",
        "model": {"kind": "diff"},
        "mppi": DIFF_MPPI,
        "obstacles": _arena(-3.0, -2.5, 6.0, 2.5) + [_box(2.0, -2.5, 2.2, 2.5)],
        "start": [0.0, 0.0, 0.0],
        "goal": [4.0, 0.0, 0.0],
        "goal_tolerance": {"position": 0.2, "heading": 3.15},
        "guidance": [[0.0, 0.0], [4.0, 0.0]],
        "sensor": {"range": 4.0, "budget": 64},
        "time_limit": 20.0,
        "seed": 0,
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    t, l, cart = (fixture_footprint(n) for n in ("t_shape", "l_shape", "cart"))
    files = {"open_field.json": open_field(), "goal_behind_wall.json": goal_behind_wall()}
    for don in (0.6, 0.8, 1.0):
        files[f"corridor_t_don{don:g}.json"] = corridor_scenario(t, don)
    for don in (0.83, 1.05):
        files[f"gap_l_don{don:g}.json"] = gap_scenario(l, don)
    files["trap_cart_hybrid.json"] = trap_scenario(cart, 1.0, hybrid=True)
    files["trap_cart_ackermann.json"] = trap_scenario(cart, 1.0, hybrid=False)
    for name, data in files.items():
        (OUT / name).write_text(json.dumps(data, indent=2) + "\n")
        print(OUT / name)


if __name__ == "__main__":
    main()

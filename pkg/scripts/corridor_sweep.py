"""Success rate of a differential-drive robot through corridors of rising DoN.

    python scripts/corridor_sweep.py --footprint t_shape --don 0.6 0.8 1.0
"""
from __future__ import annotations

from _common import base_parser, run_trials, write_rows
from footprint_mppi.generators import corridor_scenario
from footprint_mppi.geometry import fixture_footprint


def main() -> None:
    p = base_parser(__doc__)
    p.add_argument("--footprint", default="t_shape")
    p.add_argument("--don", type=float, nargs="+", default=[0.6, 0.8, 1.0])
    args = p.parse_args()
    fp = fixture_footprint(args.footprint)
    rows = []
    for don in args.don:
        data = corridor_scenario(fp, don)
        for planner in ("exact", "hull"):
            rows.append({"don": don, "planner": planner, **run_trials(data, planner, args.trials, args.seed)})
    write_rows(rows, args.out / f"corridor_sweep_{args.footprint}.csv")


if __name__ == "__main__":
    main()

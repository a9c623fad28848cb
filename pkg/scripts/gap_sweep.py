"""Success rate of the exact and hull planners through a single gap.

    python scripts/gap_sweep.py --footprint l_shape --don 1.05 0.83 --trials 10
"""
from __future__ import annotations

from _common import base_parser, run_trials, write_rows
from footprint_mppi.generators import gap_scenario
from footprint_mppi.geometry import fixture_footprint
from footprint_mppi.scenario import Scenario
from footprint_mppi.world import compute_don


def main() -> None:
    p = base_parser(__doc__)
    p.add_argument("--footprint", default="l_shape")
    p.add_argument("--model", default="omni")
    p.add_argument("--don", type=float, nargs="+", default=[1.05, 0.95, 0.83])
    args = p.parse_args()
    fp = fixture_footprint(args.footprint)
    rows = []
    for don in args.don:
        data = gap_scenario(fp, don, model=args.model)
        measured = compute_don(Scenario.from_dict(data))
        for planner in ("exact", "hull"):
            rows.append({"don": don, "don_measured": round(measured, 6), "planner": planner,
                         **run_trials(data, planner, args.trials, args.seed)})
    write_rows(rows, args.out / f"gap_sweep_{args.footprint}.csv")


if __name__ == "__main__":
    main()

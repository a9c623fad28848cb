"""Hybrid Ackermann/parallel controller against Ackermann-only in the trap scenario.

    python scripts/hybrid_ablation.py --trials 10
"""
from __future__ import annotations

from _common import base_parser, run_trials, write_rows
from footprint_mppi.generators import trap_scenario
from footprint_mppi.geometry import fixture_footprint


def main() -> None:
    p = base_parser(__doc__)
    p.add_argument("--footprint", default="cart")
    args = p.parse_args()
    fp = fixture_footprint(args.footprint)
    rows = []
    for label, hybrid in (("hybrid", True), ("ackermann_only", False)):
        data = trap_scenario(fp, 1.0, hybrid=hybrid)
        rows.append({"variant": label, **run_trials(data, "exact", args.trials, args.seed)})
    write_rows(rows, args.out / "hybrid_ablation.csv")


if __name__ == "__main__":
    main()

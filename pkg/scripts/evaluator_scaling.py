"""Time the rectangle and polygon SDF evaluators over growing query counts.

    python scripts/evaluator_scaling.py --max-exp 6 --trials 5
"""
from __future__ import annotations

import argparse
from pathlib import Path

from footprint_mppi.bench import loglog_slope, scaling_benchmark
from footprint_mppi.geometry import fixture_footprint


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--footprints", nargs="+", default=["l_shape", "t_shape", "f_shape"])
    p.add_argument("--max-exp", type=int, default=6)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", type=Path, default=Path("results"))
    args = p.parse_args()
    fps = [fixture_footprint(n) for n in args.footprints]
    counts = [10 ** e for e in range(2, args.max_exp + 1)]
    rep = scaling_benchmark(fps, counts, trials=args.trials, seed=0, threads=args.threads)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "evaluator_scaling.csv").write_text(rep.to_csv())
    at = 10 ** min(5, args.max_exp)
    for fp in fps:
        slopes = {ev: loglog_slope(rep, fp.name, ev) for ev in ("rect", "poly")}
        print(f"{fp.name}: slope rect {slopes['rect']:.2f}, poly {slopes['poly']:.2f}, "
              f"rect speedup at {at} queries {rep.speedup(fp.name, at):.2f}x")
    print(f"wrote {args.out / 'evaluator_scaling.csv'}")


if __name__ == "__main__":
    main()

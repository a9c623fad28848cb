"""Helpers shared by the experiment scripts."""
from __future__ import annotations

import argparse
import csv
import json
import statistics
from pathlib import Path

from footprint_mppi.scenario import Scenario
from footprint_mppi.world import run_episode


def base_parser(doc: str, trials: int = 10) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=doc.splitlines()[0])
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=0, help="first seed; trials use seed, seed+1, ...")
    p.add_argument("--out", type=Path, default=Path("results"))
    return p


def run_trials(data: dict, planner: str, trials: int, seed: int) -> dict:
    sc = Scenario.from_dict(data)
    eps = [run_episode(sc.with_seed(seed + i), planner=planner, record=False).summary() for i in range(trials)]
    ok = [e for e in eps if e["success"]]
    row = {"trials": trials, "success_rate": len(ok) / trials}
    if ok:
        row["median_nav_time"] = statistics.median(e["nav_time"] for e in ok)
        row["mean_path_length"] = statistics.fmean(e["path_length"] for e in ok)
    row["failures"] = ",".join(sorted({e["failure_kind"] for e in eps if not e["success"]}))
    return row


def write_rows(rows: list[dict], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = list(dict.fromkeys(k for r in rows for k in r))
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, cols)
        w.writeheader()
        w.writerows(rows)
    print(json.dumps(rows, indent=1))
    print(f"wrote {path}")

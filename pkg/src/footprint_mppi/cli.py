"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 navigation failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_CONFIG, EXIT_NAV = 0, 1, 2
TRAJ_COLUMNS = ("t", "x", "y", "theta", "u0", "u1", "u2", "d_min_planner", "mode")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


class ConfigError(Exception):
    pass


def _num(v: float) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if math.isnan(v):
        return "nan"
    return f"{float(v):.10g}"


def trajectory_csv(traj: dict) -> str:
    lines = [",".join(TRAJ_COLUMNS)]
    n = len(traj["t"]) if traj else 0
    for i in range(n):
        row = [_num(traj[c][i]) for c in TRAJ_COLUMNS[:-1]] + [str(int(traj["mode"][i]))]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _clean(d: dict) -> dict:
    """JSON-safe copy: non-finite floats become None."""
    out = {}
    for k, v in d.items():
        if isinstance(v, (float, np.floating)):
            v = float(v)
            out[k] = v if math.isfinite(v) else None
        elif isinstance(v, (np.integer,)):
            out[k] = int(v)
        else:
            out[k] = v
    return out


def _resolve_threads(args) -> int | None:
    n = getattr(args, "threads", None)
    if n is None and os.environ.get("EXACT_MPPI_THREADS"):
        try:
            n = int(os.environ["EXACT_MPPI_THREADS"])
        except ValueError:
            raise ConfigError("EXACT_MPPI_THREADS must be an integer")
    if n is not None and n < 1:
        raise ConfigError("thread count must be at least 1")
    return n


def _load_footprint(spec: str):
    from .geometry import FIXTURE_DIR, load_footprint

    for cand in (Path(spec), FIXTURE_DIR / "footprints" / spec, FIXTURE_DIR / "footprints" / f"{spec}.json"):
        if cand.is_file():
            return load_footprint(cand)
    raise ConfigError(f"footprint {spec!r} not found")


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# run / suite


def _load(path: str, seed: int | None):
    from .scenario import load_scenario

    sc = load_scenario(path)
    return sc.with_seed(seed) if seed is not None else sc


def _episode(scenario, planner):
    from .world import run_episode

    return run_episode(scenario, planner=planner)


def _result_dict(scenario, planner, res) -> dict:
    from .world import compute_don

    d = _clean(res.summary())
    d.update({"scenario": scenario.name, "seed": scenario.seed, "planner": planner or scenario.planner})
    if scenario.gap is not None:
        d["don"] = compute_don(scenario)
    return d


def cmd_run(args) -> int:
    sc = _load(args.scenario, args.seed)
    res = _episode(sc, args.planner)
    out = _out_dir(args)
    stem = args.name or Path(args.scenario).stem
    (out / f"{stem}_trajectory.csv").write_text(trajectory_csv(res.trajectory))
    result = _result_dict(sc, args.planner, res)
    (out / f"{stem}_result.json").write_text(_dump_json(result))
    if args.svg:
        from .geometry import hull_footprint
        from .svg import trajectory_svg

        fp = hull_footprint(sc.footprint) if (args.planner or sc.planner) == "hull" else None
        (out / f"{stem}.svg").write_text(trajectory_svg(sc, res.trajectory, fp))
    print(_dump_json(result), end="")
    return EXIT_OK if res.success else EXIT_NAV


def aggregate(results: list[dict]) -> dict:
    """Success rate plus means over successful episodes (absent when none succeeded)."""
    ok = [r for r in results if r["success"]]
    agg = {"trials": len(results), "successes": len(ok), "success_rate": len(ok) / len(results) if results else 0.0}
    if ok:
        agg["mean_nav_time"] = float(np.mean([r["nav_time"] for r in ok]))
        agg["mean_path_length"] = float(np.mean([r["path_length"] for r in ok]))
        agg["mean_speed"] = float(np.mean([r["mean_speed"] for r in ok]))
    agg["episodes"] = results
    return agg


def _suite_worker(payload):
    from .scenario import Scenario

    data, base_dir, seed, planner, threads = payload
    if threads is not None:
        from . import kernels

        kernels.set_threads(threads)
    sc = Scenario.from_dict(data, base_dir).with_seed(seed)
    return _result_dict(sc, planner, _episode(sc, planner))


def run_suite(data: dict, trials: int, seed_base: int = 0, planner: str | None = None,
              base_dir: Path | None = None, jobs: int = 1, threads: int | None = None) -> dict:
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    payloads = [(data, base_dir, seed_base + i, planner, threads) for i in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_suite_worker, payloads))  # map keeps trial order
    else:
        results = [_suite_worker(p) for p in payloads]
    agg = aggregate(results)
    agg.update({"scenario": data.get("name", "scenario"), "seed_base": seed_base,
                "planner": planner or data.get("planner", "exact")})
    return agg


def _scenario_source(args) -> tuple[dict, Path | None, str]:
    from .scenario import validate_scenario_dict

    if args.scenario:
        path = Path(args.scenario)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: malformed JSON: {exc}")
        validate_scenario_dict(data)
        return data, path.parent, path.stem
    if not (args.template and args.don is not None and args.footprint):
        raise ConfigError("suite needs a scenario file or --template, --don and --footprint")
    data = _generate(args.template, args.footprint, args.don, args.model, 0)
    return data, None, data["name"]


def cmd_suite(args) -> int:
    data, base_dir, stem = _scenario_source(args)
    seed_base = args.seeds if args.seeds is not None else (args.seed or 0)
    agg = run_suite(data, args.trials, seed_base, args.planner, base_dir, args.jobs, _resolve_threads(args))
    out = _out_dir(args)
    (out / f"{args.name or stem}_suite.json").write_text(_dump_json(agg))
    summary = {k: v for k, v in agg.items() if k != "episodes"}
    print(_dump_json(summary), end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen


def _generate(template: str, footprint: str, don: float, model: str | None, seed: int) -> dict:
    from .generators import TEMPLATES

    if template not in TEMPLATES:
        raise ConfigError(f"unknown template {template!r}")
    if not 0 < don <= 1.2:
        raise ConfigError("--don must lie in (0, 1.2]")
    fp = _load_footprint(footprint)
    kwargs = {"seed": seed}
    if model is not None:
        if template == "trap":
            raise ConfigError("the trap template fixes its own modes; drop --model")
        kwargs["model"] = model
    try:
        return TEMPLATES[template](fp, don, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"footprint/template mismatch: {exc}")


def cmd_gen(args) -> int:
    from .scenario import Scenario
    from .world import compute_don

    data = _generate(args.template, args.footprint, args.don, args.model, args.seed or 0)
    sc = Scenario.from_dict(data)
    if abs(compute_don(sc) - args.don) > 1e-6:
        raise ConfigError("generated gap misses the requested DoN")
    text = _dump_json(data)
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        Path(args.output).write_text(text)
    elif args.out:
        (_out_dir(args) / f"{data['name']}.json").write_text(text)
    else:
        print(text, end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench / sdf


def cmd_bench(args) -> int:
    from .bench import DEFAULT_COUNTS, scaling_benchmark

    src = Path(args.footprints) if args.footprints else None
    if src is None:
        from .geometry import FIXTURE_DIR

        files = [FIXTURE_DIR / "footprints" / f"{n}.json" for n in ("l_shape", "t_shape", "f_shape")]
    elif src.is_dir():
        files = sorted(src.glob("*.json"))
    else:
        files = [src]
    fps = [_load_footprint(str(f)) for f in files]
    fps = [f for f in fps if f.kind == "rectangles" and f.outline is not None]
    if not fps:
        raise ConfigError("no footprint with both a rectangle cover and an outline")
    counts = args.counts or list(DEFAULT_COUNTS)
    if sorted(counts) != counts:
        counts = sorted(counts)
    report = scaling_benchmark(fps, counts, args.trials, seed=args.seed or 0, threads=_resolve_threads(args))
    text = report.to_csv()
    (_out_dir(args) / (args.name or "bench.csv")).write_text(text)
    print(text, end="")
    return EXIT_OK


def cmd_sdf(args) -> int:
    from .geometry import sdf_grid
    from .svg import sdf_svg

    fp = _load_footprint(args.footprint)
    if fp.outline is not None:
        fp = fp.as_polygon()  # the gallery shows the polygon-edge field
    if args.bounds is None:
        r = fp.bounding_radius() + 0.5
        bounds = (-r, -r, r, r)
    else:
        bounds = tuple(args.bounds)
    try:
        grid, xs, ys = sdf_grid(fp, bounds, args.res)
    except ValueError as exc:
        raise ConfigError(str(exc))
    name = args.name or f"sdf_{fp.name}.svg"
    (_out_dir(args) / name).write_text(sdf_svg(fp, grid, xs, ys))
    print(str(Path(args.out or ".") / name))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed override")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="evaluator threads")

    p = _Parser(prog="footprint-mppi", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", parents=[common], help="run one episode")
    r.add_argument("scenario")
    r.add_argument("--planner", choices=["exact", "hull"])
    r.add_argument("--svg", action="store_true")
    r.add_argument("--name", help="artifact file stem")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("suite", parents=[common], help="run seeded trials and aggregate")
    s.add_argument("scenario", nargs="?")
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--seeds", type=int, help="base seed; trial i uses base+i")
    s.add_argument("--planner", choices=["exact", "hull"])
    s.add_argument("--template", choices=["corridor", "gap", "trap"])
    s.add_argument("--don", type=float)
    s.add_argument("--footprint")
    s.add_argument("--model")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--name")
    s.set_defaults(func=cmd_suite)

    g = sub.add_parser("gen", parents=[common], help="generate a scenario for a target DoN")
    g.add_argument("--don", type=float, required=True)
    g.add_argument("--footprint", required=True)
    g.add_argument("--template", choices=["corridor", "gap", "trap"], required=True)
    g.add_argument("--model", help="motion model override (corridor: diff|ackermann, gap: any)")
    g.add_argument("-o", "--output", help="write here instead of stdout")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", parents=[common], help="evaluator scaling benchmark")
    b.add_argument("--footprints", help="directory or file of footprint JSON")
    b.add_argument("--counts", type=int, nargs="+")
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--name", help="CSV file name")
    b.set_defaults(func=cmd_bench)

    d = sub.add_parser("sdf", parents=[common], help="signed-distance heatmap SVG")
    d.add_argument("--footprint", required=True)
    d.add_argument("--bounds", type=float, nargs=4, metavar=("XMIN", "YMIN", "XMAX", "YMAX"))
    d.add_argument("--res", type=float, default=0.02)
    d.add_argument("--name", help="SVG file name")
    d.set_defaults(func=cmd_sdf)
    return p


def main(argv=None) -> int:
    from .scenario import ScenarioError

    parser = build_parser()
    args = parser.parse_args(argv)
    for k, v in (("seed", None), ("out", None), ("threads", None)):
        if not hasattr(args, k):
            setattr(args, k, v)
    try:
        n = _resolve_threads(args)
        if n is not None:
            from . import kernels

            kernels.set_threads(n)
        return args.func(args)
    except (ConfigError, ScenarioError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

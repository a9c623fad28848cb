"""Brute-force distance oracle and evaluator throughput benchmarks."""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .geometry import FootprintSpec, PolygonFootprint

CSV_COLUMNS = ("footprint", "evaluator", "queries", "trials", "mean_us", "std_us", "median_us", "threads")
DEFAULT_COUNTS = (100, 1_000, 10_000, 100_000, 1_000_000)
WARMUP = 3
REGION = 50.0


def oracle_sd_polygon(p, poly: PolygonFootprint, samples_per_edge: int) -> np.ndarray:
    """Signed distance by winding-angle sign and densely sampled edges.

    Shares no code with the ray-casting evaluator: containment comes from the
    accumulated turning angle of the vertices seen from ``p`` and the magnitude
    from the nearest of ``samples_per_edge`` points placed on every edge
    (endpoints included).
    """
    if samples_per_edge < 2:
        raise ValueError("samples_per_edge must be at least 2")
    pts = np.asarray(p, dtype=float)
    single = pts.ndim == 1
    pts = pts.reshape(-1, 2)
    v = poly.vertices
    w = np.roll(v, -1, axis=0)

    winding = np.zeros(len(pts))
    for a, b in zip(v, w):
        da, db = a - pts, b - pts
        cross = da[:, 0] * db[:, 1] - da[:, 1] * db[:, 0]
        dot = np.einsum("ij,ij->i", da, db)
        winding += np.arctan2(cross, dot)
    inside = np.abs(winding) > math.pi

    t = np.linspace(0.0, 1.0, samples_per_edge)
    samples = (v[:, None, :] + t[None, :, None] * (w - v)[:, None, :]).reshape(-1, 2)
    best = np.full(len(pts), np.inf)
    # chunk so 10^4 points x 10^4 samples stays within memory
    for lo in range(0, len(samples), 2048):
        chunk = samples[lo : lo + 2048]
        d = np.sqrt(((pts[:, None, :] - chunk[None, :, :]) ** 2).sum(-1)).min(axis=1)
        best = np.minimum(best, d)
    out = np.where(inside, -best, best)
    return out[0] if single else out


def winding_inside(p, poly: PolygonFootprint) -> np.ndarray:
    return oracle_sd_polygon(p, poly, 2) < 0


def query_batch(n: int, seed: int = 0, trial: int = 0, region: float = REGION) -> np.ndarray:
    """Uniform points in a ``region`` x ``region`` square centred on the body origin."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, n, trial])))
    return rng.uniform(-region / 2, region / 2, size=(n, 2))


@dataclass
class BenchReport:
    rows: list[dict] = field(default_factory=list)

    def to_csv(self, target=None) -> str:
        buf = io.StringIO()
        wr = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        wr.writeheader()
        for r in self.rows:
            wr.writerow({k: (f"{r[k]:.3f}" if isinstance(r[k], float) else r[k]) for k in CSV_COLUMNS})
        text = buf.getvalue()
        if target is not None:
            with open(target, "w", newline="") as f:
                f.write(text)
        return text

    def select(self, **match) -> list[dict]:
        return [r for r in self.rows if all(r[k] == v for k, v in match.items())]

    def speedup(self, footprint: str, queries: int, parallel: bool = False, stat: str = "median_us") -> float:
        """Polygon-edge time over rectangle-cover time for one footprint and count."""
        sfx = "_parallel" if parallel else ""
        def pick(ev):
            return self.select(footprint=footprint, queries=queries, evaluator=ev + sfx)[0][stat]
        return pick("poly") / pick("rect")


def scaling_benchmark(
    footprints: list[FootprintSpec],
    query_counts=DEFAULT_COUNTS,
    trials: int = 10,
    *,
    seed: int = 0,
    warmup: int = WARMUP,
    evaluators=("rect", "poly"),
    modes=("serial", "parallel"),
    threads: int | None = None,
) -> BenchReport:
    """Time each (footprint, evaluator, mode) at every query count.

    Warm-up calls (which also absorb JIT compilation) are excluded. Each
    trial evaluates a fresh seeded batch.
    """
    counts = [int(c) for c in query_counts]
    if counts != sorted(counts):
        raise ValueError("query counts must be ascending")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n_par = kernels.set_threads(threads)
    report = BenchReport()
    for fp in footprints:
        for ev in evaluators:
            for mode in modes:
                parallel = mode == "parallel"
                for n in counts:
                    batches = [query_batch(n, seed, k) for k in range(trials)]
                    for _ in range(warmup):
                        kernels.evaluate_points(fp, batches[0], ev, parallel)
                    times = []
                    for b in batches:
                        t0 = time.perf_counter()
                        kernels.evaluate_points(fp, b, ev, parallel)
                        times.append((time.perf_counter() - t0) * 1e6)
                    times = np.asarray(times)
                    report.rows.append({
                        "footprint": fp.name,
                        "evaluator": f"{ev}_parallel" if parallel else ev,
                        "queries": n,
                        "trials": trials,
                        "mean_us": float(times.mean()),
                        "std_us": float(times.std(ddof=1)) if trials > 1 else 0.0,
                        "median_us": float(np.median(times)),
                        "threads": n_par if parallel else 1,
                    })
    return report


def loglog_slope(report: BenchReport, footprint: str, evaluator: str, decades: int = 2) -> float:
    """Least-squares slope of log(median time) vs log(queries) over the top decades."""
    rows = sorted(report.select(footprint=footprint, evaluator=evaluator), key=lambda r: r["queries"])
    top = rows[-1]["queries"]
    rows = [r for r in rows if r["queries"] >= top / 10**decades]
    x = np.log10([r["queries"] for r in rows])
    y = np.log10([r["median_us"] for r in rows])
    return float(np.polyfit(x, y, 1)[0])


def boundary_band_points(poly: PolygonFootprint, n: int, band: float = 1e-3, seed: int = 0) -> np.ndarray:
    """Points scattered uniformly along the edges, offset by at most ``band``.

    Near the boundary the sampled-edge error is first order in the sample
    spacing, which is what the convergence check wants to see.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, n])))
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    e = rng.integers(0, len(v), n)
    t = rng.random(n)
    tang = (w - v)[e]
    nrm = np.stack([-tang[:, 1], tang[:, 0]], axis=1) / np.linalg.norm(tang, axis=1)[:, None]
    return v[e] + t[:, None] * tang + nrm * rng.uniform(-band, band, (n, 1))

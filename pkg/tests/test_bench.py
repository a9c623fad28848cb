import numpy as np
import pytest

from conftest import GALLERY
from footprint_mppi import kernels
from footprint_mppi.bench import (
    CSV_COLUMNS,
    boundary_band_points,
    oracle_sd_polygon,
    query_batch,
    scaling_benchmark,
    winding_inside,
)
from footprint_mppi.geometry import fixture_footprint, point_in_polygon, sd_polygon


def test_oracle_unit_square(unit_square):
    v = oracle_sd_polygon(np.array([0.5, 0.5]), unit_square.shape, 1000)
    assert abs(v + 0.5) <= 1.0 / 1000
    with pytest.raises(ValueError):
        oracle_sd_polygon(np.array([0.5, 0.5]), unit_square.shape, 1)


@pytest.mark.parametrize("name", GALLERY)
def test_oracle_agreement(name, gallery):
    poly = gallery[name].as_polygon().shape
    pts = query_batch(2000, seed=1, region=4.0)
    assert np.max(np.abs(oracle_sd_polygon(pts, poly, 1000) - sd_polygon(pts, poly))) <= 1e-3


@pytest.mark.parametrize("name", GALLERY)
def test_winding_matches_ray_cast(name, gallery):
    poly = gallery[name].as_polygon().shape
    pts = query_batch(10_000, seed=2, region=4.0)
    d = np.abs(sd_polygon(pts, poly))
    keep = d > 1e-9
    assert np.array_equal(winding_inside(pts[keep], poly), point_in_polygon(pts[keep], poly))


@pytest.mark.parametrize("name", GALLERY)
def test_oracle_convergence(name, gallery):
    # near the boundary the sampling error dominates and scales with 1/samples
    poly = gallery[name].as_polygon().shape
    pts = boundary_band_points(poly, 10_000, seed=3)
    exact = sd_polygon(pts, poly)
    err = [np.max(np.abs(oracle_sd_polygon(pts, poly, s) - exact)) for s in (50, 100)]
    assert 1.6 <= err[0] / err[1] <= 2.4


def test_query_batches_reproducible():
    a, b = query_batch(500, seed=4, trial=2), query_batch(500, seed=4, trial=2)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, query_batch(500, seed=4, trial=3))
    assert np.all(np.abs(a) <= 25.0)


@pytest.fixture(scope="module")
def small_report():
    fps = [fixture_footprint(n) for n in ("l_shape", "t_shape")]
    return scaling_benchmark(fps, [100, 1_000, 10_000, 100_000], trials=5, seed=0, threads=1)


def test_row_count(small_report):
    assert len(small_report.rows) == 2 * 4 * 4  # footprints x counts x evaluator kinds
    assert {r["evaluator"] for r in small_report.rows} == {"rect", "poly", "rect_parallel", "poly_parallel"}
    assert all(r["mean_us"] > 0 and r["trials"] == 5 for r in small_report.rows)


def test_time_monotone_in_count(small_report):
    for fp in ("L", "T"):
        for ev in ("rect", "poly", "rect_parallel", "poly_parallel"):
            rows = sorted(small_report.select(footprint=fp, evaluator=ev), key=lambda r: r["queries"])
            t = [r["median_us"] for r in rows]
            assert all(b >= 0.9 * a for a, b in zip(t, t[1:])), (fp, ev, t)


def test_csv_shape(small_report):
    lines = small_report.to_csv().strip().splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS)
    assert len(lines) == 1 + len(small_report.rows)


def test_rect_faster_than_poly(small_report):
    for fp in ("L", "T"):
        assert small_report.speedup(fp, 100_000) > 1.0


def test_benchmark_argument_checks():
    fp = fixture_footprint("l_shape")
    with pytest.raises(ValueError):
        scaling_benchmark([fp], [1000, 100], trials=1)
    with pytest.raises(ValueError):
        scaling_benchmark([fp], [100], trials=0)


def test_evaluators_agree():
    for name in ("l_shape", "t_shape", "f_shape"):
        fp = fixture_footprint(name)
        pts = query_batch(5000, seed=5, region=4.0)
        rect = kernels.evaluate_points(fp, pts, "rect", False)
        poly = kernels.evaluate_points(fp, pts, "poly", False)
        ext = rect > 0
        np.testing.assert_allclose(rect[ext], poly[ext], atol=1e-9, rtol=0)
        np.testing.assert_array_equal(kernels.evaluate_points(fp, pts, "poly", True), poly)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from footprint_mppi.geometry import FIXTURE_DIR, ObstacleSet, fixture_footprint, hull_footprint, polygon_footprint
from footprint_mppi.generators import gap_scenario
from footprint_mppi.scenario import Scenario, load_scenario
from footprint_mppi.world import (
    Obstacle,
    SensorConfig,
    WorldState,
    compute_don,
    ground_truth_collision,
    run_episode,
    sense,
    step_world,
)

SCEN = FIXTURE_DIR / "scenarios"
SQUARE = polygon_footprint("sq", [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])


def disc(x, y, r, **kw):
    return Obstacle("disc", center=(x, y), radius=r, **kw)


def box(x0, y0, x1, y1, **kw):
    return Obstacle("polygon", vertices=np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float), **kw)


# --- sensing ------------------------------------------------------------------


def test_sense_nothing_in_range():
    w = WorldState((disc(20, 0, 1),))
    obs = sense(w, (0, 0, 0), SensorConfig(range=5, budget=32))
    assert obs.capacity == 32 and obs.count == 0


def test_sense_single_disc_visible_side():
    d = disc(3, 0, 0.5)
    cfg = SensorConfig(range=8, budget=200)
    obs = sense(WorldState((d,)), (0, 0, 0), cfg)
    samples = d.boundary_samples(cfg.spacing)
    assert 0 < obs.count < len(samples) < cfg.budget
    got = obs.valid_points()
    # every returned point is a boundary sample
    assert all(np.min(np.linalg.norm(samples - p, axis=1)) < 1e-12 for p in got)
    # every sample clearly facing the sensor is returned
    c = np.array([3.0, 0.0])
    facing = samples[((samples - c) @ (-c)) / (0.5 * 3.0) > 0.5]
    for p in facing:
        assert np.min(np.linalg.norm(got - p, axis=1)) < 1e-12
    assert np.all(obs.points[~obs.mask] == 1e9)


def test_sense_occluded_disc():
    front, back = disc(3, 0, 1.0), disc(6, 0, 0.3)
    # ray oracle: every ray to the back disc passes through the front disc
    for p in back.boundary_samples(0.05):
        t = np.linspace(0, 1, 2000)[:, None] * p
        assert np.any(np.linalg.norm(t - [3, 0], axis=1) < 1.0)
    obs = sense(WorldState((front, back)), (0, 0, 0), SensorConfig(range=10, budget=500))
    pts = obs.valid_points()
    assert len(pts) > 0
    assert np.all(np.linalg.norm(pts - [6, 0], axis=1) > 0.3 + 1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 64), st.floats(-4, 4), st.floats(-4, 4), st.integers(0, 1000))
def test_sense_budget(budget, x, y, seed):
    w = WorldState((box(-5, -5, 5, -4.8), disc(1, 2, 0.5), box(2, -1, 3, 1)))
    for mode in ("uniform", "nearest"):
        obs = sense(w, (x, y, 0), SensorConfig(range=6, budget=budget, downsample=mode), seed=seed)
        assert obs.capacity == budget and obs.count <= budget


# --- world stepping -------------------------------------------------------------


def test_step_world_static():
    w = WorldState((box(0, 0, 1, 1),))
    w2 = step_world(w, 0.5)
    assert np.array_equal(w2.shapes()[0][1], w.shapes()[0][1])


def test_step_world_trail():
    ob = disc(0, 0, 0.2, trail=[[0, 0], [1, 0]], speed=0.5)
    w = WorldState((ob,))
    np.testing.assert_allclose(step_world(w, 1.0).shapes()[0][1][0], [0.5, 0], atol=1e-12)
    w3 = step_world(w, 3.0)
    np.testing.assert_allclose(w3.shapes()[0][1][0], [0.5, 0], atol=1e-12)
    # heading back toward the start
    np.testing.assert_allclose(step_world(w3, 0.2).shapes()[0][1][0], [0.4, 0], atol=1e-12)
    with pytest.raises(ValueError):
        step_world(w, 0.0)


# --- ground truth -----------------------------------------------------------------


def test_ground_truth_examples():
    far = [("disc", (np.array([10.0, 10.0]), 1.0))]
    assert not ground_truth_collision(SQUARE, (0, 0, 0), far)
    inside = [("disc", (np.array([0.1, 0.1]), 0.05))]
    assert ground_truth_collision(SQUARE, (0, 0, 0), inside)
    # a bar crossing the square: no vertex of either shape lies inside the other
    bar = np.array([[-1, -0.1], [1, -0.1], [1, 0.1], [-1, 0.1]], dtype=float)
    assert ground_truth_collision(SQUARE, (0, 0, 0), [("polygon", bar)])
    assert not ground_truth_collision(SQUARE, (0, 0.75, 0), [("polygon", bar)])
    # rotated pose brings a corner into contact
    assert ground_truth_collision(SQUARE, (0, 0.75, math.pi / 4), [("polygon", bar)])


# --- DoN --------------------------------------------------------------------------


def _gap_scenario(fp, model, half):
    data = gap_scenario(fp, 1.0, model=model)
    data["gap"] = {"a": [0.0, -half], "b": [0.0, half]}
    return Scenario.from_dict(data)


def test_don_examples():
    l = fixture_footprint("l_shape")
    assert compute_don(_gap_scenario(l, "omni", 1.0)) == pytest.approx(1.0)
    assert round(compute_don(_gap_scenario(l, "omni", 1.2)), 2) == 0.83
    unit = polygon_footprint("unit", [[0, 0], [1, 0], [1, 1], [0, 1]])
    assert compute_don(_gap_scenario(unit, "diff", 1.0)) == pytest.approx(0.5)


def test_don_requires_gap():
    data = gap_scenario(fixture_footprint("l_shape"), 1.0)
    del data["gap"]
    with pytest.raises(ValueError):
        compute_don(Scenario.from_dict(data))


@pytest.mark.parametrize("name", ["t_shape", "l_shape", "f_shape", "star", "arrow", "cart"])
@pytest.mark.parametrize("model", ["diff", "omni", "parallel"])
def test_don_hull_invariance(name, model):
    fp = fixture_footprint(name)
    sc = _gap_scenario(fp, model, 1.0)
    assert compute_don(sc) == pytest.approx(compute_don(sc, hull_footprint(fp)), abs=1e-12)


# --- episodes -------------------------------------------------------------------------


def test_goal_equals_start():
    sc = load_scenario(SCEN / "open_field.json")
    data = sc.to_dict()
    data["goal"] = list(sc.start)
    res = run_episode(Scenario.from_dict(data))
    assert res.success and res.failure_kind == "none"
    assert res.nav_time == 0 and res.path_length == 0


@pytest.fixture(scope="module")
def open_field():
    sc = load_scenario(SCEN / "open_field.json")
    return sc, run_episode(sc)


def test_open_field_path_bound(open_field):
    sc, res = open_field
    assert res.success
    tol = sc.goal_tolerance[0]
    # reaching the tolerance disc can shorten the 5 m straight line by at most tol
    assert 5.0 - tol <= res.path_length <= 6.0


def test_metric_identities(open_field):
    _, res = open_field
    xy = np.c_[res.trajectory["x"], res.trajectory["y"]]
    assert res.path_length == pytest.approx(np.sum(np.linalg.norm(np.diff(xy, axis=0), axis=1)), abs=1e-9)
    assert res.mean_speed * res.nav_time == pytest.approx(res.path_length, abs=1e-6)


def test_planner_truth_consistency(open_field):
    sc, res = open_field
    tr = res.trajectory
    for x, y, th, d in zip(tr["x"], tr["y"], tr["theta"], tr["d_min_planner"]):
        if np.isfinite(d) and d >= 0:
            assert not ground_truth_collision(sc.footprint, (x, y, th), WorldState(sc.obstacles).shapes())


def test_goal_behind_wall_fails():
    res = run_episode(load_scenario(SCEN / "goal_behind_wall.json"))
    assert not res.success
    assert res.failure_kind in ("timeout", "stall")


def test_episode_determinism():
    sc = load_scenario(SCEN / "gap_l_don0.83.json")
    data = sc.to_dict()
    data["time_limit"] = 3.0
    short = Scenario.from_dict(data)
    a, b = run_episode(short), run_episode(short)
    assert a.summary() == b.summary()
    for k in a.trajectory:
        np.testing.assert_array_equal(a.trajectory[k], b.trajectory[k])


def test_start_in_collision_rejected():
    sc = load_scenario(SCEN / "open_field.json")
    data = sc.to_dict()
    data["obstacles"].append({"type": "disc", "center": [0.0, 0.0], "radius": 0.3})
    with pytest.raises(ValueError):
        run_episode(Scenario.from_dict(data))

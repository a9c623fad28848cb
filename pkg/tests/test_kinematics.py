import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from footprint_mppi.geometry import body_to_world
from footprint_mppi.kinematics import (
    MODEL_KINDS,
    KinematicLimits,
    MotionModel,
    clamp_control,
    derivative,
    rollout,
    step,
    wrap_angle,
)

DIFF = MotionModel("diff")


@pytest.mark.parametrize(
    "model, q, u, expected",
    [
        (MotionModel("diff"), (0, 0, 0), (1, 0), (1, 0, 0)),
        (MotionModel("ackermann", 1.0), (0, 0, 0), (1, math.pi / 4), (1, 0, 1)),
        (MotionModel("omni"), (0, 0, math.pi / 2), (0, 1, 0), (-1, 0, 0)),
        (MotionModel("parallel"), (0, 0, 0), (1,), (0, 1, 0)),
        (MotionModel("spin"), (3, 4, 1.0), (0.5,), (0, 0, 0.5)),
    ],
)
def test_derivative_examples(model, q, u, expected):
    np.testing.assert_allclose(derivative(model, q, u), expected, atol=1e-15)


def test_derivative_rejects_mismatched_control():
    with pytest.raises(ValueError):
        derivative(DIFF, (0, 0, 0), (1, 0, 0))
    with pytest.raises(ValueError):
        MotionModel("ackermann", 0.0)
    with pytest.raises(ValueError):
        MotionModel("tank")


def test_step_examples():
    np.testing.assert_allclose(step(DIFF, (0, 0, 0), (1, 0), 0.1), (0.1, 0, 0), atol=1e-15)
    np.testing.assert_allclose(step(MotionModel("spin"), (1, 2, 0), (1,), 0.1), (1, 2, 0.1), atol=1e-15)
    np.testing.assert_allclose(step(DIFF, (0, 0, math.pi / 2), (2, 0), 0.5), (0, 1, math.pi / 2), atol=1e-15)
    with pytest.raises(ValueError):
        step(DIFF, (0, 0, 0), (1, 0), 0.0)


def test_clamp_examples():
    lim = KinematicLimits.symmetric((1.5, 1.0), (100.0, 100.0))
    np.testing.assert_allclose(clamp_control((2.0, 0), (2.0, 0), lim, 0.1), (1.5, 0))
    np.testing.assert_array_equal(clamp_control((0.5, -0.2), (0.5, -0.2), lim, 0.1), (0.5, -0.2))
    rate = KinematicLimits.symmetric((1.5, 1.0), (1.0, 1.0))
    np.testing.assert_allclose(clamp_control((1.0, 0), (0, 0), rate, 0.1), (0.1, 0))


def test_rollout_examples():
    zero = rollout(DIFF, (1, 2, 0.3), np.zeros((7, 2)), 0.1)
    assert zero.shape == (8, 3)
    np.testing.assert_array_equal(zero, np.tile([1, 2, 0.3], (8, 1)))
    line = rollout(DIFF, (0, 0, 0), np.tile([1.0, 0.0], (5, 1)), 0.1)
    np.testing.assert_allclose(line[:, 0], np.arange(6) * 0.1, atol=1e-15)
    with pytest.raises(ValueError):
        rollout(DIFF, (0, 0, 0), np.zeros((0, 2)), 0.1)


def test_euler_arc_error():
    traj = rollout(DIFF, (0, 0, 0), np.tile([1.0, 1.0], (100, 1)), 0.01)
    assert traj[-1, 2] == pytest.approx(1.0, abs=1e-12)
    # unit circle centred at (0, 1)
    analytic = np.array([math.sin(1.0), 1 - math.cos(1.0)])
    assert np.linalg.norm(traj[-1, :2] - analytic) <= 0.02


def test_wrap_angle():
    assert float(wrap_angle(math.pi)) == pytest.approx(math.pi)
    assert float(wrap_angle(-math.pi)) == pytest.approx(math.pi)
    assert float(wrap_angle(3 * math.pi / 2)) == pytest.approx(-math.pi / 2)


def _model(kind):
    return MotionModel(kind, 0.8) if kind == "ackermann" else MotionModel(kind)


coord = st.floats(-10, 10, allow_nan=False)
ang = st.floats(-math.pi, math.pi, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(MODEL_KINDS), coord, coord, ang, coord, coord, ang, st.integers(0, 2**32 - 1))
def test_frame_equivariance(kind, x, y, th, gx, gy, gth, seed):
    model = _model(kind)
    rng = np.random.default_rng(seed)
    controls = rng.uniform(-1, 1, (20, model.n_u))
    base = rollout(model, (x, y, th), controls, 0.1)
    g = (gx, gy, gth)
    start = body_to_world(np.array([x, y]), g)
    moved = rollout(model, (start[0], start[1], th + gth), controls, 0.1)
    np.testing.assert_allclose(moved[:, :2], body_to_world(base[:, :2], g), atol=1e-9, rtol=0)
    np.testing.assert_allclose(moved[:, 2], base[:, 2] + gth, atol=1e-9, rtol=0)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=2),
    st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=2),
    st.floats(0.01, 1.0),
)
def test_clamp_idempotent(u, u_prev, dt):
    lim = KinematicLimits.symmetric((1.5, 1.0), (1.0, 2.0))
    once = clamp_control(u, u_prev, lim, dt)
    np.testing.assert_array_equal(clamp_control(once, u_prev, lim, dt), once)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(["spin", "diff", "omni"]), coord, coord, ang, st.integers(1, 60), st.floats(-2, 2))
def test_pure_rotation_keeps_position(kind, x, y, th, horizon, w):
    model = MotionModel(kind)
    u = {"spin": [w], "diff": [0.0, w], "omni": [0.0, 0.0, w]}[kind]
    traj = rollout(model, (x, y, th), np.tile(u, (horizon, 1)), 0.1)
    assert np.all(traj[:, 0] == x) and np.all(traj[:, 1] == y)


@settings(max_examples=50, deadline=None)
@given(coord, coord, ang, st.lists(st.floats(-1.5, 1.5), min_size=1, max_size=30))
def test_ackermann_straight_matches_diff(x, y, th, vs):
    v = np.asarray(vs)[:, None]
    z = np.zeros_like(v)
    a = rollout(MotionModel("ackermann", 0.8), (x, y, th), np.hstack([v, z]), 0.1)
    d = rollout(DIFF, (x, y, th), np.hstack([v, z]), 0.1)
    np.testing.assert_array_equal(a, d)

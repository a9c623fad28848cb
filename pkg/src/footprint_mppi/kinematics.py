"""Planar motion models, forward-Euler propagation and limit enforcement.

Control layouts per model:

=========  ====================
diff       (v, omega)
ackermann  (v, delta)
omni       (v_x, v_y, omega)
spin       (omega,)
parallel   (v_para,)
=========  ====================

Every function accepts batched inputs: ``q`` has shape ``(..., 3)`` and ``u``
shape ``(..., n_u)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CONTROL_NAMES = {
    "diff": ("v", "omega"),
    "ackermann": ("v", "delta"),
    "omni": ("v_x", "v_y", "omega"),
    "spin": ("omega",),
    "parallel": ("v_para",),
}
MODEL_KINDS = tuple(CONTROL_NAMES)


@dataclass(frozen=True)
class MotionModel:
    kind: str
    wheelbase: float = 1.0

    def __post_init__(self):
        if self.kind not in CONTROL_NAMES:
            raise ValueError(f"unknown motion model {self.kind!r}")
        if self.kind == "ackermann" and not self.wheelbase > 0:
            raise ValueError("ackermann wheelbase must be positive")

    @property
    def n_u(self) -> int:
        return len(CONTROL_NAMES[self.kind])

    @property
    def control_names(self) -> tuple[str, ...]:
        return CONTROL_NAMES[self.kind]

    def zero(self) -> np.ndarray:
        return np.zeros(self.n_u)


def _check(model: MotionModel, u: np.ndarray):
    if u.shape[-1] != model.n_u:
        raise ValueError(
            f"{model.kind} expects {model.n_u} control components, got {u.shape[-1]}"
        )


def derivative(model: MotionModel, q, u) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    u = np.asarray(u, dtype=float)
    _check(model, u)
    th = q[..., 2]
    c, s = np.cos(th), np.sin(th)
    zero = np.zeros(np.broadcast_shapes(th.shape, u.shape[:-1]))
    k = model.kind
    if k == "diff":
        v, w = u[..., 0], u[..., 1]
        return np.stack([v * c, v * s, w + zero], axis=-1)
    if k == "ackermann":
        v, delta = u[..., 0], u[..., 1]
        return np.stack([v * c, v * s, v / model.wheelbase * np.tan(delta)], axis=-1)
    if k == "omni":
        vx, vy, w = u[..., 0], u[..., 1], u[..., 2]
        return np.stack([vx * c - vy * s, vx * s + vy * c, w + zero], axis=-1)
    if k == "spin":
        return np.stack([zero, zero, u[..., 0] + zero], axis=-1)
    v = u[..., 0]
    return np.stack([-v * s, v * c, zero], axis=-1)


def step(model: MotionModel, q, u, dt: float) -> np.ndarray:
    if not dt > 0:
        raise ValueError("dt must be positive")
    return np.asarray(q, dtype=float) + derivative(model, q, u) * dt


def rollout(model: MotionModel, q0, controls, dt: float) -> np.ndarray:
    """States ``(..., T+1, 3)`` from ``controls`` of shape ``(..., T, n_u)``."""
    controls = np.asarray(controls, dtype=float)
    if controls.ndim < 2 or controls.shape[-2] == 0:
        raise ValueError("rollout needs a nonempty control sequence")
    horizon = controls.shape[-2]
    q = np.broadcast_to(np.asarray(q0, dtype=float), controls.shape[:-2] + (3,))
    states = np.empty(controls.shape[:-2] + (horizon + 1, 3))
    states[..., 0, :] = q
    for h in range(horizon):
        q = step(model, q, controls[..., h, :], dt)
        states[..., h + 1, :] = q
    return states


@dataclass(frozen=True)
class KinematicLimits:
    """Per-component bounds. Rate bounds may be infinite."""

    v_min: tuple[float, ...]
    v_max: tuple[float, ...]
    a_min: tuple[float, ...]
    a_max: tuple[float, ...]

    def __post_init__(self):
        n = len(self.v_min)
        if not (len(self.v_max) == len(self.a_min) == len(self.a_max) == n):
            raise ValueError("limit vectors differ in length")
        for lo, hi in zip(self.v_min + self.a_min, self.v_max + self.a_max):
            if lo > hi:
                raise ValueError(f"limit min {lo} exceeds max {hi}")

    @classmethod
    def symmetric(cls, v, a) -> "KinematicLimits":
        v = tuple(float(x) for x in v)
        a = tuple(float(x) for x in a)
        return cls(tuple(-x for x in v), v, tuple(-x for x in a), a)

    def arrays(self):
        return tuple(np.asarray(x, dtype=float) for x in (self.v_min, self.v_max, self.a_min, self.a_max))


# Hardware limits from the deployment table. Ackermann steering uses an
# assumed 0.6 rad bound with 1 rad/s steering rate; parallel mode keeps only
# the lateral channel.
DEFAULT_LIMITS = {
    "diff": KinematicLimits.symmetric((1.5, 1.0), (1.0, 1.0)),
    "ackermann": KinematicLimits.symmetric((1.5, 0.6), (1.0, 1.0)),
    "omni": KinematicLimits.symmetric((1.0, 0.4, 1.0), (1.0, 1.0, 1.0)),
    "spin": KinematicLimits.symmetric((1.0,), (2.0,)),
    "parallel": KinematicLimits.symmetric((0.6,), (1.0,)),
}


def default_limits(kind: str) -> KinematicLimits:
    return DEFAULT_LIMITS[kind]


def clamp_control(u, u_prev, limits: KinematicLimits, dt: float) -> np.ndarray:
    """Velocity clip, then rate clip against ``u_prev``."""
    vlo, vhi, alo, ahi = limits.arrays()
    u = np.clip(np.asarray(u, dtype=float), vlo, vhi)
    u_prev = np.asarray(u_prev, dtype=float)
    return np.clip(u, u_prev + alo * dt, u_prev + ahi * dt)


def clamp_sequence(controls, u_prev, limits: KinematicLimits, dt: float) -> np.ndarray:
    """Sequential clamp along the horizon axis (``-2``) of ``controls``."""
    controls = np.asarray(controls, dtype=float)
    out = np.empty_like(controls)
    prev = np.broadcast_to(np.asarray(u_prev, dtype=float), controls[..., 0, :].shape)
    for h in range(controls.shape[-2]):
        prev = clamp_control(controls[..., h, :], prev, limits, dt)
        out[..., h, :] = prev
    return out


def to_twist(model: MotionModel, u) -> np.ndarray:
    """Body twist ``(v_x, v_y, omega)`` produced by control ``u``."""
    u = np.asarray(u, dtype=float)
    _check(model, u)
    z = np.zeros(u.shape[:-1])
    k = model.kind
    if k == "diff":
        return np.stack([u[..., 0], z, u[..., 1]], axis=-1)
    if k == "ackermann":
        return np.stack([u[..., 0], z, u[..., 0] / model.wheelbase * np.tan(u[..., 1])], axis=-1)
    if k == "omni":
        return u.copy()
    if k == "spin":
        return np.stack([z, z, u[..., 0]], axis=-1)
    return np.stack([z, u[..., 0], z], axis=-1)


def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    a = np.asarray(a, dtype=float)
    w = np.mod(a + np.pi, 2 * np.pi) - np.pi
    return np.where(w == -np.pi, np.pi, w)

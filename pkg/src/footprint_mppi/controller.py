"""Batched sampling controller with footprint-exact obstacle cost.

One control cycle samples K perturbed control sequences around the nominal,
propagates them, scores every pre-step state against the observed obstacle
points with the signed-distance evaluator, and forms a softmax-weighted update.
The updated nominal is re-rolled and only executed if every step keeps at
least ``d_safe`` of clearance; otherwise the controller holds zero velocity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .geometry import EMPTY_CLEARANCE, FootprintSpec, ObstacleSet
from .kinematics import (
    KinematicLimits,
    MotionModel,
    clamp_sequence,
    rollout,
    wrap_angle,
)


@dataclass(frozen=True)
class MppiParams:
    K: int = 1000
    T: int = 50
    dt: float = 0.1
    lam: float = 1.0
    sigma: tuple[float, ...] | None = None  # None: 0.3 per component
    d_safe: float = 0.1
    w_coll: float = 1e6
    w_rep: float = 50.0
    w_inf: float = 1e9
    w_goal: float = 1.0
    w_head: float = 0.0
    w_terminal: float = 0.0
    w_xtrack: float = 0.0
    w_prog: float = 0.0
    w_ctrl: tuple[float, ...] | float = 0.0
    rng_seed: int = 0
    empty_clearance: float = EMPTY_CLEARANCE

    def __post_init__(self):
        if self.K < 1 or self.T < 1:
            raise ValueError("K and T must be at least 1")
        if not self.dt > 0 or not self.lam > 0:
            raise ValueError("dt and lambda must be positive")
        if self.sigma is not None and any(not s > 0 for s in self.sigma):
            raise ValueError("sigma components must be positive")
        if self.d_safe < 0:
            raise ValueError("d_safe must be nonnegative")
        for name in ("w_coll", "w_rep", "w_inf"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def resolved_sigma(self, n_u: int) -> np.ndarray:
        if self.sigma is None:
            return np.full(n_u, 0.3)
        s = np.asarray(self.sigma, dtype=float)
        if s.size == 1:
            return np.full(n_u, float(s[0]))
        if s.size != n_u:
            raise ValueError(f"sigma has {s.size} components, model needs {n_u}")
        return s

    def ctrl_weights(self, n_u: int) -> np.ndarray:
        w = np.asarray(self.w_ctrl, dtype=float).reshape(-1)
        return np.full(n_u, float(w[0])) if w.size == 1 else w


# ---------------------------------------------------------------------------
# guidance


@dataclass(frozen=True, eq=False)
class Guidance:
    """Waypoint polyline plus goal pose, both in the world frame."""

    polyline: np.ndarray
    goal: tuple[float, float, float]

    def __post_init__(self):
        pl = np.asarray(self.polyline, dtype=float).reshape(-1, 2)
        if len(pl) == 0:
            raise ValueError("guidance polyline is empty")
        object.__setattr__(self, "polyline", pl)
        object.__setattr__(self, "goal", tuple(float(v) for v in self.goal))
        seg = np.diff(pl, axis=0)
        seg_len = np.linalg.norm(seg, axis=1)
        keep = seg_len > 0
        object.__setattr__(self, "_a", pl[:-1][keep])
        object.__setattr__(self, "_e", seg[keep])
        object.__setattr__(self, "_len", seg_len[keep])
        object.__setattr__(self, "_s0", np.concatenate([[0.0], np.cumsum(seg_len[keep])])[:-1])

    @property
    def length(self) -> float:
        return float(np.sum(self._len))

    def project(self, p) -> tuple[np.ndarray, np.ndarray]:
        """Distance to the polyline and arc length of the closest point."""
        p = np.asarray(p, dtype=float)
        if len(self._a) == 0:
            return np.linalg.norm(p - self.polyline[0], axis=-1), np.zeros(p.shape[:-1])
        w = p[..., None, :] - self._a
        t = np.clip(np.einsum("...si,si->...s", w, self._e) / self._len**2, 0.0, 1.0)
        diff = w - t[..., None] * self._e
        d2 = np.einsum("...si,...si->...s", diff, diff)
        j = np.argmin(d2, axis=-1)
        dist = np.sqrt(np.take_along_axis(d2, j[..., None], axis=-1)[..., 0])
        tj = np.take_along_axis(t, j[..., None], axis=-1)[..., 0]
        return dist, self._s0[j] + tj * self._len[j]


def task_cost(q, u, guidance: Guidance, params: MppiParams, terminal: bool = False):
    """Stage task cost; ``terminal`` adds the heading error term.

    ``u`` is accepted for signature symmetry; control effort is scored
    separately by :func:`control_cost`.
    """
    q = np.asarray(q, dtype=float)
    gx, gy, gth = guidance.goal
    dx, dy = q[..., 0] - gx, q[..., 1] - gy
    cost = params.w_goal * (dx * dx + dy * dy)
    if params.w_xtrack or params.w_prog:
        dist, prog = guidance.project(q[..., :2])
        cost = cost + params.w_xtrack * dist**2 - params.w_prog * prog
    if terminal and params.w_head:
        cost = cost + params.w_head * wrap_angle(q[..., 2] - gth) ** 2
    return cost


def terminal_cost(q_T, guidance: Guidance, params: MppiParams):
    """Goal terms on the terminal state, folded into the last stage."""
    q_T = np.asarray(q_T, dtype=float)
    gx, gy, gth = guidance.goal
    dx, dy = q_T[..., 0] - gx, q_T[..., 1] - gy
    return params.w_terminal * (dx * dx + dy * dy) + params.w_head * wrap_angle(q_T[..., 2] - gth) ** 2


def control_cost(u, params: MppiParams):
    u = np.asarray(u, dtype=float)
    return np.sum(params.ctrl_weights(u.shape[-1]) * u * u, axis=-1)


def obstacle_cost(d, params: MppiParams):
    d = np.asarray(d, dtype=float)
    return params.w_coll * (d < 0) + params.w_rep * np.maximum(params.d_safe - d, 0.0) ** 2


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class RngState:
    """Counter-based stream position: (seed, stream, cycle)."""

    seed: int
    cycle: int = 0
    stream: int = 0


def sample_perturbations(rng_state: RngState, params: MppiParams, n_u: int | None = None):
    """Gaussian perturbations ``(K, T, n_u)`` and the advanced state.

    The Philox key is derived from (seed, stream, cycle) only; values are laid
    out rollout-major, so rollout r / step h always reads the same draws no
    matter how the batch is later partitioned.
    """
    if n_u is None:
        n_u = len(params.sigma) if params.sigma is not None else 1
    sigma = params.resolved_sigma(n_u)
    ss = np.random.SeedSequence([rng_state.seed & 0xFFFFFFFFFFFFFFFF, rng_state.stream, rng_state.cycle])
    gen = np.random.Generator(np.random.Philox(ss))
    eps = gen.standard_normal((params.K, params.T, n_u)) * sigma
    return eps, replace(rng_state, cycle=rng_state.cycle + 1)


# ---------------------------------------------------------------------------
# rollout evaluation


@dataclass(frozen=True, eq=False)
class RolloutBatch:
    perturbations: np.ndarray  # effective: controls - nominal
    controls: np.ndarray  # (K, T, n_u)
    states: np.ndarray  # (K, T+1, 3)
    d_min: np.ndarray  # (K, T)
    costs: np.ndarray  # (K,)
    unsafe: np.ndarray  # (K,)


def _fp_arrays(footprint: FootprintSpec, cache: dict | None = None):
    if cache is not None:
        key = id(footprint)
        if key not in cache:
            cache[key] = kernels.footprint_arrays(footprint)
        return cache[key]
    return kernels.footprint_arrays(footprint)


def trajectory_costs(states, controls, d_min, guidance: Guidance, params: MppiParams):
    """Total cost J per trajectory; states carry T+1 entries."""
    stage = task_cost(states[..., :-1, :], controls, guidance, params)
    stage = stage + control_cost(controls, params) + obstacle_cost(d_min, params)
    return np.sum(stage, axis=-1) + terminal_cost(states[..., -1, :], guidance, params)


def evaluate_rollouts(
    q0,
    nominal,
    perturbations,
    obstacles: ObstacleSet,
    footprint: FootprintSpec,
    model: MotionModel,
    limits: KinematicLimits,
    params: MppiParams,
    guidance: Guidance,
    u_prev=None,
    fp_arrays=None,
) -> RolloutBatch:
    nominal = np.asarray(nominal, dtype=float)
    eps = np.asarray(perturbations, dtype=float)
    if u_prev is None:
        u_prev = np.zeros(model.n_u)
    controls = clamp_sequence(nominal[None] + eps, u_prev, limits, params.dt)
    states = rollout(model, q0, controls, params.dt)
    fa = fp_arrays if fp_arrays is not None else kernels.footprint_arrays(footprint)
    d_min = kernels.batch_min_signed_distance(
        fa, states[:, :-1, :], obstacles.points, obstacles.mask, params.empty_clearance
    )
    costs = trajectory_costs(states, controls, d_min, guidance, params)
    unsafe = np.any(d_min < params.d_safe, axis=1)
    return RolloutBatch(controls - nominal[None], controls, states, d_min, costs, unsafe)


def softmax_weights(costs, lam: float) -> np.ndarray:
    costs = np.asarray(costs, dtype=float)
    w = np.exp(-(costs - np.min(costs)) / lam)
    return w / np.sum(w)


def path_integral_update(nominal, perturbations, costs, lam: float) -> np.ndarray:
    w = softmax_weights(costs, lam)
    return np.asarray(nominal, dtype=float) + np.tensordot(w, perturbations, axes=(0, 0))


def validate_nominal(
    nominal,
    q0,
    obstacles: ObstacleSet,
    footprint: FootprintSpec,
    model: MotionModel,
    limits: KinematicLimits,
    params: MppiParams,
    u_prev=None,
    fp_arrays=None,
):
    """Re-roll the nominal; valid iff d_min >= d_safe at every pre-step state.

    Returns ``(valid, d_min, states, controls)``.
    """
    if u_prev is None:
        u_prev = np.zeros(model.n_u)
    controls = clamp_sequence(np.asarray(nominal, dtype=float), u_prev, limits, params.dt)
    states = rollout(model, q0, controls, params.dt)
    fa = fp_arrays if fp_arrays is not None else kernels.footprint_arrays(footprint)
    d = kernels.batch_min_signed_distance(
        fa, states[:-1], obstacles.points, obstacles.mask, params.empty_clearance
    )
    return bool(np.all(d >= params.d_safe)), d, states, controls


# ---------------------------------------------------------------------------
# control cycle


@dataclass
class ControlDecision:
    command: np.ndarray
    validated: bool
    nominal: np.ndarray
    diagnostics: dict = field(default_factory=dict)


class MppiController:
    """Owns the nominal sequence and RNG counter for one control loop."""

    def __init__(
        self,
        model: MotionModel,
        footprint: FootprintSpec,
        limits: KinematicLimits,
        params: MppiParams,
        stream: int = 0,
    ):
        self.model = model
        self.footprint = footprint
        self.limits = limits
        self.params = replace(params, sigma=tuple(params.resolved_sigma(model.n_u)))
        self.rng = RngState(int(params.rng_seed), 0, stream)
        self.nominal = np.zeros((params.T, model.n_u))
        self.u_prev = np.zeros(model.n_u)
        self.fp_arrays = kernels.footprint_arrays(footprint)

    def warm_start(self, velocity) -> None:
        """Fill the nominal with the measured chassis velocity."""
        v = np.asarray(velocity, dtype=float).reshape(self.model.n_u)
        self.nominal = np.tile(v, (self.params.T, 1))
        self.u_prev = v.copy()

    def reset(self) -> None:
        self.nominal = np.zeros_like(self.nominal)

    def step(self, q0, obstacles: ObstacleSet, guidance: Guidance) -> ControlDecision:
        return control_cycle(self, q0, obstacles, guidance)


def control_cycle(ctrl: MppiController, q0, obstacles: ObstacleSet, guidance: Guidance) -> ControlDecision:
    p = ctrl.params
    eps, ctrl.rng = sample_perturbations(ctrl.rng, p, ctrl.model.n_u)
    batch = evaluate_rollouts(
        q0, ctrl.nominal, eps, obstacles, ctrl.footprint, ctrl.model, ctrl.limits, p,
        guidance, ctrl.u_prev, ctrl.fp_arrays,
    )
    augmented = batch.costs + p.w_inf * batch.unsafe
    weights = softmax_weights(augmented, p.lam)
    updated = ctrl.nominal + np.tensordot(weights, batch.perturbations, axes=(0, 0))
    valid, d_nom, states, controls = validate_nominal(
        updated, q0, obstacles, ctrl.footprint, ctrl.model, ctrl.limits, p, ctrl.u_prev, ctrl.fp_arrays
    )
    nz = weights[weights > 0]
    diagnostics = {
        "beta": float(np.min(augmented)),
        "entropy": float(-np.sum(nz * np.log(nz))),
        "ess": float(1.0 / np.sum(weights**2)),
        "unsafe_fraction": float(np.mean(batch.unsafe)),
        "nominal_d_min": d_nom,
        "nominal_cost": float(trajectory_costs(states, controls, d_nom, guidance, p)) if valid else math.inf,
        "nominal_states": states,
    }
    if valid:
        command = controls[0].copy()
        ctrl.nominal = np.concatenate([controls[1:], controls[-1:]], axis=0)
    else:
        command = np.zeros(ctrl.model.n_u)
        ctrl.nominal = np.zeros_like(ctrl.nominal)
    ctrl.u_prev = command.copy()
    return ControlDecision(command, valid, ctrl.nominal.copy(), diagnostics)

"""Mode selection across several motion regimes sharing one footprint.

Each mode runs its own control cycle. The validated candidates compete on
cost plus a switching penalty, a cooldown counter suppresses chattering, and
the winning command is projected onto the mode's admissible inputs and lifted
out of the actuator deadzone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .controller import Guidance, MppiController, MppiParams
from .geometry import FootprintSpec, ObstacleSet
from .kinematics import KinematicLimits, MotionModel, default_limits, to_twist

# indices of the translational channels per model
_LINEAR = {"diff": (0,), "ackermann": (0,), "omni": (0, 1), "parallel": (0,), "spin": ()}
_ANGULAR = {"diff": 1, "omni": 2, "spin": 0}


@dataclass(frozen=True)
class HybridParams:
    lambda_switch: float = 5.0
    tau_cool_max: int = 10
    v_min: float = 0.05
    omega_min: float = 0.05
    noise_deadzone_v: float = 0.01
    noise_deadzone_omega: float = 0.01

    def __post_init__(self):
        if self.lambda_switch < 0 or self.tau_cool_max < 0:
            raise ValueError("switch penalty and cooldown must be nonnegative")
        if not (0 <= self.noise_deadzone_v < self.v_min):
            raise ValueError("need 0 <= noise_deadzone_v < v_min")
        if not (0 <= self.noise_deadzone_omega < self.omega_min):
            raise ValueError("need 0 <= noise_deadzone_omega < omega_min")


@dataclass(frozen=True)
class ModeSpec:
    name: str
    model: MotionModel
    limits: KinematicLimits | None = None

    def resolved_limits(self) -> KinematicLimits:
        return self.limits if self.limits is not None else default_limits(self.model.kind)


def project_to_mode(u_raw, mode: MotionModel, source: MotionModel | None = None) -> np.ndarray:
    """Map a command onto ``mode``'s control layout.

    ``u_raw`` is a body twist ``(v_x, v_y, omega)`` unless ``source`` names the
    model it was expressed in. Components the mode cannot realise are dropped.
    """
    u_raw = np.asarray(u_raw, dtype=float)
    if source is not None:
        if source == mode:
            return u_raw.copy()
        u_raw = to_twist(source, u_raw)
    if u_raw.shape[-1] == 2:  # (v, omega) shorthand
        u_raw = np.array([u_raw[0], 0.0, u_raw[1]])
    vx, vy, w = u_raw
    k = mode.kind
    if k == "diff":
        return np.array([vx, w])
    if k == "ackermann":
        delta = math.atan(w * mode.wheelbase / vx) if abs(vx) > 1e-9 else 0.0
        return np.array([vx, delta])
    if k == "omni":
        return np.array([vx, vy, w])
    if k == "spin":
        return np.array([w])
    return np.array([vy])


def deadzone_correct(u, mode: MotionModel, params: HybridParams) -> np.ndarray:
    u = np.array(u, dtype=float)
    lin = _LINEAR[mode.kind]
    mag = float(np.linalg.norm(u[list(lin)])) if lin else 0.0
    if lin and mag > params.noise_deadzone_v:
        if mag < params.v_min * (1 - 1e-12):
            u[list(lin)] *= params.v_min / mag
        return u
    ang = _ANGULAR.get(mode.kind)
    if ang is not None:
        w = abs(u[ang])
        if params.noise_deadzone_omega < w < params.omega_min * (1 - 1e-12):
            u[ang] = math.copysign(params.omega_min, u[ang])
    return u


def select_mode(costs, m_prev: int, tau_cool: int, params: HybridParams):
    """Penalised argmin with cooldown.

    ``costs`` holds J_m, with ``inf`` for modes that failed validation.
    Returns ``(m_star, tau_next, feasible)``; when nothing is feasible the
    previous mode and counter are kept.
    """
    costs = np.asarray(costs, dtype=float)
    penalised = costs + params.lambda_switch * (np.arange(len(costs)) != m_prev)
    penalised[~np.isfinite(costs)] = np.inf
    if not np.any(np.isfinite(penalised)):
        return m_prev, tau_cool, False
    best = float(np.min(penalised))
    m_star = m_prev if penalised[m_prev] == best else int(np.flatnonzero(penalised == best)[0])
    if tau_cool > 0 and m_star != m_prev:
        m_star = m_prev
    tau_next = params.tau_cool_max if m_star != m_prev else max(tau_cool - 1, 0)
    return m_star, tau_next, True


@dataclass
class HybridDecision:
    command: np.ndarray
    mode: int
    mode_name: str
    feasible: bool
    switch_costs: np.ndarray
    diagnostics: dict = field(default_factory=dict)


class HybridController:
    """Holds per-mode controllers, the active mode and the cooldown counter."""

    def __init__(
        self,
        modes: list[ModeSpec],
        footprint: FootprintSpec,
        mppi: MppiParams,
        params: HybridParams = HybridParams(),
        initial_mode: int = 0,
    ):
        if not modes:
            raise ValueError("hybrid controller needs at least one mode")
        self.modes = list(modes)
        self.params = params
        self.controllers = [
            MppiController(m.model, footprint, m.resolved_limits(), mppi, stream=i)
            for i, m in enumerate(self.modes)
        ]
        self.m_prev = int(initial_mode)
        self.tau_cool = 0

    @property
    def nominals(self) -> dict[str, np.ndarray]:
        return {m.name: c.nominal for m, c in zip(self.modes, self.controllers)}

    def step(self, q0, obstacles: ObstacleSet, guidance: Guidance) -> HybridDecision:
        return hybrid_cycle(self, q0, obstacles, guidance)


def hybrid_cycle(state: HybridController, q0, obstacles: ObstacleSet, guidance: Guidance) -> HybridDecision:
    decisions = [c.step(q0, obstacles, guidance) for c in state.controllers]
    costs = np.array(
        [d.diagnostics["nominal_cost"] if d.validated else math.inf for d in decisions]
    )
    m_star, tau_next, feasible = select_mode(costs, state.m_prev, state.tau_cool, state.params)
    penalised = costs + state.params.lambda_switch * (np.arange(len(costs)) != state.m_prev)
    mode = state.modes[m_star].model
    if feasible:
        u = project_to_mode(decisions[m_star].command, mode, source=mode)
        u = deadzone_correct(u, mode, state.params)
    else:
        u = mode.zero()
    # keep every mode's rate limiter consistent with the body velocity actually commanded
    twist = to_twist(mode, u)
    for spec, ctrl in zip(state.modes, state.controllers):
        ctrl.u_prev = u.copy() if spec.model == mode else project_to_mode(twist, spec.model)
    state.m_prev, state.tau_cool = m_star, tau_next
    return HybridDecision(
        u, m_star, state.modes[m_star].name, feasible, penalised,
        {
            "validated": [d.validated for d in decisions],
            "costs": costs,
            "d0": float(decisions[m_star].diagnostics["nominal_d_min"][0]),
        },
    )

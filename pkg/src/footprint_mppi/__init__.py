"""Sampling-based local planning with exact concave footprints.

Modules: ``geometry`` (footprints and signed distance), ``kernels`` (batched
numba evaluators), ``kinematics``, ``controller`` (MPPI), ``hybrid`` (mode
selection), ``world``/``scenario``/``generators`` (simulation harness),
``bench`` and ``cli``.
"""
from .controller import Guidance, MppiController, MppiParams, control_cycle
from .geometry import (
    FootprintSpec,
    ObstacleSet,
    PolygonFootprint,
    RectangleCover,
    fixture_footprint,
    hull_footprint,
    load_footprint,
    min_signed_distance,
    polygon_footprint,
    rect_footprint,
    sd_polygon,
    sd_rect_cover,
)
from .hybrid import HybridController, HybridParams, ModeSpec, hybrid_cycle, select_mode
from .kinematics import KinematicLimits, MotionModel, rollout, step
from .scenario import Scenario, ScenarioError, load_scenario
from .world import EpisodeResult, compute_don, run_episode

__version__ = "0.1.0"

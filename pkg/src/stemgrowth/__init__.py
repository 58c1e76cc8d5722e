"""Growth of plant stems and vines around rigid obstacles."""

from .geom import QuadratureGrid, cumulative_trapezoid, rodrigues, rotate, trapezoid
from .obstacle import HalfSpace, ObstacleSet, SensingParams, Sphere, signed_distance
from .stem import ElongationLaw, StemState, make_state, straight_state
from .growth import GrowthParams, apply_growth_step, growth_rotation_field, psi_kernel
from .pushout import (BreakdownProximityError, ContactMeasure, EnergyWeights,
                      PushNonConvergenceError, apply_rotation_field, deformation_energy,
                      push_out, single_point_field, single_point_multiplier,
                      weighted_push_out)
from .contact import cone_membership_residual, measure_representation_field
from .volterra import recover_field_from_displacement
from .breakdown import BreakdownReport, check_breakdown
from .sim import ConfigError, FrameLog, RunOutcome, SimConfig, integral_residual, run, step
from .config import config_from_dict, config_to_dict, parse_config, preset, serialize_config
from .output import read_frames, render_svg, write_frames
from .analysis import wrap_angle

__all__ = [
    "QuadratureGrid", "cumulative_trapezoid", "rodrigues", "rotate", "trapezoid",
    "HalfSpace", "ObstacleSet", "SensingParams", "Sphere", "signed_distance",
    "ElongationLaw", "StemState", "make_state", "straight_state",
    "GrowthParams", "apply_growth_step", "growth_rotation_field", "psi_kernel",
    "BreakdownProximityError", "ContactMeasure", "EnergyWeights", "PushNonConvergenceError",
    "apply_rotation_field", "deformation_energy", "push_out", "single_point_field",
    "single_point_multiplier", "weighted_push_out",
    "cone_membership_residual", "measure_representation_field",
    "recover_field_from_displacement", "BreakdownReport", "check_breakdown",
    "ConfigError", "FrameLog", "RunOutcome", "SimConfig", "integral_residual", "run", "step",
    "config_from_dict", "config_to_dict", "parse_config", "preset", "serialize_config",
    "read_frames", "render_svg", "write_frames", "wrap_angle",
]

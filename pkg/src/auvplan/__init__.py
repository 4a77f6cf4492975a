"""Battery-aware AUV mission planning: firefly-optimized routes over a waypoint
graph and kinematically constrained B-spline paths through an ocean current."""

from .current import CurrentField, CurrentSample, Vortex, generate_field, sample_velocity, vortex_velocity
from .foa import FoaParams, OptimizeResult, anneal_alpha, attraction_step, firefly_distance, optimize
from .graph import OperationGraph, edge_length, expected_edge_time, generate_network
from .localpath import KinematicLimits, LocalPath, evaluate_spline, kinematic_states, path_cost, plan_path
from .mission import MissionConfig, MissionLog, mission_cost, run_mission
from .routing import NoFeasibleRoute, Route, RouteBudget, decode_route, plan_route, route_cost, route_time
from .units import KNOT, knots

__version__ = "0.1.0"

__all__ = [
    "CurrentField", "CurrentSample", "Vortex", "generate_field", "sample_velocity", "vortex_velocity",
    "FoaParams", "OptimizeResult", "anneal_alpha", "attraction_step", "firefly_distance", "optimize",
    "OperationGraph", "edge_length", "expected_edge_time", "generate_network",
    "KinematicLimits", "LocalPath", "evaluate_spline", "kinematic_states", "path_cost", "plan_path",
    "MissionConfig", "MissionLog", "mission_cost", "run_mission",
    "NoFeasibleRoute", "Route", "RouteBudget", "decode_route", "plan_route", "route_cost", "route_time",
    "KNOT", "knots",
]

# src/behaviormap/__init__.py

"""Behavior maps of simulated users over the (gamma, p) trait square."""

__version__ = "0.1.0"

from .atlas_engine import (
    BehaviorMap,
    EquivalenceSignature,
    GridSpec,
    check_equivalent,
    compute_behavior_map,
    edge_switch_counts,
    interior_topology_report,
    signature,
)
from .behavior import classify_behavior
from .intervention_engine import InterventionPath, path_crossings, transfer_strategy
from .perception import UserTraits, build_user_mdp
from .planner import extract_policy, value_iteration
from .sweep_engine import composition_experiment, perturbation_sweep
from .world_zoo import World, WorldParams, make_world

__all__ = [
    "BehaviorMap",
    "EquivalenceSignature",
    "GridSpec",
    "InterventionPath",
    "UserTraits",
    "World",
    "WorldParams",
    "build_user_mdp",
    "check_equivalent",
    "classify_behavior",
    "composition_experiment",
    "compute_behavior_map",
    "edge_switch_counts",
    "extract_policy",
    "interior_topology_report",
    "make_world",
    "path_crossings",
    "perturbation_sweep",
    "signature",
    "transfer_strategy",
    "value_iteration",
]

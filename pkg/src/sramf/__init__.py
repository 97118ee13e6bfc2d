"""Vehicle selection and ride-pooling assignment for mixed fleets under demand uncertainty."""

from ._backend import BACKEND
from .fixtures import nonsubmodular_example
from .generator import GenConfig, clique_diagnostics, demand_supply_ratio, gen_instance
from .lslpr import LSOptions, RunResult, run_lslpr
from .mmo import MMOOptions, run_mmo, run_mmo_partition
from .model import (Hyperedge, Instance, Request, Scenario, TravelModel, Vehicle, dump_instance, load_instance,
                    validate_instance)
from .packing import Evaluator, exact_packing, greedy_packing, solve_fractional, vhat, vstar
from .sharegraph import GraphOptions, ShareabilityGraph, brute_force_graph, build_graph, min_cost_route
from .verify import check_sandwich, decomposition_mapping, optimality_gap, saa_sample_size

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "nonsubmodular_example", "GenConfig", "clique_diagnostics", "demand_supply_ratio", "gen_instance",
    "LSOptions", "RunResult", "run_lslpr", "MMOOptions", "run_mmo", "run_mmo_partition", "Hyperedge", "Instance",
    "Request", "Scenario", "TravelModel", "Vehicle", "dump_instance", "load_instance", "validate_instance",
    "Evaluator", "exact_packing", "greedy_packing", "solve_fractional", "vhat", "vstar", "GraphOptions",
    "ShareabilityGraph", "brute_force_graph", "build_graph", "min_cost_route", "check_sandwich",
    "decomposition_mapping", "optimality_gap", "saa_sample_size",
]

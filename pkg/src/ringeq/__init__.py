"""Equilibrium uniqueness for nonatomic routing games on rings."""

from .catalog import (
    CatalogMatch,
    enumerate_maximal_uniqueness,
    enumerate_minimal_obstructions,
    match_catalog,
)
from .counterexamples import (
    Counterexample,
    build_counterexample,
    build_three_class,
    extend_many_od,
    k4_fixture,
    merge_two_class,
    subdivide_lift,
)
from .coverage import (
    CoverageReport,
    GeneralGraph,
    ScanResult,
    Verdict,
    naive_max_coverage,
    round_trip_scan,
    scan_cycle_obstructions,
    strong_uniqueness,
    uniqueness_verdict,
)
from .errors import RingEqError, ValidationError
from .game import (
    ClassSpec,
    CostFunction,
    EquilibriumReport,
    GameInstance,
    StrategyProfile,
    best_response_dynamics,
    distinct_flow_clusters,
    flows,
    grid_equilibrium_search,
    verify_equilibrium,
)
from .io import parse_instance, render
from .mixed import MixedGraph, canonical_form, is_homeo_minor
from .ring import NEG, POS, Arc, RingInstance, arc_partition, build_ring_instance

__all__ = [
    "Arc",
    "CatalogMatch",
    "ClassSpec",
    "CostFunction",
    "Counterexample",
    "CoverageReport",
    "EquilibriumReport",
    "GameInstance",
    "GeneralGraph",
    "MixedGraph",
    "NEG",
    "POS",
    "RingEqError",
    "RingInstance",
    "ScanResult",
    "StrategyProfile",
    "ValidationError",
    "Verdict",
    "arc_partition",
    "best_response_dynamics",
    "build_counterexample",
    "build_ring_instance",
    "build_three_class",
    "canonical_form",
    "distinct_flow_clusters",
    "enumerate_maximal_uniqueness",
    "enumerate_minimal_obstructions",
    "extend_many_od",
    "flows",
    "grid_equilibrium_search",
    "is_homeo_minor",
    "k4_fixture",
    "match_catalog",
    "merge_two_class",
    "naive_max_coverage",
    "parse_instance",
    "render",
    "round_trip_scan",
    "scan_cycle_obstructions",
    "strong_uniqueness",
    "subdivide_lift",
    "uniqueness_verdict",
    "verify_equilibrium",
]

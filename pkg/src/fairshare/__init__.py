"""Cost allocation for last-mile shared rides.

Exact Shapley values over coalition cost tables, a polynomial closed form
for prioritized drop-off orders (with a routing-game variant), three
proportional baseline proxies, and a seeded benchmark harness comparing them
all against the exact values.
"""

from .cost_model import (
    GIVEN_ORDER,
    NON_PRIORITIZED,
    OPTIMAL_ORDER,
    PRIORITIZED,
    ROUTING_NON_PRIORITIZED,
    ROUTING_PRIORITIZED,
    CoalitionCostTable,
    RideInstance,
    build_cost_table,
    chain_cost,
    coalition_members,
    optimal_open_path_cost,
)
from .errors import CapacityError, FairshareError, GraphParseError, ValidationError
from .eval_harness import (
    ExperimentConfig,
    ExperimentReport,
    MetricRecord,
    instance_with_optimal_order,
    metrics,
    optimal_visit_order,
    run_experiment,
    sample_instance,
)
from .exact_shapley import Allocation, shapley_by_permutations, shapley_exact
from .proxies import depot_distance, rerouted_margin, shortcut_distance
from .road_graph import (
    LAST_MILE,
    ROUTING_GAME,
    DistanceMatrix,
    RoadGraph,
    build_distance_matrix,
    crop_to_nearest,
    dump_graph,
    load_graph,
    read_graph,
    shortest_distances,
)
from .rules import RULE_IDS, exact_allocation, rule_function
from .shapo import (
    beta,
    beta_fraction,
    chain_neighbors,
    marginal_via_neighbors,
    pair_coefficient_counts,
    shapo_allocate,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "CapacityError",
    "CoalitionCostTable",
    "DistanceMatrix",
    "ExperimentConfig",
    "ExperimentReport",
    "FairshareError",
    "GIVEN_ORDER",
    "GraphParseError",
    "LAST_MILE",
    "MetricRecord",
    "NON_PRIORITIZED",
    "OPTIMAL_ORDER",
    "PRIORITIZED",
    "ROUTING_GAME",
    "ROUTING_NON_PRIORITIZED",
    "ROUTING_PRIORITIZED",
    "RULE_IDS",
    "RideInstance",
    "RoadGraph",
    "ValidationError",
    "beta",
    "beta_fraction",
    "build_cost_table",
    "build_distance_matrix",
    "chain_cost",
    "chain_neighbors",
    "coalition_members",
    "crop_to_nearest",
    "depot_distance",
    "dump_graph",
    "exact_allocation",
    "instance_with_optimal_order",
    "load_graph",
    "marginal_via_neighbors",
    "metrics",
    "optimal_open_path_cost",
    "optimal_visit_order",
    "pair_coefficient_counts",
    "read_graph",
    "rerouted_margin",
    "rule_function",
    "run_experiment",
    "sample_instance",
    "shapley_by_permutations",
    "shapley_exact",
    "shapo_allocate",
    "shortcut_distance",
    "shortest_distances",
    "__version__",
]

"""Laboratory for black-box local search on structured graphs.

Build graphs, generate hard instances (random walks, snake paths), run
zero-error solvers against counting oracles, and compute exact relational
lower-bound quantities.
"""

from .adversary import (AdversaryReport, DegenerateRelationError,
                        RelationSystem, build_relation_system,
                        permutation_inversion_system, progress_trace,
                        snake_relation_system, subgraph_prune, upsilon_bounds)
from .graphs import (Complete, Graph, GraphKind, Grid, Hypercube, Line,
                     build_graph, kind_from_json, kind_to_json)
from .harness import (ExperimentConfig, ExperimentReport, emit_report,
                      run_experiment, trial_rng)
from .instances import (BudgetExceededError, Instance, QueryOracle,
                        brute_force_minima, decision_wrap,
                        hitting_time_instance, is_local_min,
                        staircase_instance)
from .snakes import (FlickResult, Snake, delta_scan, flick_tail,
                     goodness_estimate, intersection_agreement, mixing_check,
                     sample_grid_snake, sample_hypercube_snake,
                     snake_instance, sparseness_check)
from .solvers import (SolverResult, line_binary_search, line_query_cap,
                      quantum_cost_model, random_sample_descent,
                      steepest_descent)

__version__ = "0.1.0"

__all__ = [
    "AdversaryReport", "BudgetExceededError", "Complete",
    "DegenerateRelationError", "ExperimentConfig", "ExperimentReport",
    "FlickResult", "Graph", "GraphKind", "Grid", "Hypercube", "Instance",
    "Line", "QueryOracle", "RelationSystem", "Snake", "SolverResult",
    "build_graph", "build_relation_system", "brute_force_minima",
    "decision_wrap", "delta_scan", "emit_report", "flick_tail",
    "goodness_estimate", "hitting_time_instance", "intersection_agreement",
    "is_local_min", "kind_from_json", "kind_to_json", "line_binary_search",
    "line_query_cap", "mixing_check", "permutation_inversion_system",
    "progress_trace", "quantum_cost_model", "random_sample_descent",
    "run_experiment", "sample_grid_snake", "sample_hypercube_snake",
    "snake_instance", "snake_relation_system", "sparseness_check",
    "staircase_instance", "steepest_descent", "subgraph_prune",
    "trial_rng", "upsilon_bounds",
]

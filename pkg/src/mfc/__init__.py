"""Learning-augmented metric MSTs by completing an initial forest.

Typical use::

    from mfc import MetricSpace, build_initial_forest, build_cost_curves
    from mfc import dp_allocate, materialize, multirep_mfc

    space = MetricSpace(points, "euclidean")
    forest = build_initial_forest(space)            # t = floor(sqrt(n))
    curves = build_cost_curves(space, forest, b)
    reps = materialize(curves, dp_allocate(curves, b).counts, b)
    tree = multirep_mfc(space, forest, reps)
"""

from .analysis import (
    BoundReport,
    TightInstance,
    alpha_bound,
    alpha_from_cost,
    brute_force_full_mst,
    ratios,
    tight_instance,
    tight_ratio,
)
from .completion import (
    CoarsenedGraph,
    CompletionResult,
    SpanningTreeError,
    coarsened_mst,
    complete,
    exact_coarsened,
    mfc_opt,
    multirep_coarsened,
    multirep_mfc,
)
from .datasets import DatasetSpec, ResultRow, load_dataset, read_results, synthetic_space, write_results
from .forest import (
    InitialForest,
    Partition,
    build_initial_forest,
    exact_component_mst,
    gamma_overlap,
    gonzalez_kcenter,
    truncated_kruskal_forest,
)
from .metric import ConfigurationError, MetricKind, MetricSpace, set_distance
from .reps import (
    CostCurves,
    RepAssignment,
    brute_force_bestreps,
    build_cost_curves,
    cost_of,
    dp_allocate,
    fixed_allocate,
    greedy_allocate,
    materialize,
)

__version__ = "0.1.0"

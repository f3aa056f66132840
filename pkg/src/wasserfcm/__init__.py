"""Outlier-weighted fuzzy c-means for vectors of triangular fuzzy numbers.

The package bundles the domain types and distance kernels, the Euclidean
reduction of the distance, two equivalent clustering engines with Keller
style outlier weights, and a seeded simulation harness with evaluation
metrics.  A command-line interface lives in :mod:`wasserfcm.cli`.
"""

from .clustering import (
    ENGINES,
    WEIGHT_FLOOR_SCALE,
    ClusterResult,
    DegenerateClusterError,
    MembershipMatrix,
    RunConfig,
    WeightVector,
    initialize,
    objective,
    run,
    update_memberships,
    update_prototypes_approach1,
    update_prototypes_approach2,
    update_weights,
)
from .fuzzy import (
    FuzzyVector,
    Interval,
    TriangularFuzzyNumber,
    alpha_cut,
    interval_wasserstein_sq,
    tran_duckstein_sq,
    tri_wasserstein_sq,
    tri_wasserstein_sq_oracle,
    vector_distance_sq,
    yang_ko_sq,
)
from .simulate import (
    CASES,
    THRESHOLDS,
    EvalReport,
    LabeledDataset,
    ScenarioResult,
    ScenarioSpec,
    evaluate_classification,
    evaluate_mse,
    generate,
    generate_clean,
    generate_outliers,
    ideal_prototypes,
    outlier_stats,
    replication_seeds,
    run_scenario,
    run_scenario_grid,
)
from .transform import (
    ANALYTIC_EIGENVALUES,
    DISTANCE_FORM,
    QuadraticForm3,
    build_transform,
    inverse_transform_array,
    inverse_transform_vector,
    transform_array,
    transform_vector,
)

__version__ = "0.1.0"

__all__ = [
    "ANALYTIC_EIGENVALUES",
    "CASES",
    "DISTANCE_FORM",
    "ENGINES",
    "THRESHOLDS",
    "WEIGHT_FLOOR_SCALE",
    "ClusterResult",
    "DegenerateClusterError",
    "EvalReport",
    "FuzzyVector",
    "Interval",
    "LabeledDataset",
    "MembershipMatrix",
    "QuadraticForm3",
    "RunConfig",
    "ScenarioResult",
    "ScenarioSpec",
    "TriangularFuzzyNumber",
    "WeightVector",
    "alpha_cut",
    "build_transform",
    "evaluate_classification",
    "evaluate_mse",
    "generate",
    "generate_clean",
    "generate_outliers",
    "ideal_prototypes",
    "initialize",
    "interval_wasserstein_sq",
    "inverse_transform_array",
    "inverse_transform_vector",
    "objective",
    "outlier_stats",
    "replication_seeds",
    "run",
    "run_scenario",
    "run_scenario_grid",
    "tran_duckstein_sq",
    "transform_array",
    "transform_vector",
    "tri_wasserstein_sq",
    "tri_wasserstein_sq_oracle",
    "update_memberships",
    "update_prototypes_approach1",
    "update_prototypes_approach2",
    "update_weights",
    "vector_distance_sq",
    "yang_ko_sq",
]

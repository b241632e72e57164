"""
Inference Module

Classical neighbourhoods, exact inference in the smoothed k-NN and spanning
tree models, permutation-null calculus, limiting divergences and baseline
statistics.
"""

from .classical import (
    NeighbourhoodKind,
    NeighbourhoodSet,
    UnionFind,
    cross_count,
    knn_edges,
    mst_kruskal,
)
from .permutation import (
    Alternative,
    permutation_null,
    permutation_pvalue,
    pvalue_from_null,
    sample_labellings,
)
from .marginals import MarginalVector
from .cardinality import (
    CardinalityModel,
    batch_cardinality_marginals,
    cardinality_marginals,
    knn_marginals,
    knn_marginals_vjp,
    smooth_knn_backward,
    smooth_knn_statistic,
)
from .spanning_tree import (
    GroundedLaplacian,
    is_hard_regime,
    minimum_swap_gap,
    approx_marginals_jl,
    jl_projection_dim,
    smooth_fr_backward,
    smooth_fr_statistic,
    st_marginals,
    st_marginals_vjp,
    st_pair_moment,
    st_pair_moment_matrix,
)
from .null_moments import (
    NormalityTerms,
    NullMoments,
    chi_terms,
    normal_pvalue,
    normality_terms,
    null_mean,
    null_moments,
    null_variance_fast,
    null_variance_gradient,
    null_variance_quadratic,
    pi_entry,
    symmetrized_weights,
    t_statistic,
    t_statistic_cotangent,
)
from .divergences import DivergenceKind, divergence_limit_1d, f_divergence_1d, f_generator
from .baselines import (
    KernelConfig,
    bandwidth_from_gamma,
    energy_from_distances,
    energy_statistic,
    lower_median,
    median_heuristic,
    mmd_from_kernel,
    mmd_unbiased,
)

__all__ = [
    "NeighbourhoodKind",
    "NeighbourhoodSet",
    "UnionFind",
    "cross_count",
    "knn_edges",
    "mst_kruskal",
    "Alternative",
    "permutation_null",
    "permutation_pvalue",
    "pvalue_from_null",
    "sample_labellings",
    "MarginalVector",
    "CardinalityModel",
    "batch_cardinality_marginals",
    "cardinality_marginals",
    "knn_marginals",
    "knn_marginals_vjp",
    "smooth_knn_backward",
    "smooth_knn_statistic",
    "GroundedLaplacian",
    "is_hard_regime",
    "minimum_swap_gap",
    "approx_marginals_jl",
    "jl_projection_dim",
    "smooth_fr_backward",
    "smooth_fr_statistic",
    "st_marginals",
    "st_marginals_vjp",
    "st_pair_moment",
    "st_pair_moment_matrix",
    "NormalityTerms",
    "NullMoments",
    "chi_terms",
    "normal_pvalue",
    "normality_terms",
    "null_mean",
    "null_moments",
    "null_variance_fast",
    "null_variance_gradient",
    "null_variance_quadratic",
    "pi_entry",
    "symmetrized_weights",
    "t_statistic",
    "t_statistic_cotangent",
    "DivergenceKind",
    "divergence_limit_1d",
    "f_divergence_1d",
    "f_generator",
    "KernelConfig",
    "bandwidth_from_gamma",
    "energy_from_distances",
    "energy_statistic",
    "lower_median",
    "median_heuristic",
    "mmd_from_kernel",
    "mmd_unbiased",
]

"""Robust graph structure learning for heterophilic attributed graphs.

Pipeline: high-pass filter the node features with the normalized Laplacian,
build a noise-adaptive pairwise distance matrix, optimize a dense candidate
graph under a contrastive regularizer with adaptively re-thresholded
positive pairs, and hand the symmetrized result to spectral clustering or
label propagation.
"""

from .distances import (
    ALPHA_SEARCH_GRID,
    DistanceMatrix,
    alpha_norm,
    pairwise_distance_matrix,
    squared_distance_matrix,
)
from .downstream import (
    AffinitySpectralClustering,
    ClassifierOutput,
    ClusterAssignment,
    ConsistencyClassifier,
    lgc_classify,
    propagate_scores,
    spectral_clustering,
)
from .evaluation import (
    GAMMA_GRID,
    SplitSpec,
    classification_accuracy,
    clustering_accuracy,
    dense_split,
    macro_f1,
    nmi,
    perturb_edges,
    select_gamma,
)
from .filtering import FilteredFeatures, high_pass_filter
from .graph import (
    DiagnosticsReport,
    Graph,
    build_graph,
    dirichlet_energy,
    homophily,
    normalized_laplacian,
    outlier_energy_ratio,
    sparsity,
)
from .learner import (
    VARIANTS,
    AdamOptimizer,
    LearnConfig,
    LearnedGraph,
    PositiveMask,
    RobustGraphLearner,
    contrastive_regularizer,
    init_candidate_graph,
    learn_graph,
    learn_graph_frobenius,
    learn_graph_knn_positives,
    nearest_neighbor_mask,
    objective_gradient,
    project_to_simplex,
    symmetrize,
    total_objective,
    update_positive_mask,
)
from .datasets import (
    PRESETS,
    DatasetError,
    load_affinity,
    load_dataset,
    preset_for,
    save_affinity,
    save_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_SEARCH_GRID",
    "AdamOptimizer",
    "AffinitySpectralClustering",
    "ClassifierOutput",
    "ClusterAssignment",
    "ConsistencyClassifier",
    "DatasetError",
    "DiagnosticsReport",
    "DistanceMatrix",
    "FilteredFeatures",
    "GAMMA_GRID",
    "Graph",
    "LearnConfig",
    "LearnedGraph",
    "PRESETS",
    "PositiveMask",
    "RobustGraphLearner",
    "SplitSpec",
    "VARIANTS",
    "alpha_norm",
    "build_graph",
    "classification_accuracy",
    "clustering_accuracy",
    "contrastive_regularizer",
    "dense_split",
    "dirichlet_energy",
    "high_pass_filter",
    "homophily",
    "init_candidate_graph",
    "learn_graph",
    "learn_graph_frobenius",
    "learn_graph_knn_positives",
    "lgc_classify",
    "load_affinity",
    "load_dataset",
    "macro_f1",
    "nearest_neighbor_mask",
    "nmi",
    "normalized_laplacian",
    "objective_gradient",
    "outlier_energy_ratio",
    "pairwise_distance_matrix",
    "perturb_edges",
    "preset_for",
    "project_to_simplex",
    "propagate_scores",
    "save_affinity",
    "save_dataset",
    "select_gamma",
    "sparsity",
    "spectral_clustering",
    "squared_distance_matrix",
    "symmetrize",
    "total_objective",
    "update_positive_mask",
]

"""Noise-adaptive distance between filtered feature rows.

The adaptive norm g(alpha) = (1 + alpha) * ||u - v||_2^2 / (||u - v||_2 + alpha)
interpolates between the plain Euclidean distance (alpha -> 0, robust to
large noise) and its square (alpha -> infinity, sensitive to small noise).
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ._validation import as_float_matrix

# reference search grid for the alpha hyperparameter
ALPHA_SEARCH_GRID = (0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0)


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative pairwise distances with zero diagonal."""

    values: np.ndarray
    alpha: float


def adaptive_norm_from_euclidean(norms, alpha):
    """Apply the adaptive transform to precomputed Euclidean distances."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    norms = np.asarray(norms, dtype=float)
    return (1.0 + alpha) * norms**2 / (norms + alpha)


def alpha_norm(u, v, alpha):
    """Adaptive distance between two vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(adaptive_norm_from_euclidean(np.linalg.norm(u - v), alpha))


def pairwise_distance_matrix(S, alpha):
    """Adaptive distances between all row pairs of S.

    Accepts a FilteredFeatures or a plain matrix. The full dense matrix is
    precomputed once; it is constant during graph optimization.
    """
    S = getattr(S, "S", S)
    S = as_float_matrix(S, "S")
    euclid = squareform(pdist(S))
    values = adaptive_norm_from_euclidean(euclid, alpha)
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(values=values, alpha=float(alpha))


def squared_distance_matrix(S):
    """Plain squared-Euclidean pairwise distances (the fixed p=2 variant)."""
    S = getattr(S, "S", S)
    S = as_float_matrix(S, "S")
    euclid = squareform(pdist(S))
    values = euclid**2
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(values=values, alpha=float("inf"))

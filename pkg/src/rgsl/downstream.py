"""Consumers of the learned affinity: clustering and label propagation.

Spectral clustering follows the classic normalized-Laplacian recipe: take
the eigenvectors of the c smallest eigenvalues, normalize the rows, and run
k-means with multiple restarts. Classification solves the local-and-global
consistency problem in closed form with one symmetric positive-definite
linear solve.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, ClassifierMixin, ClusterMixin
from sklearn.cluster import KMeans

from ._validation import as_square_matrix, check_labels, check_symmetric

DEGREE_FLOOR = 1e-12


@dataclass(frozen=True)
class ClusterAssignment:
    """k-means output on the spectral embedding."""

    labels: np.ndarray
    c: int
    inertia: float
    seed: int


@dataclass(frozen=True)
class ClassifierOutput:
    """Score matrix of the consistency solve plus argmax predictions."""

    scores: np.ndarray
    predictions: np.ndarray
    gamma: float


def _affinity_laplacian(C, isolated_diag):
    """Symmetric normalized Laplacian of a weighted affinity matrix.

    The diagonal of C is ignored (self-loop-free degrees). Isolated nodes
    get diagonal value `isolated_diag`: 1 keeps them as their own trivial
    frequency for the clustering embedding, 0 makes an edgeless graph yield
    the zero Laplacian for the propagation solve.
    """
    W = as_square_matrix(C, "affinity").copy()
    np.fill_diagonal(W, 0.0)
    deg = W.sum(axis=1)
    isolated = deg <= 0
    inv_sqrt = 1.0 / np.sqrt(np.maximum(deg, DEGREE_FLOOR))
    L = -W * np.outer(inv_sqrt, inv_sqrt)
    L[np.diag_indices(W.shape[0])] += np.where(isolated, isolated_diag, 1.0)
    return L


def spectral_clustering(C, c, seed=0, n_restarts=20, max_iter=300, tol=1e-6):
    """Partition the nodes of a learned affinity into c clusters.

    Builds the normalized Laplacian of C, embeds each node with the c
    smallest-eigenvalue eigenvectors, row-normalizes the embedding, then
    keeps the best of n_restarts k-means++ runs.
    """
    C = check_symmetric(C, "affinity", tol=1e-8)
    n = C.shape[0]
    if not 2 <= c <= n:
        raise ValueError(f"cluster count must satisfy 2 <= c <= n={n}, got {c}")
    W = C.copy()
    np.fill_diagonal(W, 0.0)
    if not np.all(W >= 0):
        raise ValueError("affinity must be nonnegative")
    if np.all(W == 0):
        raise ValueError(
            "affinity has no off-diagonal weight: every node is isolated, "
            "nothing to cluster"
        )

    L = _affinity_laplacian(C, isolated_diag=1.0)
    _, vectors = scipy.linalg.eigh(L, subset_by_index=[0, c - 1])
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    embedding = np.divide(vectors, norms, out=vectors.copy(), where=norms > 0)

    km = KMeans(
        n_clusters=c,
        init="k-means++",
        n_init=n_restarts,
        max_iter=max_iter,
        tol=tol,
        random_state=seed,
    ).fit(embedding)
    return ClusterAssignment(
        labels=km.labels_.astype(int), c=c, inertia=float(km.inertia_), seed=seed
    )


def propagate_scores(C, label_matrix, gamma, add_self_loop=False):
    """Solve (L' + gamma I) M = gamma B for the consistency scores M.

    L' is the normalized Laplacian of the affinity (zero rows for isolated
    nodes, so an edgeless affinity returns B unchanged). The system is
    symmetric positive definite for any gamma > 0.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    C = check_symmetric(C, "affinity", tol=1e-8)
    n = C.shape[0]
    label_matrix = np.asarray(label_matrix, dtype=float)
    if label_matrix.shape[0] != n:
        raise ValueError(f"label matrix must have {n} rows")
    if add_self_loop:
        # unit self-loop folded into the degrees, as for the input-graph
        # Laplacian; an edgeless affinity still yields the zero Laplacian
        W = C.copy()
        np.fill_diagonal(W, 0.0)
        W += np.eye(n)
        inv_sqrt = 1.0 / np.sqrt(W.sum(axis=1))
        L = np.eye(n) - W * np.outer(inv_sqrt, inv_sqrt)
    else:
        L = _affinity_laplacian(C, isolated_diag=0.0)
    system = L + gamma * np.eye(n)
    factor = scipy.linalg.cho_factor(system)
    return gamma * scipy.linalg.cho_solve(factor, label_matrix)


def lgc_classify(C, labels, train_mask, gamma=0.1, add_self_loop=False):
    """Closed-form local-and-global consistency classification.

    Builds the one-hot label matrix (zero rows off the training set),
    propagates it, and takes the row argmax (lowest class id on ties).
    Rows that come back all-zero (possible only when their Laplacian row is
    zero and they carry no label) map to class 0 with a warning.
    """
    C = check_symmetric(C, "affinity", tol=1e-8)
    n = C.shape[0]
    labels = check_labels(labels, n)
    train_mask = np.asarray(train_mask, dtype=bool)
    if train_mask.shape != (n,):
        raise ValueError(f"train_mask must be a length-{n} boolean vector")
    if not train_mask.any():
        raise ValueError("train_mask selects no nodes")

    n_classes = int(labels.max()) + 1
    label_matrix = np.zeros((n, n_classes))
    label_matrix[train_mask, labels[train_mask]] = 1.0
    scores = propagate_scores(C, label_matrix, gamma, add_self_loop=add_self_loop)

    undetermined = ~np.any(scores != 0.0, axis=1)
    if undetermined.any():
        warnings.warn(
            f"{int(undetermined.sum())} node(s) received all-zero scores; "
            "assigning them class 0"
        )
    predictions = np.argmax(scores, axis=1)
    return ClassifierOutput(scores=scores, predictions=predictions, gamma=float(gamma))


class AffinitySpectralClustering(BaseEstimator, ClusterMixin):
    """Estimator form of spectral_clustering over precomputed affinities."""

    def __init__(self, n_clusters=2, random_state=0, n_restarts=20, max_iter=300, tol=1e-6):
        self.n_clusters = n_clusters
        self.random_state = random_state
        self.n_restarts = n_restarts
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y=None):
        assignment = spectral_clustering(
            X,
            self.n_clusters,
            seed=self.random_state,
            n_restarts=self.n_restarts,
            max_iter=self.max_iter,
            tol=self.tol,
        )
        self.assignment_ = assignment
        self.labels_ = assignment.labels
        self.inertia_ = assignment.inertia
        return self


class ConsistencyClassifier(BaseEstimator, ClassifierMixin):
    """Estimator form of lgc_classify.

    fit(X, y) takes the affinity and labels with -1 marking unlabeled
    nodes (the scikit-learn semi-supervised convention); transduction_
    holds the prediction for every node.
    """

    def __init__(self, gamma=0.1, add_self_loop=False):
        self.gamma = gamma
        self.add_self_loop = add_self_loop

    def fit(self, X, y):
        y = np.asarray(y, dtype=int)
        train_mask = y >= 0
        filled = np.where(train_mask, y, 0)
        output = lgc_classify(
            X, filled, train_mask, gamma=self.gamma, add_self_loop=self.add_self_loop
        )
        self.output_ = output
        self.scores_ = output.scores
        self.transduction_ = output.predictions
        return self

"""Learning a dense robust graph from filtered features.

The candidate graph starts from the filtered-feature Gram matrix and is
optimized with Adam under a linear distance-weighted cost plus a contrastive
regularizer whose positive pairs are re-thresholded from the candidate after
every epoch. The emitted graph is the symmetrized absolute candidate.

Two ablation solvers live here as well: the Frobenius-regularized variant
with per-row simplex constraints (closed form), and the variant whose
positive pairs come from a fixed nearest-neighbor mask.
"""

import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.spatial.distance import pdist, squareform
from sklearn.base import BaseEstimator

from ._validation import as_square_matrix
from .distances import (
    DistanceMatrix,
    pairwise_distance_matrix,
    squared_distance_matrix,
)
from .filtering import high_pass_filter
from .graph import normalized_laplacian

VARIANTS = ("rgsl", "rgsl-minus", "frobenius", "knn", "fixed-a")
GRADIENT_MODES = ("paper", "exact")


@dataclass
class LearnConfig:
    """Hyperparameters of the graph learning loop.

    gradient_mode "paper" zeroes the regularizer gradient outside the
    positive mask; "exact" uses the full analytic softmax derivative.
    distance "squared" swaps the adaptive norm for plain squared Euclidean
    distances (the fixed p=2 variant); positives "adjacency" freezes the
    mask to the input edges instead of re-thresholding each epoch.
    """

    k: int = 2
    alpha: float = 1.0
    beta: float = 1.0
    epsilon: float = 1e-3
    lr: float = 0.01
    max_epochs: int = 500
    tol: float = 1e-5
    seed: int = 0
    gradient_mode: str = "paper"
    distance: str = "adaptive"
    positives: str = "adaptive"
    mask_every: int = 1
    normalize_features: bool = False

    def validate(self):
        if self.k < 0 or int(self.k) != self.k:
            raise ValueError(f"filter order k must be a nonnegative integer, got {self.k!r}")
        if self.distance not in ("adaptive", "squared"):
            raise ValueError(f"unknown distance {self.distance!r}")
        if self.distance == "adaptive" and self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        if self.lr <= 0:
            raise ValueError(f"learning rate must be positive, got {self.lr}")
        if self.max_epochs < 0:
            raise ValueError(f"max_epochs must be nonnegative, got {self.max_epochs}")
        if self.tol < 0:
            raise ValueError(f"tol must be nonnegative, got {self.tol}")
        if self.gradient_mode not in GRADIENT_MODES:
            raise ValueError(f"gradient_mode must be one of {GRADIENT_MODES}")
        if self.positives not in ("adaptive", "adjacency"):
            raise ValueError(f"unknown positives {self.positives!r}")
        if self.mask_every < 1:
            raise ValueError(f"mask_every must be >= 1, got {self.mask_every}")
        return self


@dataclass(frozen=True)
class PositiveMask:
    """Binary matrix marking pairs treated as positives, zero diagonal."""

    indicator: np.ndarray
    epsilon: float

    def edge_pairs(self):
        """Upper-triangle (i, j) pairs where the mask is set."""
        i, j = np.nonzero(np.triu(self.indicator, k=1))
        return np.column_stack([i, j])


@dataclass(frozen=True)
class LearnedGraph:
    """Optimization output: symmetric nonnegative affinity + trajectory.

    candidate is the raw optimized matrix before the absolute-value
    symmetrization.
    """

    affinity: np.ndarray
    loss_history: List[float]
    mask: PositiveMask
    candidate: np.ndarray


class AdamOptimizer:
    """Plain Adam with bias correction for one dense matrix parameter."""

    def __init__(self, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = None
        self.v = None

    def step(self, params, grad):
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)
        self.t += 1
        self.m *= self.beta1
        self.m += (1.0 - self.beta1) * grad
        self.v *= self.beta2
        self.v += (1.0 - self.beta2) * grad**2
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        np.sqrt(v_hat, out=v_hat)
        v_hat += self.eps
        m_hat /= v_hat
        m_hat *= self.lr
        return params - m_hat


def init_candidate_graph(S):
    """Initial candidate from the filtered-feature relationship S S^T."""
    S = getattr(S, "S", S)
    S = np.asarray(S, dtype=float)
    return S @ S.T


def update_positive_mask(candidate, epsilon):
    """Threshold (|G_ij| + |G_ji|) / 2 >= epsilon into a binary mask.

    The diagonal is always forced to zero: self-pairs carry no information
    for the contrastive term.
    """
    candidate = as_square_matrix(candidate, "candidate")
    magnitude = np.abs(candidate)
    magnitude = magnitude + magnitude.T  # halving both sides of the test is exact
    indicator = (magnitude >= 2.0 * epsilon).astype(float)
    np.fill_diagonal(indicator, 0.0)
    return PositiveMask(indicator=indicator, epsilon=float(epsilon))


def _row_softmax_parts(candidate):
    """Per-row log denominator and probabilities, self entry excluded.

    Uses a per-row max shift so the exponentials never overflow.
    """
    candidate = as_square_matrix(candidate, "candidate")
    if candidate.shape[0] < 2:
        raise ValueError("softmax over non-self entries needs at least 2 nodes")
    shifted = candidate.copy()
    np.fill_diagonal(shifted, -np.inf)
    row_max = shifted.max(axis=1)
    shifted -= row_max[:, None]
    np.exp(shifted, out=shifted)
    denom = shifted.sum(axis=1)
    log_denom = row_max + np.log(denom)
    shifted /= denom[:, None]
    return log_denom, shifted


def _regularizer_from_parts(candidate, mask, log_denom):
    counts = mask.indicator.sum(axis=1)
    return float(counts @ log_denom - np.einsum("ij,ij->", mask.indicator, candidate))


def _objective_from_parts(candidate, values, mask, beta, log_denom):
    linear = float(np.einsum("ij,ij->", values, candidate))
    if beta == 0:
        return linear
    return linear + beta * _regularizer_from_parts(candidate, mask, log_denom)


def _gradient_from_parts(values, mask, beta, probs, mode):
    # consumes probs as scratch space; callers recompute it each epoch
    grad = values.copy()
    if beta != 0:
        indicator = mask.indicator
        counts = indicator.sum(axis=1)
        pulled = probs
        pulled *= counts[:, None]
        if mode == "exact":
            pulled -= indicator
        else:
            pulled -= 1.0
            pulled *= indicator
        pulled *= beta
        grad += pulled
    np.fill_diagonal(grad, 0.0)
    return grad


def contrastive_regularizer(candidate, mask):
    """Sum over masked pairs of -log softmax(G_ij) within row i.

    The softmax denominator runs over all entries of row i except the
    diagonal one.
    """
    log_denom, _ = _row_softmax_parts(candidate)
    return _regularizer_from_parts(np.asarray(candidate, float), mask, log_denom)


def total_objective(candidate, dist, mask, beta):
    """<Dist, G> plus beta times the contrastive regularizer."""
    values = dist.values if isinstance(dist, DistanceMatrix) else np.asarray(dist, float)
    candidate = np.asarray(candidate, float)
    if beta == 0:
        return float(np.einsum("ij,ij->", values, candidate))
    log_denom, _ = _row_softmax_parts(candidate)
    return _objective_from_parts(candidate, values, mask, beta, log_denom)


def objective_gradient(candidate, dist, mask, beta, mode="paper"):
    """Gradient of the total objective with the mask held constant.

    "exact" is the analytic softmax derivative at every off-diagonal entry;
    "paper" keeps only the entries where the mask is set (the two agree
    there). The diagonal is forced to zero either way.
    """
    if mode not in GRADIENT_MODES:
        raise ValueError(f"mode must be one of {GRADIENT_MODES}, got {mode!r}")
    values = dist.values if isinstance(dist, DistanceMatrix) else np.asarray(dist, float)
    probs = _row_softmax_parts(candidate)[1] if beta != 0 else None
    return _gradient_from_parts(values, mask, beta, probs, mode)


def symmetrize(candidate):
    """Elementwise absolute value followed by the symmetric average."""
    candidate = as_square_matrix(candidate, "candidate")
    magnitude = np.abs(candidate)
    return 0.5 * (magnitude + magnitude.T)


def _filtered_and_distances(g, cfg):
    L = normalized_laplacian(g)
    filtered = high_pass_filter(g.features, L, cfg.k, normalize=cfg.normalize_features)
    if cfg.distance == "squared":
        dist = squared_distance_matrix(filtered)
    else:
        dist = pairwise_distance_matrix(filtered, cfg.alpha)
    return filtered, dist


def _descend(candidate, dist, mask, cfg, adaptive_mask):
    """Adam loop with per-epoch mask refresh and relative-change stopping.

    The stopping test runs before each step with the change initialized to
    infinity, so tol=inf performs zero optimization steps. The row softmax
    of the candidate is computed once per epoch and shared between the loss
    and the following gradient evaluation.
    """
    values = dist.values
    optimizer = AdamOptimizer(lr=cfg.lr)
    with_regularizer = cfg.beta != 0
    log_denom, probs = _row_softmax_parts(candidate) if with_regularizer else (None, None)
    loss = _objective_from_parts(candidate, values, mask, cfg.beta, log_denom)
    history = [loss]
    delta = math.inf
    for epoch in range(1, cfg.max_epochs + 1):
        if delta <= cfg.tol:
            break
        grad = _gradient_from_parts(values, mask, cfg.beta, probs, cfg.gradient_mode)
        candidate = optimizer.step(candidate, grad)
        if adaptive_mask and epoch % cfg.mask_every == 0:
            mask = update_positive_mask(candidate, cfg.epsilon)
        if with_regularizer:
            log_denom, probs = _row_softmax_parts(candidate)
        new_loss = _objective_from_parts(candidate, values, mask, cfg.beta, log_denom)
        if not (np.isfinite(new_loss) and np.all(np.isfinite(candidate))):
            raise FloatingPointError(
                f"objective became non-finite at epoch {epoch}; "
                "lower the learning rate or beta"
            )
        history.append(new_loss)
        delta = abs(new_loss - loss) / max(abs(loss), 1.0)
        loss = new_loss
    return LearnedGraph(
        affinity=symmetrize(candidate), loss_history=history, mask=mask, candidate=candidate
    )


def learn_graph(g, cfg):
    """Run the full pipeline: filter, distances, Adam loop, symmetrize.

    With positives="adjacency" the mask is frozen to the input edges for the
    whole run (one of the ablation variants); otherwise it is re-thresholded
    from the candidate every mask_every epochs.
    """
    cfg.validate()
    filtered, dist = _filtered_and_distances(g, cfg)
    candidate = init_candidate_graph(filtered)
    if cfg.positives == "adjacency":
        mask = PositiveMask(indicator=g.adjacency(), epsilon=float(cfg.epsilon))
        return _descend(candidate, dist, mask, cfg, adaptive_mask=False)
    mask = update_positive_mask(candidate, cfg.epsilon)
    return _descend(candidate, dist, mask, cfg, adaptive_mask=True)


def project_to_simplex(v):
    """Euclidean projection of a vector onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a nonempty vector")
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u)
    positions = np.arange(1, v.size + 1)
    rho = np.nonzero(u * positions > cumulative - 1.0)[0][-1]
    theta = (cumulative[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def learn_graph_frobenius(g, cfg):
    """Frobenius-regularized variant with per-row simplex constraints.

    min <Dist, G> + beta ||G||_F^2 with G_ij >= 0 and each row summing to 1
    has the closed-form row solution proj_simplex(-Dist_i / (2 beta)). The
    diagonal is excluded from each row's simplex: self-weight is meaningless
    downstream and would otherwise absorb all the mass (self-distance is 0).
    """
    cfg.validate()
    if cfg.beta <= 0:
        raise ValueError("the Frobenius variant needs beta > 0")
    _, dist = _filtered_and_distances(g, cfg)
    n = g.n
    if n < 2:
        raise ValueError("need at least 2 nodes")
    candidate = np.zeros((n, n))
    off = ~np.eye(n, dtype=bool)
    for i in range(n):
        row = -dist.values[i, off[i]] / (2.0 * cfg.beta)
        candidate[i, off[i]] = project_to_simplex(row)
    loss = float(np.sum(dist.values * candidate)) + cfg.beta * float(np.sum(candidate**2))
    mask = update_positive_mask(candidate, cfg.epsilon)
    return LearnedGraph(
        affinity=symmetrize(candidate), loss_history=[loss], mask=mask, candidate=candidate
    )


def nearest_neighbor_mask(S, K):
    """Row-wise mask of each node's K nearest rows in feature space.

    Euclidean distances, self excluded, ties broken toward the lower index.
    """
    S = getattr(S, "S", S)
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    if not 0 < K < n:
        raise ValueError(f"K must satisfy 0 < K < n={n}, got {K}")
    euclid = squareform(pdist(S))
    np.fill_diagonal(euclid, np.inf)
    order = np.argsort(euclid, axis=1, kind="stable")[:, :K]
    indicator = np.zeros((n, n))
    np.put_along_axis(indicator, order, 1.0, axis=1)
    return PositiveMask(indicator=indicator, epsilon=float("nan"))


def learn_graph_knn_positives(g, cfg, K=10):
    """Same loop as learn_graph but with a fixed nearest-neighbor mask."""
    cfg.validate()
    filtered, dist = _filtered_and_distances(g, cfg)
    mask = nearest_neighbor_mask(filtered, K)
    candidate = init_candidate_graph(filtered)
    return _descend(candidate, dist, mask, cfg, adaptive_mask=False)


class RobustGraphLearner(BaseEstimator):
    """Estimator interface over the graph learning variants.

    fit(graph) learns the affinity from a Graph; the result lands in
    affinity_ (dense symmetric nonnegative matrix), loss_history_ and
    positive_mask_. fit_transform returns the affinity, which plugs
    directly into anything accepting a precomputed affinity matrix.

    variant: "rgsl" (full model), "rgsl-minus" (squared distances),
    "frobenius" (closed-form ablation), "knn" (fixed neighbor positives),
    "fixed-a" (mask frozen to the input adjacency).
    """

    def __init__(
        self,
        k=2,
        alpha=1.0,
        beta=1.0,
        epsilon=1e-3,
        lr=0.01,
        max_epochs=500,
        tol=1e-5,
        seed=0,
        gradient_mode="paper",
        variant="rgsl",
        knn_k=10,
        mask_every=1,
        normalize_features=False,
    ):
        self.k = k
        self.alpha = alpha
        self.beta = beta
        self.epsilon = epsilon
        self.lr = lr
        self.max_epochs = max_epochs
        self.tol = tol
        self.seed = seed
        self.gradient_mode = gradient_mode
        self.variant = variant
        self.knn_k = knn_k
        self.mask_every = mask_every
        self.normalize_features = normalize_features

    def _config(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        return LearnConfig(
            k=self.k,
            alpha=self.alpha,
            beta=self.beta,
            epsilon=self.epsilon,
            lr=self.lr,
            max_epochs=self.max_epochs,
            tol=self.tol,
            seed=self.seed,
            gradient_mode=self.gradient_mode,
            distance="squared" if self.variant == "rgsl-minus" else "adaptive",
            positives="adjacency" if self.variant == "fixed-a" else "adaptive",
            mask_every=self.mask_every,
            normalize_features=self.normalize_features,
        )

    def fit(self, graph, y=None):
        cfg = self._config()
        if self.variant == "frobenius":
            result = learn_graph_frobenius(graph, cfg)
        elif self.variant == "knn":
            result = learn_graph_knn_positives(graph, cfg, K=self.knn_k)
        else:
            result = learn_graph(graph, cfg)
        self.result_ = result
        self.affinity_ = result.affinity
        self.loss_history_ = result.loss_history
        self.positive_mask_ = result.mask
        return self

    def fit_transform(self, graph, y=None):
        return self.fit(graph, y).affinity_

"""Clustering/classification metrics, dense splits, and edge noise.

Clustering accuracy and macro F1 first match cluster ids to class ids with
an optimal (Hungarian) assignment on the confusion matrix; NMI normalizes
mutual information by the arithmetic mean of the two entropies.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .downstream import lgc_classify
from .graph import Graph

GAMMA_GRID = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)


@dataclass(frozen=True)
class SplitSpec:
    """Disjoint train/val/test node index sets covering all nodes."""

    train: np.ndarray
    val: np.ndarray
    test: np.ndarray
    seed: int

    def masks(self, n):
        out = []
        for idx in (self.train, self.val, self.test):
            m = np.zeros(n, dtype=bool)
            m[idx] = True
            out.append(m)
        return tuple(out)


def _check_partitions(pred, truth):
    pred = np.asarray(pred, dtype=int)
    truth = np.asarray(truth, dtype=int)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError(
            f"prediction and truth must be equal-length vectors, "
            f"got {pred.shape} and {truth.shape}"
        )
    if pred.size == 0:
        raise ValueError("empty label vectors")
    return pred, truth


def _confusion(pred, truth):
    """Square contingency matrix indexed [class, cluster]."""
    size = int(max(pred.max(), truth.max())) + 1
    table = np.zeros((size, size), dtype=int)
    np.add.at(table, (truth, pred), 1)
    return table


def _best_cluster_to_class(pred, truth):
    """Optimal cluster-id -> class-id map via Hungarian assignment."""
    table = _confusion(pred, truth)
    rows, cols = linear_sum_assignment(-table)
    mapping = np.arange(table.shape[0])
    mapping[cols] = rows
    return mapping, table


def clustering_accuracy(pred, truth):
    """Best matched fraction over cluster-to-class bijections."""
    pred, truth = _check_partitions(pred, truth)
    mapping, table = _best_cluster_to_class(pred, truth)
    matched = table[mapping, np.arange(table.shape[0])].sum()
    return float(matched) / pred.size


def _entropy(counts):
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth):
    """Mutual information normalized by the mean of the two entropies.

    Two identical single-cluster partitions score 1.0; if either side has
    zero entropy while the partitions differ the score is 0.0.
    """
    pred, truth = _check_partitions(pred, truth)
    table = np.zeros((int(truth.max()) + 1, int(pred.max()) + 1), dtype=int)
    np.add.at(table, (truth, pred), 1)
    n = pred.size
    h_truth = _entropy(table.sum(axis=1).astype(float))
    h_pred = _entropy(table.sum(axis=0).astype(float))
    if h_truth == 0.0 and h_pred == 0.0:
        # both sides are a single cluster, i.e. the same partition
        return 1.0
    if h_truth == 0.0 or h_pred == 0.0:
        return 0.0
    joint = table / n
    outer = np.outer(table.sum(axis=1), table.sum(axis=0)) / n**2
    nonzero = joint > 0
    mutual = float((joint[nonzero] * np.log(joint[nonzero] / outer[nonzero])).sum())
    return mutual / (0.5 * (h_truth + h_pred))


def macro_f1(pred, truth):
    """Unweighted mean per-class F1 after the optimal cluster-to-class map.

    Classes of the ground truth that are never predicted contribute 0.
    """
    pred, truth = _check_partitions(pred, truth)
    mapping, _ = _best_cluster_to_class(pred, truth)
    mapped = mapping[pred]
    scores = []
    for cls in np.unique(truth):
        tp = np.sum((mapped == cls) & (truth == cls))
        predicted = np.sum(mapped == cls)
        actual = np.sum(truth == cls)
        if tp == 0:
            scores.append(0.0)
            continue
        precision = tp / predicted
        recall = tp / actual
        scores.append(2.0 * precision * recall / (precision + recall))
    return float(np.mean(scores))


def classification_accuracy(pred, truth, mask):
    """Matched fraction over the masked nodes."""
    pred = np.asarray(pred, dtype=int)
    truth = np.asarray(truth, dtype=int)
    mask = np.asarray(mask, dtype=bool)
    if not (pred.shape == truth.shape == mask.shape):
        raise ValueError("pred, truth and mask must share one shape")
    if not mask.any():
        raise ValueError("mask selects no nodes")
    return float(np.mean(pred[mask] == truth[mask]))


def select_gamma(affinity, labels, split, grid=GAMMA_GRID):
    """Pick the propagation trade-off by validation accuracy on one split.

    Ties go to the earliest grid value, so the choice is deterministic.
    """
    labels = np.asarray(labels, dtype=int)
    train, val, _ = split.masks(labels.shape[0])
    best_acc, best_gamma = -1.0, grid[0]
    for gamma in grid:
        out = lgc_classify(affinity, labels, train, gamma=gamma)
        acc = classification_accuracy(out.predictions, labels, val)
        if acc > best_acc:
            best_acc, best_gamma = acc, gamma
    return best_gamma


def dense_split(labels, seed, fractions=(0.6, 0.2, 0.2)):
    """Random permutation split at the 60/20/20 boundaries."""
    labels = np.asarray(labels)
    n = labels.shape[0]
    if n < 5:
        raise ValueError(f"need at least 5 nodes to split, got {n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    first = int(fractions[0] * n)
    second = int((fractions[0] + fractions[1]) * n)
    return SplitSpec(
        train=np.sort(perm[:first]),
        val=np.sort(perm[first:second]),
        test=np.sort(perm[second:]),
        seed=int(seed),
    )


def perturb_edges(g, r, seed):
    """Replace floor(r * |E|) random edges with random absent pairs.

    Removal is without replacement among existing edges; the same number of
    pairs is added uniformly among pairs absent from the *original* graph
    (no self-loops). Edge and node counts are preserved exactly.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"edge noise rate must lie in [0, 1], got {r}")
    rng = np.random.default_rng(seed)
    m = g.num_edges
    count = int(np.floor(r * m))
    if count == 0:
        return Graph(n=g.n, edges=g.edges.copy(), features=g.features, labels=g.labels)

    keep_idx = rng.choice(m, size=m - count, replace=False) if m - count else np.array([], dtype=int)
    kept = g.edges[np.sort(keep_idx)]

    existing = {(int(i), int(j)) for i, j in g.edges}
    max_pairs = g.n * (g.n - 1) // 2
    if count > max_pairs - m:
        raise ValueError(
            f"cannot add {count} new edges: only {max_pairs - m} absent pairs exist"
        )
    added = set()
    while len(added) < count:
        i = int(rng.integers(g.n))
        j = int(rng.integers(g.n))
        if i == j:
            continue
        pair = (min(i, j), max(i, j))
        if pair in existing or pair in added:
            continue
        added.add(pair)
    new_edges = np.vstack([kept, np.array(sorted(added), dtype=int).reshape(-1, 2)])
    new_edges = new_edges[np.lexsort((new_edges[:, 1], new_edges[:, 0]))]
    return Graph(n=g.n, edges=new_edges, features=g.features, labels=g.labels)

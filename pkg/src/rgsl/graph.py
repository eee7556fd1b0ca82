"""Graph data model, normalized Laplacian, and structural diagnostics.

The graph is undirected and unweighted: edges are stored once per pair with
i < j, features are a dense row-per-node matrix, labels are optional integer
class ids. All matrices are dense; the datasets this package targets stay in
the tens of thousands of nodes.
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import as_float_matrix, check_labels


@dataclass(frozen=True)
class Graph:
    """Undirected attributed graph.

    edges holds one row per undirected pair (i, j) with i < j, no self-loops,
    no duplicates. features is the n x d node-attribute matrix. labels, when
    present, assigns an integer class id to every node.
    """

    n: int
    edges: np.ndarray          # (m, 2) int array, i < j per row
    features: np.ndarray       # (n, d) float array
    labels: Optional[np.ndarray] = None

    @property
    def num_edges(self):
        return self.edges.shape[0]

    @property
    def num_classes(self):
        if self.labels is None:
            return 0
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def adjacency(self):
        """Dense symmetric 0/1 adjacency matrix (zero diagonal)."""
        A = np.zeros((self.n, self.n))
        if self.num_edges:
            i, j = self.edges[:, 0], self.edges[:, 1]
            A[i, j] = 1.0
            A[j, i] = 1.0
        return A

    def degrees(self):
        """Edge counts per node (no self-loop)."""
        deg = np.zeros(self.n, dtype=int)
        if self.num_edges:
            np.add.at(deg, self.edges[:, 0], 1)
            np.add.at(deg, self.edges[:, 1], 1)
        return deg

    def neighbor_lists(self):
        nbrs = [[] for _ in range(self.n)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return nbrs


@dataclass(frozen=True)
class DiagnosticsReport:
    """Structural statistics of a labeled graph plus energy diagnostics."""

    homophily: float
    sparsity: float
    dirichlet_energy: float
    outlier_ratio: float
    outlier_count: int

    def as_dict(self):
        return {
            "homophily": self.homophily,
            "sparsity": self.sparsity,
            "dirichlet_energy": self.dirichlet_energy,
            "outlier_ratio": self.outlier_ratio,
            "outlier_count": self.outlier_count,
        }


def build_graph(edge_list, features, labels=None):
    """Canonicalize raw edge pairs + attributes into a Graph.

    Edges are deduplicated and stored with i < j; self-loops in the input are
    dropped with a warning. The node count comes from the feature matrix, and
    any edge endpoint outside [0, n) is rejected.
    """
    features = as_float_matrix(features, "features")
    n = features.shape[0]
    if n < 1:
        raise ValueError("graph needs at least one node (features has zero rows)")

    pairs = np.asarray(list(edge_list), dtype=int).reshape(-1, 2)
    if pairs.size:
        if pairs.min() < 0 or pairs.max() >= n:
            raise ValueError(
                f"edge endpoint out of range: node ids must lie in [0, {n}) "
                f"to match the {n}-row feature matrix"
            )
        loops = pairs[:, 0] == pairs[:, 1]
        if loops.any():
            warnings.warn(f"dropping {int(loops.sum())} self-loop edge(s)")
            pairs = pairs[~loops]
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        pairs = np.unique(np.column_stack([lo, hi]), axis=0)
    else:
        pairs = pairs.reshape(0, 2)

    if labels is not None:
        labels = check_labels(labels, n)

    return Graph(n=n, edges=pairs, features=features, labels=labels)


def normalized_laplacian(g):
    """Self-loop normalized Laplacian L = I - D^{-1/2} (A + I) D^{-1/2}.

    D is the diagonal of row sums of A + I, so every D_ii >= 1 and the
    result is well defined for isolated nodes. Eigenvalues lie in [0, 2].
    """
    A_hat = g.adjacency()
    A_hat[np.diag_indices(g.n)] += 1.0
    d = A_hat.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(d)
    L = -A_hat * np.outer(inv_sqrt, inv_sqrt)
    L[np.diag_indices(g.n)] += 1.0
    return L


def homophily(g):
    """Mean over nodes of the fraction of neighbors sharing the node's label.

    Nodes without neighbors contribute 0. Requires labels.
    """
    if g.labels is None:
        raise ValueError("homophily requires node labels")
    same = np.zeros(g.n)
    deg = np.zeros(g.n)
    if g.num_edges:
        i, j = g.edges[:, 0], g.edges[:, 1]
        agree = (g.labels[i] == g.labels[j]).astype(float)
        np.add.at(same, i, agree)
        np.add.at(same, j, agree)
        np.add.at(deg, i, 1.0)
        np.add.at(deg, j, 1.0)
    ratios = np.divide(same, deg, out=np.zeros(g.n), where=deg > 0)
    return float(ratios.mean())


def sparsity(g):
    """Fraction of nonzero adjacency entries: 2|E| / n^2."""
    return 2.0 * g.num_edges / float(g.n) ** 2


def dirichlet_energy(S, g, laplacian=None):
    """Tr(S^T L S) with the normalized Laplacian of the graph.

    Note: for the *combinatorial* Laplacian this trace equals half the sum
    of ||S_i - S_j||^2 over ordered connected pairs; with the normalized L
    used here the two forms differ by degree scaling, and the trace form is
    what gets reported.
    """
    S = as_float_matrix(S, "S")
    if S.shape[0] != g.n:
        raise ValueError(f"signal has {S.shape[0]} rows, graph has {g.n} nodes")
    L = normalized_laplacian(g) if laplacian is None else laplacian
    return float(np.einsum("ij,ij->", S, L @ S))


def edge_energies(S, g):
    """||S_i - S_j||^2 for every stored edge, in edge order."""
    S = as_float_matrix(S, "S")
    if S.shape[0] != g.n:
        raise ValueError(f"signal has {S.shape[0]} rows, graph has {g.n} nodes")
    if not g.num_edges:
        return np.zeros(0)
    diff = S[g.edges[:, 0]] - S[g.edges[:, 1]]
    return np.einsum("ij,ij->i", diff, diff)


def outlier_energy_ratio(g, S, high_degree_sigma=2.0):
    """Share of the graph's Dirichlet energy carried by outlier nodes.

    Outliers are nodes with exactly one edge or with degree above
    mean + high_degree_sigma * std of the degree distribution. Each edge's
    energy ||S_i - S_j||^2 is attributed half to each endpoint; the ratio is
    the summed outlier attribution over the total. Returns (ratio, count).
    """
    deg = g.degrees()
    if g.num_edges == 0:
        return 0.0, int((deg == 1).sum())
    cutoff = deg.mean() + high_degree_sigma * deg.std()
    outlier = (deg == 1) | (deg > cutoff)
    count = int(outlier.sum())
    energies = edge_energies(S, g)
    total = float(energies.sum())
    if total <= 0.0 or count == 0:
        return 0.0, count
    node_energy = np.zeros(g.n)
    np.add.at(node_energy, g.edges[:, 0], 0.5 * energies)
    np.add.at(node_energy, g.edges[:, 1], 0.5 * energies)
    return float(node_energy[outlier].sum() / total), count

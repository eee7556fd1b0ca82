import numpy as np
import pytest

from rgsl import (
    build_graph,
    dirichlet_energy,
    homophily,
    normalized_laplacian,
    outlier_energy_ratio,
    sparsity,
)
from rgsl.graph import edge_energies

from conftest import random_graph


class TestBuildGraph:
    def test_minimal_graph(self):
        g = build_graph([(0, 1)], np.zeros((2, 1)), [0, 1])
        assert g.n == 2
        assert g.num_edges == 1
        assert g.num_classes == 2

    def test_dedup_and_symmetry(self):
        g = build_graph([(1, 0), (0, 1)], np.zeros((2, 1)))
        assert g.num_edges == 1
        assert tuple(g.edges[0]) == (0, 1)

    def test_out_of_range_endpoint(self):
        with pytest.raises(ValueError, match="out of range"):
            build_graph([(0, 5)], np.zeros((3, 2)))

    def test_self_loops_dropped_with_warning(self):
        with pytest.warns(UserWarning, match="self-loop"):
            g = build_graph([(0, 0), (0, 1)], np.zeros((2, 1)))
        assert g.num_edges == 1

    def test_label_length_mismatch(self):
        with pytest.raises(ValueError):
            build_graph([(0, 1)], np.zeros((3, 1)), [0, 1])

    def test_adjacency_and_degrees(self):
        g = build_graph([(0, 1), (1, 2)], np.zeros((3, 1)))
        A = g.adjacency()
        assert np.array_equal(A, A.T)
        assert np.all(np.diag(A) == 0)
        assert list(g.degrees()) == [1, 2, 1]


class TestNormalizedLaplacian:
    def test_single_edge_hand_value(self):
        g = build_graph([(0, 1)], np.zeros((2, 1)))
        L = normalized_laplacian(g)
        assert np.allclose(L, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-12)

    def test_isolated_node(self):
        g = build_graph([], np.zeros((1, 1)))
        assert np.allclose(normalized_laplacian(g), [[0.0]])

    def test_path_spectrum_in_range(self):
        g = build_graph([(0, 1), (1, 2)], np.zeros((3, 1)))
        eigenvalues = np.linalg.eigvalsh(normalized_laplacian(g))
        assert eigenvalues.min() >= -1e-10
        assert eigenvalues.max() <= 2.0 + 1e-10

    def test_random_graphs_symmetric_psd_bounded(self):
        for seed in range(5):
            g = random_graph(n=10 + 8 * seed, p=0.2, seed=seed)
            L = normalized_laplacian(g)
            assert np.max(np.abs(L - L.T)) < 1e-10
            eigenvalues = np.linalg.eigvalsh(L)
            assert eigenvalues.min() >= -1e-10
            assert eigenvalues.max() <= 2.0 + 1e-10

    def test_row_sum_identity(self):
        g = random_graph(n=12, p=0.3, seed=3)
        L = normalized_laplacian(g)
        A_hat = g.adjacency() + np.eye(g.n)
        d = A_hat.sum(axis=1)
        expected = 1.0 - (A_hat / np.sqrt(np.outer(d, d))).sum(axis=1)
        assert np.allclose(L.sum(axis=1), expected, atol=1e-12)


class TestHomophily:
    def test_uniform_triangle(self):
        g = build_graph([(0, 1), (0, 2), (1, 2)], np.zeros((3, 1)), [1, 1, 1])
        assert homophily(g) == 1.0

    def test_path_hand_value(self):
        # node 0: 1/1 same, node 1: 1/2, node 2: 0/1
        g = build_graph([(0, 1), (1, 2)], np.zeros((3, 1)), [0, 0, 1])
        assert homophily(g) == pytest.approx(0.5)

    def test_isolated_node_contributes_zero(self):
        g = build_graph([(0, 1)], np.zeros((3, 1)), [0, 0, 0])
        assert homophily(g) == pytest.approx(2.0 / 3.0)

    def test_invariant_under_class_relabeling(self):
        g = random_graph(n=30, p=0.2, seed=7, n_classes=4)
        relabeled = build_graph(
            [tuple(e) for e in g.edges], g.features, (g.labels + 3) % 4
        )
        assert homophily(g) == pytest.approx(homophily(relabeled), abs=1e-12)

    def test_requires_labels(self):
        g = build_graph([(0, 1)], np.zeros((2, 1)))
        with pytest.raises(ValueError, match="labels"):
            homophily(g)


class TestSparsity:
    def test_complete_triangle(self):
        g = build_graph([(0, 1), (0, 2), (1, 2)], np.zeros((3, 1)))
        assert sparsity(g) == pytest.approx(6.0 / 9.0)

    def test_empty_edge_set(self):
        g = build_graph([], np.zeros((4, 1)))
        assert sparsity(g) == 0.0


class TestDirichletEnergy:
    def test_constant_signal_zero_edge_sum(self):
        g = build_graph([(0, 1), (1, 2), (0, 2)], np.zeros((3, 1)))
        S = np.ones((3, 2)) * 4.2
        assert edge_energies(S, g).sum() == pytest.approx(0.0, abs=1e-15)

    def test_single_edge_hand_values(self):
        # edge-sum form over stored edges is 1, the normalized trace form 0.5
        g = build_graph([(0, 1)], np.zeros((2, 1)))
        S = np.array([[1.0], [0.0]])
        assert edge_energies(S, g).sum() == pytest.approx(1.0)
        assert dirichlet_energy(S, g) == pytest.approx(0.5)

    def test_nonnegative_on_random_signal(self):
        g = random_graph(n=5, p=0.6, seed=1)
        rng = np.random.default_rng(2)
        eigenvalues = np.linalg.eigvalsh(normalized_laplacian(g))
        assert eigenvalues.min() >= -1e-10  # PSD, so the trace form cannot go negative
        for _ in range(5):
            S = rng.normal(size=(5, 3))
            assert dirichlet_energy(S, g) >= -1e-12

    def test_all_ones_signal_matches_dense_oracle(self):
        g = random_graph(n=9, p=0.4, seed=5)
        S = np.ones((9, 2))
        L = normalized_laplacian(g)
        expected = np.trace(S.T @ L @ S)
        assert dirichlet_energy(S, g) == pytest.approx(expected, abs=1e-12)

    def test_row_count_mismatch(self):
        g = build_graph([(0, 1)], np.zeros((2, 1)))
        with pytest.raises(ValueError):
            dirichlet_energy(np.zeros((3, 1)), g)


class TestOutlierEnergyRatio:
    def test_regular_graph_has_no_outliers(self):
        # complete graph on 4 nodes: every degree is 3
        edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        g = build_graph(edges, np.zeros((4, 1)))
        rng = np.random.default_rng(0)
        ratio, count = outlier_energy_ratio(g, rng.normal(size=(4, 2)))
        assert count == 0
        assert ratio == 0.0

    def test_star_leaves_carry_half_the_energy(self):
        # leaves have degree 1; each edge splits its energy between center
        # and leaf, so the leaf share is exactly one half
        edges = [(0, i) for i in range(1, 5)]
        g = build_graph(edges, np.zeros((5, 1)))
        rng = np.random.default_rng(3)
        ratio, count = outlier_energy_ratio(g, rng.normal(size=(5, 3)))
        assert count == 4
        assert ratio == pytest.approx(0.5)

    def test_zero_energy_gives_zero_ratio(self):
        edges = [(0, i) for i in range(1, 5)]
        g = build_graph(edges, np.zeros((5, 1)))
        ratio, count = outlier_energy_ratio(g, np.ones((5, 2)))
        assert ratio == 0.0
        assert count == 4

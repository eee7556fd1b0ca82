import os
from pathlib import Path

import numpy as np
import pytest

from rgsl import build_graph
from rgsl.datasets import DATA_DIR_ENV, load_dataset

REPO_ROOT = Path(__file__).resolve().parents[1]


def random_graph(n, p, seed, d=3, n_classes=2):
    """Erdos-Renyi style labeled test graph."""
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    features = rng.normal(size=(n, d))
    labels = rng.integers(n_classes, size=n)
    return build_graph(edges, features, labels)


def two_clique_graph():
    """Two 3-cliques with orthogonal feature directions, from the bundled data."""
    return load_dataset(REPO_ROOT / "data" / "two_cliques")


@pytest.fixture
def two_cliques():
    return two_clique_graph()


def dataset_or_skip(name):
    """Benchmark graph from $RGSL_DATA_DIR, or skip when not exported here.

    The package only ingests pre-exported dataset directories; nothing is
    downloaded.
    """
    root = os.environ.get(DATA_DIR_ENV)
    if not root:
        pytest.skip(f"{name}: benchmark datasets not available (set ${DATA_DIR_ENV})")
    path = Path(root) / name
    if not path.is_dir():
        pytest.skip(f"{name}: no dataset directory at {path}")
    return load_dataset(path)

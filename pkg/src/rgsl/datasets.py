"""Dataset directory ingestion and on-disk formats.

A dataset directory contains three plain-text files:

    edges.txt      one "i<TAB>j" pair per line, 0-based node ids,
                   '#' starts a comment line
    features.csv   one CSV row of attribute values per node, no header
    labels.txt     one integer class id per line

Learned affinities are dumped as a header line with n followed by one
"i j value" triple per line for upper-triangle entries above a threshold.
"""

import os
from pathlib import Path

import numpy as np

from .graph import build_graph, homophily, sparsity

EDGES_FILE = "edges.txt"
FEATURES_FILE = "features.csv"
LABELS_FILE = "labels.txt"

DATA_DIR_ENV = "RGSL_DATA_DIR"

# per-dataset (k, alpha, beta, lr, epsilon) reference settings
PRESETS = {
    "chameleon": {"k": 5, "alpha": 5.0, "beta": 1.0, "lr": 0.01, "epsilon": 0.001},
    "squirrel": {"k": 2, "alpha": 5.0, "beta": 100.0, "lr": 0.01, "epsilon": 0.001},
    "wisconsin": {"k": 1, "alpha": 50.0, "beta": 100.0, "lr": 0.1, "epsilon": 1.0},
    "cornell": {"k": 17, "alpha": 0.001, "beta": 100.0, "lr": 0.01, "epsilon": 0.001},
    "texas": {"k": 4, "alpha": 0.01, "beta": 0.001, "lr": 0.01, "epsilon": 0.001},
    "washington": {"k": 8, "alpha": 0.01, "beta": 100.0, "lr": 0.01, "epsilon": 0.001},
    "roman-empire": {"k": 5, "alpha": 0.001, "beta": 1.0, "lr": 0.01, "epsilon": 0.001},
}


class DatasetError(Exception):
    """Malformed or missing dataset files."""


def resolve_dataset_dir(name_or_path):
    """Interpret a dataset argument as a path, or a name under the data root."""
    p = Path(name_or_path)
    if p.is_dir():
        return p
    root = os.environ.get(DATA_DIR_ENV)
    if root:
        candidate = Path(root) / str(name_or_path)
        if candidate.is_dir():
            return candidate
    raise DatasetError(
        f"dataset directory not found: {name_or_path!r} "
        f"(not a directory, and not under ${DATA_DIR_ENV})"
    )


def preset_for(dataset_dir):
    """Reference hyperparameters when the directory name is a known dataset."""
    name = Path(dataset_dir).name.lower().replace("_", "-")
    return dict(PRESETS.get(name, {}))


def _require(path):
    if not path.is_file():
        raise DatasetError(f"missing dataset file: {path}")
    return path


def _parse_edges(path):
    pairs = []
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DatasetError(f"{path}:{lineno}: expected 'i<TAB>j', got {raw.rstrip()!r}")
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: non-integer node id in {raw.rstrip()!r}")
    return pairs


def _parse_features(path):
    rows = []
    width = None
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                row = [float(v) for v in line.split(",")]
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: non-numeric feature value")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DatasetError(
                    f"{path}:{lineno}: row has {len(row)} values, expected {width}"
                )
            rows.append(row)
    if not rows:
        raise DatasetError(f"{path}: no feature rows")
    return np.asarray(rows, dtype=float)


def _parse_labels(path):
    values = []
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: expected an integer class id")
    return np.asarray(values, dtype=int)


def load_dataset(dataset_dir, verbose=False):
    """Read a dataset directory into a validated Graph."""
    dataset_dir = Path(dataset_dir)
    edges = _parse_edges(_require(dataset_dir / EDGES_FILE))
    features = _parse_features(_require(dataset_dir / FEATURES_FILE))
    labels = _parse_labels(_require(dataset_dir / LABELS_FILE))
    try:
        g = build_graph(edges, features, labels)
    except ValueError as exc:
        raise DatasetError(f"{dataset_dir}: {exc}") from exc
    if verbose:
        print(format_summary(dataset_dir.name, g))
    return g


def format_summary(name, g):
    parts = [
        f"dataset {name}:",
        f"nodes={g.n}",
        f"edges={g.num_edges}",
        f"features={g.features.shape[1]}",
        f"classes={g.num_classes}",
    ]
    if g.labels is not None:
        parts.append(f"homophily={homophily(g):.4f}")
    parts.append(f"sparsity={100.0 * sparsity(g):.4f}%")
    return " ".join(parts)


def save_dataset(dataset_dir, g):
    """Write a Graph back out in the dataset directory format."""
    dataset_dir = Path(dataset_dir)
    dataset_dir.mkdir(parents=True, exist_ok=True)
    with (dataset_dir / EDGES_FILE).open("w") as fh:
        for i, j in g.edges:
            fh.write(f"{i}\t{j}\n")
    with (dataset_dir / FEATURES_FILE).open("w") as fh:
        for row in g.features:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    if g.labels is None:
        raise DatasetError("dataset format requires labels")
    with (dataset_dir / LABELS_FILE).open("w") as fh:
        for v in g.labels:
            fh.write(f"{int(v)}\n")


def save_affinity(path, C, threshold=1e-8):
    """Dump a symmetric affinity: header n, then upper-triangle triples."""
    C = np.asarray(C, dtype=float)
    n = C.shape[0]
    with Path(path).open("w") as fh:
        fh.write(f"{n}\n")
        ii, jj = np.nonzero(np.triu(C) > threshold)
        for i, j in zip(ii, jj):
            fh.write(f"{i} {j} {float(C[i, j])!r}\n")


def load_affinity(path):
    """Read an affinity dump back into a dense symmetric matrix."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
        try:
            n = int(header)
        except ValueError:
            raise DatasetError(f"{path}:1: expected the node count, got {header!r}")
        C = np.zeros((n, n))
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise DatasetError(f"{path}:{lineno}: expected 'i j value'")
            i, j, value = int(parts[0]), int(parts[1]), float(parts[2])
            C[i, j] = value
            C[j, i] = value
    return C

"""Small input-validation helpers shared across the package."""

import numpy as np


def as_float_matrix(X, name="X"):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"{name} must be a 2-d matrix, got shape {X.shape}")
    return X


def as_square_matrix(M, name="matrix"):
    M = as_float_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


def check_symmetric(M, name="matrix", tol=1e-10):
    M = as_square_matrix(M, name)
    if M.size and np.max(np.abs(M - M.T)) > tol:
        raise ValueError(f"{name} must be symmetric (tolerance {tol})")
    return M


def check_finite(M, name="matrix"):
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def check_labels(labels, n, name="labels"):
    labels = np.asarray(labels, dtype=int)
    if labels.ndim != 1 or labels.shape[0] != n:
        raise ValueError(f"{name} must be a length-{n} vector, got shape {labels.shape}")
    if labels.size and labels.min() < 0:
        raise ValueError(f"{name} must be nonnegative class ids")
    return labels

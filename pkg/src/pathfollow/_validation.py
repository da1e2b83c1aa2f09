"""Input validation helpers for the estimator layer."""

from __future__ import annotations

import numpy as np


def check_array_2d(X, name="X") -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got shape {X.shape}")
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise ValueError(f"{name} must be nonempty")
    if not np.isfinite(X).all():
        raise ValueError(f"{name} contains non-finite values")
    return X


def check_vector(y, n_expected=None, name="y") -> np.ndarray:
    y = np.asarray(y, dtype=float).ravel()
    if n_expected is not None and y.shape[0] != n_expected:
        raise ValueError(f"{name} has {y.shape[0]} entries, expected "
                         f"{n_expected}")
    if not np.isfinite(y).all():
        raise ValueError(f"{name} contains non-finite values")
    return y


def check_classification_labels(y) -> np.ndarray:
    """Map a two-class label vector onto {-1.0, +1.0}."""
    y = np.asarray(y).ravel()
    classes = np.unique(y)
    if classes.shape[0] != 2:
        raise ValueError(f"need exactly two classes, got {classes!r}")
    if set(classes.tolist()) <= {-1, 1, -1.0, 1.0}:
        return y.astype(float), np.array([-1.0, 1.0])
    mapped = np.where(y == classes[1], 1.0, -1.0)
    return mapped, classes

"""Dataset container and CSV persistence.

CSV layout: header row ``y,x1,...,xp`` followed by one row per sample.
Floating point values are written with 17 significant digits so that a
save/load round trip is bit exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Dataset:
    """Design matrix ``X`` (n x p) and response vector ``y`` (length n).

    Classification responses must be exactly +-1; regression responses are
    arbitrary reals.
    """

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-d, got shape {X.shape}")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValueError("y must be 1-d with one entry per row of X")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError("need n >= 1 and p >= 1")
        if np.isnan(X).all(axis=1).any():
            raise ValueError("X contains an all-NaN row")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def check_labels(self):
        """Raise unless every response is exactly +1 or -1."""
        if not np.all(np.isin(self.y, (-1.0, 1.0))):
            raise ValueError("classification labels must be exactly +-1")


def save_dataset_csv(dataset: Dataset, path):
    header = "y," + ",".join(f"x{j + 1}" for j in range(dataset.p))
    body = np.column_stack([dataset.y, dataset.X])
    np.savetxt(path, body, delimiter=",", header=header, comments="", fmt="%.17g")


def load_dataset_csv(path) -> Dataset:
    with open(path) as fh:
        header = fh.readline().strip()
        cols = header.split(",")
        if not cols or cols[0] != "y":
            raise ValueError(f"unexpected dataset header: {header!r}")
        body = np.loadtxt(fh, delimiter=",", ndmin=2)
    if body.shape[1] != len(cols):
        raise ValueError("column count does not match header")
    return Dataset(X=body[:, 1:], y=body[:, 0])

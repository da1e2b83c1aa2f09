"""Synthetic data generators for the benchmark scenarios.

All generators are pure functions of their dimensions and seed, so repeated
calls (and the CSVs written from them) are byte identical.
"""

from __future__ import annotations

import numpy as np

from .data import Dataset
from .exceptions import PathfollowError

_REJECTION_CAP = 1_000_000


def _unit_mean(p: int) -> np.ndarray:
    return np.full(p, 1.0 / np.sqrt(p))


def gen_nonseparable(n: int, p: int, seed: int):
    """Gaussian mixture with unit class-mean separation.

    Y is +-1 with probability 1/2 each and X | Y ~ N(Y mu, I) with
    mu = (1/sqrt(p), ..., 1/sqrt(p)), so ||mu|| = 1 and the Bayes risk is
    Phi(-1) ~= 0.159.  Returns (dataset, mu).
    """
    rng = np.random.default_rng(seed)
    mu = _unit_mean(p)
    y = np.where(rng.uniform(size=n) < 0.5, 1.0, -1.0)
    X = y[:, None] * mu[None, :] + rng.standard_normal((n, p))
    return Dataset(X=X, y=y), mu


def gen_separable(n: int, p: int, seed: int) -> Dataset:
    """Linearly separable sample: rows are redrawn until y_i mu' x_i > 1.

    The hyperplane mu' x = 0 then separates the classes with margin, so the
    unregularized logistic MLE sits at infinity.
    """
    rng = np.random.default_rng(seed)
    mu = _unit_mean(p)
    y = np.where(rng.uniform(size=n) < 0.5, 1.0, -1.0)
    X = np.empty((n, p))
    for i in range(n):
        for _ in range(_REJECTION_CAP):
            row = y[i] * mu + rng.standard_normal(p)
            if y[i] * (mu @ row) > 1.0:
                X[i] = row
                break
        else:
            raise PathfollowError("rejection sampling cap hit for a row")
    dataset = Dataset(X=X, y=y)
    assert np.all(dataset.y * (dataset.X @ mu) > 1.0)
    return dataset


def gen_regression(n: int, p: int, sigma2: float, seed: int):
    """Linear model y = x' theta_star + noise with ||theta_star|| = 1.

    X has independent standard normal entries and the noise variance is
    sigma2.  Returns (dataset, theta_star).
    """
    rng = np.random.default_rng(seed)
    theta_star = _unit_mean(p)
    X = rng.standard_normal((n, p))
    y = X @ theta_star + np.sqrt(sigma2) * rng.standard_normal(n)
    return Dataset(X=X, y=y), theta_star


def gen_generative(n: int, p: int, seed: int):
    """Logistic generative model with theta drawn from N(0, (16/p) I).

    X ~ N(0, I) and P(Y = +1 | X) = sigmoid(X' theta), so E||theta||^2 = 16.
    Returns (dataset, theta_true).
    """
    rng = np.random.default_rng(seed)
    theta_true = rng.normal(0.0, np.sqrt(16.0 / p), size=p)
    X = rng.standard_normal((n, p))
    prob_pos = 1.0 / (1.0 + np.exp(-(X @ theta_true)))
    y = np.where(rng.uniform(size=n) < prob_pos, 1.0, -1.0)
    return Dataset(X=X, y=y), theta_true

import numpy as np
import pytest

from pathfollow import (Dataset, LogisticLoss, RegularizedObjective,
                        SquaredErrorLoss, gen_nonseparable, gen_regression)


def fd_gradient(value_fn, theta, h=1e-6):
    """Centered finite differences of a scalar function."""
    theta = np.asarray(theta, dtype=float)
    out = np.empty_like(theta)
    for i in range(theta.size):
        step = np.zeros_like(theta)
        step[i] = h
        out[i] = (value_fn(theta + step) - value_fn(theta - step)) / (2 * h)
    return out


def fd_hessian(grad_fn, theta, h=1e-6):
    """Centered finite differences of a gradient map."""
    theta = np.asarray(theta, dtype=float)
    cols = []
    for i in range(theta.size):
        step = np.zeros_like(theta)
        step[i] = h
        cols.append((grad_fn(theta + step) - grad_fn(theta - step)) / (2 * h))
    return np.column_stack(cols)


def rel_err(approx, exact):
    scale = max(float(np.linalg.norm(exact)), 1e-12)
    return float(np.linalg.norm(np.asarray(approx) - np.asarray(exact))) / scale


@pytest.fixture(scope="session")
def small_logistic():
    dataset, _ = gen_nonseparable(50, 5, seed=7)
    return LogisticLoss(dataset)


@pytest.fixture(scope="session")
def small_logistic_obj(small_logistic):
    return RegularizedObjective(small_logistic)


@pytest.fixture(scope="session")
def small_ridge():
    dataset, _ = gen_regression(60, 6, sigma2=0.25, seed=3)
    return SquaredErrorLoss(dataset)


@pytest.fixture(scope="session")
def small_ridge_obj(small_ridge):
    return RegularizedObjective(small_ridge)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)


def single_sample_logistic(x=1.0, y=1.0):
    return LogisticLoss(Dataset(X=np.array([[x]]), y=np.array([y])))

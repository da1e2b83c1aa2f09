"""Convex loss models with analytic derivative oracles and smoothness profiles.

Every loss exposes ``value``, ``gradient`` and ``hessian`` plus a domain
predicate ``contains``.  The Hessian is always returned as a dense symmetric
PSD matrix (desk scale, p up to a couple thousand).  Each supported family
also carries a :class:`SmoothnessProfile` holding the constants
``(beta, gamma1, gamma2, m, L, nu)`` that drive the step-size schedules:

* ``beta, gamma1, gamma2`` - local Lipschitz-Hessian constants: for all
  admissible perturbations ``d`` with ``d' H(x)^gamma2 d <= beta**-2``,

      ||grad(x+d) - grad(x) - H(x) d|| <= beta * d' H(x)^gamma1 d

* ``m, L`` - strong convexity / gradient Lipschitz constants (``L`` may be
  ``inf`` for barrier-type losses that are not globally smooth);
* ``nu`` - largest eigenvalue of the Hessian at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .data import Dataset
from .exceptions import DomainError, UnsupportedLossError

# Beta constants under which the scalar losses provably satisfy the local
# Lipschitz-Hessian condition with the gamma values listed below.  Any
# positive beta works for exactly quadratic losses (their condition's left
# hand side is identically zero); a negligible value keeps the step-size
# caps inactive, matching Newton's exactness on quadratics.
LOG_BARRIER_BETA = 2.0
ENTROPY_BARRIER_BETA = (3.0 + np.sqrt(5.0)) / 2.0
LOGISTIC_BETA = 2.0
EXPONENTIAL_BETA = 1.0
QUADRATIC_BETA = 1e-12


@dataclass(frozen=True)
class SmoothnessProfile:
    beta: float
    gamma1: float
    gamma2: float
    m: float
    L: float
    nu: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not (0 <= self.gamma1 < 2 and 0 <= self.gamma2 < 2):
            raise ValueError("gamma1 and gamma2 must lie in [0, 2)")
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if self.m > self.L * (1 + 1e-12):
            raise ValueError("m must not exceed L")
        if self.nu > self.L * (1 + 1e-12):
            raise ValueError("nu must not exceed L")

    def scaled_beta(self, factor: float) -> "SmoothnessProfile":
        """Copy of the profile with beta multiplied by ``factor``."""
        return SmoothnessProfile(self.beta * factor, self.gamma1, self.gamma2,
                                 self.m, self.L, self.nu)


def psd_power(H: np.ndarray, gamma: float) -> np.ndarray:
    """Fractional power of a symmetric PSD matrix via eigendecomposition.

    Eigenvalues are clamped at zero before powering; ``gamma == 0`` returns
    the identity and ``gamma == 1`` returns ``H`` unchanged.
    """
    H = np.asarray(H, dtype=float)
    if gamma == 0:
        return np.eye(H.shape[0])
    if gamma == 1:
        return H
    evals, evecs = np.linalg.eigh(H)
    evals = np.clip(evals, 0.0, None) ** gamma
    return (evecs * evals) @ evecs.T


class LossModel:
    """Base class: a convex twice-differentiable empirical loss on R^p."""

    dim: int

    def contains(self, theta) -> bool:
        """Domain predicate; the default domain is all of R^p."""
        return True

    def value(self, theta) -> float:
        raise NotImplementedError

    def gradient(self, theta) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, theta) -> np.ndarray:
        raise NotImplementedError

    def derivatives(self, theta):
        """(gradient, hessian) pair; subclasses may fuse the evaluation."""
        return self.gradient(theta), self.hessian(theta)

    def value_and_gradient(self, theta):
        return self.value(theta), self.gradient(theta)

    def smoothness_profile(self) -> SmoothnessProfile:
        raise UnsupportedLossError(
            f"no smoothness profile known for {type(self).__name__}")

    def random_interior(self, rng: np.random.Generator) -> np.ndarray:
        """A random point safely inside the domain (used by samplers)."""
        return rng.standard_normal(self.dim)

    def _check_domain(self, theta):
        if not self.contains(theta):
            raise DomainError(
                f"point outside the domain of {type(self).__name__}")


def loss_value(model: LossModel, theta) -> float:
    model._check_domain(theta)
    return model.value(theta)


def loss_derivatives(model: LossModel, theta):
    model._check_domain(theta)
    return model.derivatives(theta)


def smoothness_profile(model: LossModel) -> SmoothnessProfile:
    return model.smoothness_profile()


# ---------------------------------------------------------------------------
# One-dimensional analytic losses
# ---------------------------------------------------------------------------

class ScalarLoss(LossModel):
    """A loss on R^1 defined through scalar derivative callables."""

    dim = 1

    def _f(self, s: float) -> float:
        raise NotImplementedError

    def _f1(self, s: float) -> float:
        raise NotImplementedError

    def _f2(self, s: float) -> float:
        raise NotImplementedError

    def _scalar_contains(self, s: float) -> bool:
        return True

    def contains(self, theta) -> bool:
        return self._scalar_contains(float(np.asarray(theta).reshape(())))

    def value(self, theta) -> float:
        self._check_domain(theta)
        return self._f(float(np.asarray(theta).reshape(())))

    def gradient(self, theta) -> np.ndarray:
        self._check_domain(theta)
        return np.array([self._f1(float(np.asarray(theta).reshape(())))])

    def hessian(self, theta) -> np.ndarray:
        self._check_domain(theta)
        return np.array([[self._f2(float(np.asarray(theta).reshape(())))]])


class LogBarrierLoss(ScalarLoss):
    """L(t) = -ln(t) on t > 0."""

    def _scalar_contains(self, s):
        return s > 0

    def _f(self, s):
        return -np.log(s)

    def _f1(self, s):
        return -1.0 / s

    def _f2(self, s):
        return 1.0 / s ** 2

    def smoothness_profile(self):
        # Unbounded curvature on (0, inf): not globally gradient-Lipschitz,
        # and 0 is outside the domain so nu falls back to the L cap.
        return SmoothnessProfile(LOG_BARRIER_BETA, 1.5, 1.0,
                                 m=0.0, L=np.inf, nu=np.inf)

    def random_interior(self, rng):
        return np.exp(rng.normal(0.0, 0.7, size=1))


class EntropyBarrierLoss(ScalarLoss):
    """L(t) = t ln(t) - ln(t) on t > 0."""

    def _scalar_contains(self, s):
        return s > 0

    def _f(self, s):
        return s * np.log(s) - np.log(s)

    def _f1(self, s):
        return np.log(s) + 1.0 - 1.0 / s

    def _f2(self, s):
        return 1.0 / s + 1.0 / s ** 2

    def smoothness_profile(self):
        return SmoothnessProfile(ENTROPY_BARRIER_BETA, 1.5, 1.0,
                                 m=0.0, L=np.inf, nu=np.inf)

    def random_interior(self, rng):
        return np.exp(rng.normal(0.0, 0.7, size=1))


class ScalarLogisticLoss(ScalarLoss):
    """L(t) = ln(1 + exp(-t))."""

    def _f(self, s):
        return np.logaddexp(0.0, -s)

    def _f1(self, s):
        return -expit(-s)

    def _f2(self, s):
        return expit(s) * expit(-s)

    def smoothness_profile(self):
        return SmoothnessProfile(LOGISTIC_BETA, 1.0, 0.0,
                                 m=0.0, L=0.25, nu=0.25)


class ExponentialLoss(ScalarLoss):
    """L(t) = exp(-t)."""

    def _f(self, s):
        return np.exp(-s)

    def _f1(self, s):
        return -np.exp(-s)

    def _f2(self, s):
        return np.exp(-s)

    def smoothness_profile(self):
        return SmoothnessProfile(EXPONENTIAL_BETA, 1.0, 0.0,
                                 m=0.0, L=np.inf, nu=1.0)


class SquareLoss(ScalarLoss):
    """L(t) = (t - center)**2."""

    def __init__(self, center: float = 0.0):
        self.center = float(center)

    def _f(self, s):
        return (s - self.center) ** 2

    def _f1(self, s):
        return 2.0 * (s - self.center)

    def _f2(self, s):
        return 2.0

    def smoothness_profile(self):
        # The Lipschitz-Hessian condition holds with any gamma pair in
        # [0, 2)^2; (1, 0) keeps the schedule formulas finite and uniform.
        return SmoothnessProfile(QUADRATIC_BETA, 1.0, 0.0, m=2.0, L=2.0, nu=2.0)


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

class AffineLoss(LossModel):
    """g(x) = f(a' x + b) for a one-dimensional base loss f.

    Composition preserves the local Lipschitz-Hessian condition; the beta
    constant rescales by ``max(||a||**(3 - 2*gamma1), ||a||**(1 - gamma2))``,
    which reduces to ``beta * ||a||`` in the (gamma1, gamma2) = (1, 0) case.
    """

    def __init__(self, base: ScalarLoss, a, b: float = 0.0):
        self.base = base
        self.a = np.asarray(a, dtype=float).ravel()
        self.b = float(b)
        self.dim = self.a.size

    def _s(self, theta):
        return float(self.a @ np.asarray(theta, dtype=float)) + self.b

    def contains(self, theta):
        return self.base._scalar_contains(self._s(theta))

    def value(self, theta):
        self._check_domain(theta)
        return self.base._f(self._s(theta))

    def gradient(self, theta):
        self._check_domain(theta)
        return self.base._f1(self._s(theta)) * self.a

    def hessian(self, theta):
        self._check_domain(theta)
        return self.base._f2(self._s(theta)) * np.outer(self.a, self.a)

    def smoothness_profile(self):
        prof = self.base.smoothness_profile()
        norm_a = float(np.linalg.norm(self.a))
        if norm_a == 0.0:
            raise UnsupportedLossError("affine map with zero slope")
        factor = max(norm_a ** (3.0 - 2.0 * prof.gamma1),
                     norm_a ** (1.0 - prof.gamma2))
        curv = self.base._f2(self.b) if self.base._scalar_contains(self.b) else np.inf
        return SmoothnessProfile(prof.beta * factor, prof.gamma1, prof.gamma2,
                                 m=0.0, L=prof.L * norm_a ** 2 if np.isfinite(prof.L) else np.inf,
                                 nu=curv * norm_a ** 2)

    def random_interior(self, rng):
        s = float(self.base.random_interior(rng).reshape(()))
        theta = self.a * ((s - self.b) / (self.a @ self.a))
        return theta + _null_component(self.a, rng)


def _null_component(a, rng):
    """Random vector orthogonal to ``a`` (free directions of an affine loss)."""
    z = rng.standard_normal(a.size)
    return z - a * ((a @ z) / (a @ a))


class WeightedSumLoss(LossModel):
    """Nonnegative combination sum_i w_i f_i of losses on a common space.

    The combination keeps the (gamma1, gamma2) = (1, 0) Lipschitz-Hessian
    condition with beta equal to the largest constituent beta.
    """

    def __init__(self, losses, weights=None):
        if not losses:
            raise ValueError("need at least one loss")
        self.losses = list(losses)
        dims = {loss.dim for loss in self.losses}
        if len(dims) != 1:
            raise ValueError("losses must share a dimension")
        self.dim = dims.pop()
        if weights is None:
            weights = np.ones(len(self.losses))
        self.weights = np.asarray(weights, dtype=float)
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")

    def contains(self, theta):
        return all(loss.contains(theta) for loss in self.losses)

    def value(self, theta):
        self._check_domain(theta)
        return float(sum(w * loss.value(theta)
                         for w, loss in zip(self.weights, self.losses)))

    def gradient(self, theta):
        self._check_domain(theta)
        out = np.zeros(self.dim)
        for w, loss in zip(self.weights, self.losses):
            out += w * loss.gradient(theta)
        return out

    def hessian(self, theta):
        self._check_domain(theta)
        out = np.zeros((self.dim, self.dim))
        for w, loss in zip(self.weights, self.losses):
            out += w * loss.hessian(theta)
        return out

    def smoothness_profile(self):
        profiles = [loss.smoothness_profile() for loss in self.losses]
        if any((p.gamma1, p.gamma2) != (1.0, 0.0) for p in profiles):
            raise UnsupportedLossError(
                "combination rule requires (gamma1, gamma2) = (1, 0) parts")
        beta = max(p.beta for p in profiles)
        L = float(np.sum(self.weights * np.array([p.L for p in profiles])))
        nu = float(np.linalg.eigvalsh(self.hessian(np.zeros(self.dim)))[-1])
        return SmoothnessProfile(beta, 1.0, 0.0, m=0.0, L=L, nu=nu)


# ---------------------------------------------------------------------------
# Dataset-backed losses
# ---------------------------------------------------------------------------

class LogisticLoss(LossModel):
    """Mean logistic loss (1/n) sum_i ln(1 + exp(-y_i x_i' theta)).

    Labels must be +-1.  Satisfies the local Lipschitz-Hessian condition
    with gamma1 = 1, gamma2 = 0 and beta = 2 max_i ||x_i||.
    """

    def __init__(self, dataset: Dataset):
        dataset.check_labels()
        self.dataset = dataset
        self.Xy = dataset.X * dataset.y[:, None]
        self.dim = dataset.p
        self._n = dataset.n

    def value(self, theta):
        margins = self.Xy @ theta
        return float(np.mean(np.logaddexp(0.0, -margins)))

    def gradient(self, theta):
        margins = self.Xy @ theta
        return -(self.Xy.T @ expit(-margins)) / self._n

    def hessian(self, theta):
        margins = self.Xy @ theta
        s = expit(margins)
        w = s * (1.0 - s) / self._n
        return (self.Xy * w[:, None]).T @ self.Xy

    def derivatives(self, theta):
        margins = self.Xy @ theta
        s_neg = expit(-margins)
        grad = -(self.Xy.T @ s_neg) / self._n
        w = s_neg * (1.0 - s_neg) / self._n
        hess = (self.Xy * w[:, None]).T @ self.Xy
        return grad, hess

    def value_and_gradient(self, theta):
        margins = self.Xy @ theta
        value = float(np.mean(np.logaddexp(0.0, -margins)))
        grad = -(self.Xy.T @ expit(-margins)) / self._n
        return value, grad

    def smoothness_profile(self):
        X = self.dataset.X
        beta = 2.0 * float(np.max(np.linalg.norm(X, axis=1)))
        gram_top = float(np.linalg.eigvalsh(X.T @ X / self._n)[-1])
        L = gram_top / 4.0
        return SmoothnessProfile(beta, 1.0, 0.0, m=0.0, L=L, nu=L)


class SquaredErrorLoss(LossModel):
    """Mean squared error (1/2n) ||X theta - y||**2.

    The Hessian X'X/n is constant; m and L are its extreme eigenvalues.
    """

    def __init__(self, dataset: Dataset):
        self.dataset = dataset
        self.dim = dataset.p
        self._n = dataset.n
        self._H = dataset.X.T @ dataset.X / self._n
        self._H.setflags(write=False)
        self._Xty = dataset.X.T @ dataset.y / self._n
        self._y_sq = float(dataset.y @ dataset.y) / self._n

    def value(self, theta):
        residual = self.dataset.X @ theta - self.dataset.y
        return 0.5 * float(residual @ residual) / self._n

    def gradient(self, theta):
        return self._H @ theta - self._Xty

    def hessian(self, theta):
        return self._H

    def value_and_gradient(self, theta):
        Ht = self._H @ theta
        value = 0.5 * float(theta @ Ht) - float(self._Xty @ theta) + 0.5 * self._y_sq
        return value, Ht - self._Xty

    def smoothness_profile(self):
        evals = np.linalg.eigvalsh(self._H)
        m = max(float(evals[0]), 0.0)
        L = float(evals[-1])
        return SmoothnessProfile(QUADRATIC_BETA, 1.0, 0.0, m=m, L=L, nu=L)

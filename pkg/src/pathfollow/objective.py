"""Scaled regularized objective f_t and the high-accuracy reference solver.

With C(t) = exp(t) - 1 fixed, the scaled objective is

    f_t(theta) = (1 - e^-t) L_n(theta) + (e^-t / 2) ||theta||^2,

which is e^-t strongly convex.  Its minimizer theta(t) traces the
l2-regularized solution path, equivalently the solution of the initial
value problem theta'(t) = J(theta, t) with

    J(theta, t) = -[(1 - e^-t) H(theta) + e^-t I]^{-1} grad(theta)

started from theta(0) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError
from scipy.linalg.lapack import dposv

from .exceptions import ConvergenceError, NumericalError
from .losses import LossModel

# Reference solves cap t here: e^-50 is far below double precision
# relevance, so theta(50) stands in for theta(inf).
T_CAP = 50.0

_REF_MAX_ITER = 10_000
_ARMIJO = 1e-4
_SHRINK = 0.5


def _weights(t: float):
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    t = min(t, T_CAP)
    return -math.expm1(-t), math.exp(-t)


class RegularizedObjective:
    """f_t evaluation, its derivatives, and SPD solves against its Hessian."""

    def __init__(self, loss: LossModel):
        self.loss = loss
        self.dim = loss.dim

    # -- pointwise evaluation -------------------------------------------------

    def value(self, t: float, theta) -> float:
        w1, w0 = _weights(t)
        theta = np.asarray(theta, dtype=float)
        return w1 * self.loss.value(theta) + 0.5 * w0 * float(theta @ theta)

    def grad(self, t: float, theta) -> np.ndarray:
        w1, w0 = _weights(t)
        theta = np.asarray(theta, dtype=float)
        return w1 * self.loss.gradient(theta) + w0 * theta

    def value_and_grad(self, t: float, theta):
        w1, w0 = _weights(t)
        theta = np.asarray(theta, dtype=float)
        lv, lg = self.loss.value_and_gradient(theta)
        sq = float(theta @ theta)
        return w1 * lv + 0.5 * w0 * sq, w1 * lg + w0 * theta

    def hessian(self, t: float, theta) -> np.ndarray:
        w1, w0 = _weights(t)
        H = w1 * self.loss.hessian(np.asarray(theta, dtype=float))
        H.flat[::H.shape[0] + 1] += w0
        return H

    # -- SPD solves -----------------------------------------------------------

    def solve_system(self, t: float, hess_loss: np.ndarray, rhs: np.ndarray):
        """Solve [(1 - e^-t) H + e^-t I] x = rhs via Cholesky.

        The system matrix is provably SPD for finite t; if factorization
        still fails numerically, fall back to an eigendecomposition with
        eigenvalues floored at e^-t.
        """
        w1, w0 = _weights(t)
        M = w1 * hess_loss
        M.flat[::M.shape[0] + 1] += w0
        _, x, info = dposv(M, rhs, lower=1, overwrite_a=1)
        if info == 0:
            return x
        if info < 0:
            raise NumericalError(f"bad argument {-info} to Cholesky solve")
        # Factorization failed: rebuild the matrix and floor its spectrum.
        M = w1 * hess_loss
        M.flat[::M.shape[0] + 1] += w0
        try:
            evals, evecs = np.linalg.eigh(M)
        except LinAlgError as exc:  # pragma: no cover - pathological input
            raise NumericalError("eigendecomposition failed") from exc
        evals = np.maximum(evals, w0)
        return evecs @ ((evecs.T @ rhs) / evals)

    def ode_rhs(self, t: float, theta) -> np.ndarray:
        """Search direction J(theta, t) of the solution-path ODE."""
        theta = np.asarray(theta, dtype=float)
        grad, hess = self.loss.derivatives(theta)
        return -self.solve_system(t, hess, grad)

    # -- reference solver -----------------------------------------------------

    def solve_exact(self, t: float, tol: float = 1e-10, theta_init=None,
                    max_iter: int = _REF_MAX_ITER) -> "ReferencePoint":
        """Damped Newton minimization of f_t down to ||grad f_t|| <= tol.

        Backtracking on f_t guarantees descent; the returned point is
        certified by its recorded gradient norm.
        """
        if tol <= 0:
            raise ValueError("tol must be positive")
        if t < 0:
            raise ValueError("t must be nonnegative")
        if t == 0.0:
            return ReferencePoint(t=0.0, theta=np.zeros(self.dim), grad_norm=0.0)
        theta = (np.zeros(self.dim) if theta_init is None
                 else np.array(theta_init, dtype=float))
        if not self.loss.contains(theta):
            theta = np.zeros(self.dim)
        f_val, grad = self.value_and_grad(t, theta)
        for _ in range(max_iter):
            g_norm = float(np.linalg.norm(grad))
            if g_norm <= tol:
                return ReferencePoint(t=t, theta=theta, grad_norm=g_norm)
            direction = -self.solve_system(t, self.loss.hessian(theta), grad)
            slope = float(grad @ direction)
            # Descent below one ulp of f cannot be measured; without this
            # allowance the line search stalls at the float plateau.
            noise = 1e-15 * (1.0 + abs(f_val))
            eta = 1.0
            while True:
                candidate = theta + eta * direction
                if self.loss.contains(candidate):
                    f_new = self.value(t, candidate)
                    if f_new <= f_val + _ARMIJO * eta * slope + noise:
                        break
                eta *= _SHRINK
                if eta < 1e-18:
                    raise ConvergenceError(
                        "backtracking stalled in reference solve")
            theta = candidate
            f_val, grad = self.value_and_grad(t, theta)
        raise ConvergenceError(
            f"reference solve at t={t} did not reach tol={tol} "
            f"within {max_iter} iterations")

    def reference_sweep(self, ts, tol: float = 1e-10, theta_init=None):
        """Reference points along an ascending t grid, each warm-started."""
        points = []
        theta = theta_init
        for t in ts:
            point = self.solve_exact(float(t), tol=tol, theta_init=theta)
            theta = point.theta
            points.append(point)
        return points

    # -- path property checks -------------------------------------------------

    def path_property_report(self, points, slack: float = 1e-6):
        """Monotonicity and growth-bound violations along reference points.

        Checks, in order: ||theta(t)|| nondecreasing; L_n(theta(t))
        nonincreasing; ||theta(t)|| / (e^t - 1) nonincreasing; and
        ||theta(t)|| <= (e^t - 1) ||grad L_n(0)||.
        """
        ts = [point.t for point in points]
        if any(t2 <= t1 for t1, t2 in zip(ts, ts[1:])):
            raise ValueError("reference points must be sorted by strictly "
                             "increasing t")
        norms = [float(np.linalg.norm(point.theta)) for point in points]
        losses = [self.loss.value(point.theta) for point in points]
        scaled = [norm / math.expm1(point.t)
                  for norm, point in zip(norms, points)]
        grad0 = float(np.linalg.norm(self.loss.gradient(np.zeros(self.dim))))

        norm_viol = sum(b < a - slack for a, b in zip(norms, norms[1:]))
        loss_viol = sum(b > a + slack for a, b in zip(losses, losses[1:]))
        scaled_viol = sum(b > a + slack for a, b in zip(scaled, scaled[1:]))
        growth_viol = sum(
            norm > math.expm1(point.t) * grad0 + slack
            for norm, point in zip(norms, points))
        return PathPropertyReport(
            n_points=len(points),
            norm_nondecreasing_violations=norm_viol,
            loss_nonincreasing_violations=loss_viol,
            scaled_norm_nonincreasing_violations=scaled_viol,
            growth_bound_violations=growth_viol,
        )


@dataclass(frozen=True)
class ReferencePoint:
    """A certified point on the exact solution path."""

    t: float
    theta: np.ndarray
    grad_norm: float


@dataclass(frozen=True)
class PathPropertyReport:
    n_points: int
    norm_nondecreasing_violations: int
    loss_nonincreasing_violations: int
    scaled_norm_nonincreasing_violations: int
    growth_bound_violations: int

    @property
    def total_violations(self) -> int:
        return (self.norm_nondecreasing_violations
                + self.loss_nonincreasing_violations
                + self.scaled_norm_nonincreasing_violations
                + self.growth_bound_violations)

"""Constant-step numerical integrators for the solution-path ODE.

The forward Euler update evaluates the system matrix at the left grid
point; the second-order Runge-Kutta update averages the slope there with
the slope at an Euler predictor, costing two linear solves per step
instead of one.  A one-step-Newton baseline on a grid that is equally
spaced in the ridge weight (the classical path-tracking layout) is also
provided for comparisons.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .objective import RegularizedObjective
from .trace import T_EXCEEDED, PathTrace, TraceBuilder

EULER = "euler"
RK2 = "rk2"


@dataclass(frozen=True)
class OdeConfig:
    alpha: float
    t_max: float
    method: str = EULER

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not math.isfinite(self.t_max) or self.t_max <= 0:
            raise ValueError("t_max must be positive and finite")
        if self.alpha > self.t_max:
            raise ValueError("alpha must not exceed t_max")
        if self.method not in (EULER, RK2):
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_max / self.alpha - 1e-12))


def euler_step(obj: RegularizedObjective, t_k: float, theta_k,
               alpha: float) -> np.ndarray:
    """theta_k + alpha * J(theta_k, t_k) (one linear solve)."""
    if t_k < 0:
        raise ValueError("t_k must be nonnegative")
    theta_k = np.asarray(theta_k, dtype=float)
    return theta_k + alpha * obj.ode_rhs(t_k, theta_k)


def rk2_step(obj: RegularizedObjective, t_k: float, theta_k,
             alpha: float) -> np.ndarray:
    """Midpoint-averaged update (exactly two linear solves)."""
    if t_k < 0:
        raise ValueError("t_k must be nonnegative")
    theta_k = np.asarray(theta_k, dtype=float)
    slope_left = obj.ode_rhs(t_k, theta_k)
    slope_right = obj.ode_rhs(t_k + alpha, theta_k + alpha * slope_left)
    return theta_k + 0.5 * alpha * (slope_left + slope_right)


def run_ode_path(obj: RegularizedObjective, config: OdeConfig) -> PathTrace:
    """Integrate from (t=0, theta=0) to t_max with constant steps.

    If t_max is not a multiple of alpha the final step uses the remainder,
    so the grid always ends exactly at t_max.
    """
    start = time.perf_counter()
    step = euler_step if config.method == EULER else rk2_step
    solves_per_step = 1 if config.method == EULER else 2
    builder = TraceBuilder(method=config.method)
    theta = np.zeros(obj.dim)
    t = 0.0
    while t < config.t_max - 1e-12:
        alpha = min(config.alpha, config.t_max - t)
        theta = step(obj, t, theta, alpha)
        builder.linear_solves += solves_per_step
        t = min(t + alpha, config.t_max)
        g_norm = float(np.linalg.norm(obj.grad(t, theta)))
        builder.append(t, alpha, theta, g_norm, inner_steps=1)
    return builder.build(T_EXCEEDED, wall_time=time.perf_counter() - start,
                         dim=obj.dim, alpha=config.alpha)


def rosset_path(obj: RegularizedObjective, n_steps: int, t_min: float,
                t_max: float, ref_tol: float = 1e-10) -> PathTrace:
    """One-step-Newton tracking on a grid uniform in the ridge weight.

    The ridge weight lam = 1 / (e^t - 1) runs over a grid of ``n_steps``
    equally spaced values between 1/(e^{t_max}-1) and 1/(e^{t_min}-1).
    The walk starts from a high-accuracy solve at the heaviest
    regularization (the t_min end, largest lam) and takes one Newton step
    of the matching f_t at each subsequent grid value; its cost is excluded
    from the step count.  Grid points are re-expressed in t so traces are
    comparable with the other methods.
    """
    if n_steps < 2:
        raise ValueError("need at least two grid points")
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    start = time.perf_counter()
    lam_heavy = 1.0 / math.expm1(t_min)
    lam_light = 1.0 / math.expm1(t_max)
    lams = np.linspace(lam_heavy, lam_light, n_steps)
    ts = np.log1p(1.0 / lams)

    builder = TraceBuilder(method="rosset")
    ref = obj.solve_exact(float(ts[0]), tol=ref_tol)
    theta = ref.theta
    builder.append(ts[0], ts[0], theta, ref.grad_norm, inner_steps=1)
    prev_t = float(ts[0])
    for t_next in ts[1:]:
        t_next = float(t_next)
        w1, w0 = -math.expm1(-t_next), math.exp(-t_next)
        grad, hess = obj.loss.derivatives(theta)
        theta = theta - obj.solve_system(t_next, hess, w1 * grad + w0 * theta)
        builder.linear_solves += 1
        g_norm = float(np.linalg.norm(obj.grad(t_next, theta)))
        builder.append(t_next, t_next - prev_t, theta, g_norm, inner_steps=1)
        prev_t = t_next
    return builder.build(T_EXCEEDED, wall_time=time.perf_counter() - start,
                         dim=obj.dim, t_min=t_min)

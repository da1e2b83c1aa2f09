"""Path-following solvers: one-step Newton and multi-step gradient descent.

Both methods walk an adaptive grid 0 < t_1 < t_2 < ... and carry the
previous solution forward.  The Newton method takes a single Newton step of
f_{t_{k+1}} from theta_k; the gradient method runs backtracking gradient
descent on f_{t_{k+1}} until its relative stopping rule fires.  Step sizes
alpha_{k+1} = t_{k+1} - t_k follow adaptive schedules that balance the
accuracy at grid points against the error of interpolating between them,
and both solvers share a termination rule of the form

    t_N > t_max   or   2 ||theta_N||^2 / (e^{t_N} - 1) <= threshold.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConvergenceError, NonterminationError, NumericalError
from .losses import SmoothnessProfile
from .objective import RegularizedObjective
from .trace import CAP, NORM_CRITERION, T_EXCEEDED, PathTrace, TraceBuilder

NEWTON_C2 = 442.0
GD_C0 = 12.0
GD_ALPHA_MAX = math.log(2.0)

_OUTER_CAP = 1_000_000
_INNER_CAP = 1_000_000
_HALVING_SLACK = 1e-9


# ---------------------------------------------------------------------------
# Newton update
# ---------------------------------------------------------------------------

def newton_step(obj: RegularizedObjective, theta_k, t_next: float) -> np.ndarray:
    """One Newton step of f_{t_next} started at theta_k.

    theta_{k+1} = theta_k - [(1-e^-s) H(theta_k) + e^-s I]^{-1}
                            [(1-e^-s) grad(theta_k) + e^-s theta_k],  s = t_next.
    """
    if t_next <= 0:
        raise ValueError("t_next must be positive")
    theta_k = np.asarray(theta_k, dtype=float)
    grad, hess = obj.loss.derivatives(theta_k)
    w1, w0 = -math.expm1(-t_next), math.exp(-t_next)
    rhs = w1 * grad + w0 * theta_k
    return theta_k - obj.solve_system(t_next, hess, rhs)


def newton_step_from_gradient(obj: RegularizedObjective, theta_k, g_k,
                              t_k: float, t_next: float) -> np.ndarray:
    """Algebraically equivalent Newton update driven by the scaled gradient.

    Substituting theta_k = e^{t_k} g_k - (e^{t_k}-1) grad(theta_k) into the
    plain update yields

    theta_{k+1} = theta_k - [(1-e^-s) H + e^-s I]^{-1}
                            [(1-e^-a) grad(theta_k) + e^-a g_k]

    with s = t_next and a = t_next - t_k.
    """
    theta_k = np.asarray(theta_k, dtype=float)
    alpha = t_next - t_k
    grad, hess = obj.loss.derivatives(theta_k)
    rhs = -math.expm1(-alpha) * grad + math.exp(-alpha) * np.asarray(g_k, dtype=float)
    return theta_k - obj.solve_system(t_next, hess, rhs)


def _next_alpha_checked(sched, t, alpha, theta_norm):
    """Schedule step with the alpha_{k+1} >= alpha_k / 2 floor.

    Certified schedules guarantee the floor; a violation there signals a
    schedule bug.  Runs with a pinned initial step sit outside the
    guarantee, so the floor is enforced by clamping instead.
    """
    alpha_next = sched.alpha_next(t, alpha, theta_norm)
    if alpha_next < 0.5 * alpha * (1.0 - _HALVING_SLACK):
        if sched.certified:
            raise NumericalError(
                f"certified schedule infeasible: the step after t={t:.4g} "
                f"collapsed below alpha_k/2 (curvature cap vs growth floor). "
                "This happens at start-up for losses with gamma1 > 1 "
                "(barrier type); use an alpha1 override or an ODE "
                "integrator for such losses.")
        alpha_next = 0.5 * alpha
    return alpha_next


# ---------------------------------------------------------------------------
# Newton schedule
# ---------------------------------------------------------------------------

@dataclass
class NewtonSchedule:
    """Adaptive Newton grid: initial step, growth rule and termination.

    The initial step obeys

        alpha_1 = min(alpha_max,
                      ln(1 + sqrt(eps) / ||grad L(0)||),
                      ln(1 + (max(C1, sqrt(2) C2) beta ||grad L(0)||)
                            ** -min(2 - gamma1, 1 - gamma2/2)))

    and subsequent steps take the minimum of alpha_max, the doubling cap
    2 alpha_k, a term that keeps the interpolation error at the level set
    by alpha_1, and a curvature cap driven by the loss's Lipschitz-Hessian
    constant.  C1 depends on alpha_1 when gamma1 > 1; that circularity is
    resolved by one conservative fixed-point pass (C1 evaluated at
    alpha_max first, then recomputed once).

    ``alpha1_override`` reproduces the benchmarking protocol where the
    initial step is picked directly; overridden runs drop the curvature cap
    (set ``curvature_cap=True`` to keep it) and clamp steps below at
    alpha_k / 2, so the certified-schedule guarantees no longer apply.
    """

    profile: SmoothnessProfile
    grad0_norm: float
    epsilon: float
    t_max: float = math.inf
    alpha_max: float = 0.1
    alpha1_override: float | None = None
    curvature_cap: bool | None = None
    c2: float = field(default=NEWTON_C2, init=False)

    def __post_init__(self):
        if not 0 < self.alpha_max <= 0.1:
            raise ValueError("alpha_max must lie in (0, 1/10]")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.curvature_cap is None:
            self.curvature_cap = self.alpha1_override is None
        if self.alpha1_override is None and self.epsilon is None:
            raise ValueError("need epsilon or an alpha1 override")
        self.alpha1, self.c1 = self._alpha1_and_c1()
        # Termination threshold of the norm criterion.
        self.threshold = (math.expm1(self.alpha1) * self.grad0_norm) ** 2

    @property
    def certified(self) -> bool:
        return self.alpha1_override is None and self.curvature_cap

    def _c1(self, alpha1: float) -> float:
        g1, nu = self.profile.gamma1, self.profile.nu
        if g1 <= 1.0:
            return 15.0
        return 15.0 * min(nu ** (g1 - 1.0),
                          nu ** g1 * math.exp(-alpha1) * (-math.expm1(-alpha1)))

    def _alpha1_and_c1(self):
        if self.alpha1_override is not None:
            alpha1 = min(self.alpha_max, float(self.alpha1_override))
            return alpha1, self._c1(alpha1)
        if self.grad0_norm == 0.0:
            # Degenerate path: theta(t) is identically zero.
            return self.alpha_max, self._c1(self.alpha_max)
        prof = self.profile
        expo = min(2.0 - prof.gamma1, 1.0 - prof.gamma2 / 2.0)

        def third_term(c1):
            base = max(c1, math.sqrt(2.0) * self.c2) * prof.beta * self.grad0_norm
            return math.log1p(base ** -expo)

        term2 = math.log1p(math.sqrt(self.epsilon) / self.grad0_norm)
        alpha1 = min(self.alpha_max, term2, third_term(self._c1(self.alpha_max)))
        c1 = self._c1(alpha1)
        if alpha1 <= 0.0 or not math.isfinite(alpha1):
            raise NumericalError(
                "schedule produced a degenerate initial step; the loss "
                "profile does not support a certified Newton grid")
        return alpha1, c1

    def alpha_next(self, t_k: float, alpha_k: float, theta_norm: float) -> float:
        """Step from grid point k to k+1 (four-way minimum).

        Pure evaluation of the schedule formula; the halving floor
        alpha_{k+1} >= alpha_k / 2 is asserted (or enforced) by the runner.
        """
        prof = self.profile
        terms = [self.alpha_max, 2.0 * alpha_k]
        if theta_norm > 0.0:
            growth = (math.exp(t_k / 2.0) * math.expm1(self.alpha1)
                      * self.grad0_norm * (-math.expm1(-t_k)) / theta_norm)
            terms.append(math.log1p(growth))
            if self.curvature_cap:
                s = math.expm1(t_k)
                cap = (self.c2 * prof.beta * math.exp(t_k)
                       * max(s ** -prof.gamma1, s ** (-1.0 - prof.gamma2 / 2.0))
                       * theta_norm)
                terms.append(math.log1p(1.0 / cap))
        return min(terms)

    def should_stop(self, t_n: float, theta_norm: float):
        if t_n > self.t_max:
            return True, T_EXCEEDED
        if 2.0 * theta_norm ** 2 / math.expm1(t_n) <= self.threshold:
            return True, NORM_CRITERION
        return False, ""


def run_newton_path(obj: RegularizedObjective, sched: NewtonSchedule,
                    cap: int = _OUTER_CAP) -> PathTrace:
    """Follow the solution path with one Newton step per grid point.

    Each iteration makes one fused derivative evaluation and one SPD solve;
    the scaled-gradient norm of grid point k is recorded from the next
    iteration's derivative evaluation (and once more at termination for the
    final point).
    """
    start = time.perf_counter()
    builder = TraceBuilder(method="newton")
    theta = np.zeros(obj.dim)
    if float(np.linalg.norm(obj.loss.gradient(theta))) == 0.0:
        return builder.build(NORM_CRITERION, wall_time=time.perf_counter() - start,
                             dim=obj.dim, alpha1=sched.alpha1)

    def final_g_norm():
        grad = obj.loss.gradient(theta)
        builder.set_last_g_norm(
            float(np.linalg.norm(w1 * grad + w0 * theta)))

    t, alpha = 0.0, sched.alpha1
    w1 = w0 = 0.0
    for k in range(1, cap + 1):
        t_next = t + alpha
        w1_prev, w0_prev = w1, w0
        w1, w0 = -math.expm1(-t_next), math.exp(-t_next)
        grad, hess = obj.loss.derivatives(theta)
        if k > 1:
            builder.set_last_g_norm(
                float(np.linalg.norm(w1_prev * grad + w0_prev * theta)))
        theta = theta - obj.solve_system(t_next, hess, w1 * grad + w0 * theta)
        builder.linear_solves += 1
        builder.append(t_next, alpha, theta, math.nan, inner_steps=1)
        t = t_next

        theta_norm = math.sqrt(float(theta @ theta))
        stop, reason = sched.should_stop(t, theta_norm)
        if stop:
            final_g_norm()
            return builder.build(reason, wall_time=time.perf_counter() - start,
                                 dim=obj.dim, alpha1=sched.alpha1)
        alpha = _next_alpha_checked(sched, t, alpha, theta_norm)
    final_g_norm()
    trace = builder.build(CAP, wall_time=time.perf_counter() - start,
                          dim=obj.dim, alpha1=sched.alpha1)
    raise NonterminationError(
        f"Newton path did not terminate within {cap} steps", trace=trace)


# ---------------------------------------------------------------------------
# Gradient descent schedule
# ---------------------------------------------------------------------------

@dataclass
class GdSchedule:
    """Adaptive gradient-descent grid with backtracking inner loops.

    alpha_1 = min(ln 2, ln(1 + sqrt(eps) / ||grad L(0)||)) and

        alpha_{k+1} = min(ln 2, 2 alpha_k,
                          ln(1 + sqrt(eps) e^{t_k/2} (1-e^{-t_k}) / ||theta_k||)).

    Inner loops stop once ||grad f_{t_k}(theta)|| falls below
    (e^{alpha_k}-1) ||theta|| / (C0 (e^{t_k}-1)) with C0 = 12, which avoids
    prescribing step counts in terms of the unknown smoothness constants.
    """

    grad0_norm: float
    epsilon: float
    t_max: float = math.inf
    alpha1_override: float | None = None
    c0: float = field(default=GD_C0, init=False)
    alpha_max: float = field(default=GD_ALPHA_MAX, init=False)
    backtrack_shrink: float = 0.5
    armijo: float = 1e-4

    def __post_init__(self):
        if self.epsilon is None:
            if self.alpha1_override is None:
                raise ValueError("need epsilon or an alpha1 override")
            # Invert the alpha_1 rule so the rest of the schedule is consistent.
            self.epsilon = (math.expm1(min(self.alpha1_override, self.alpha_max))
                            * self.grad0_norm) ** 2
        elif self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.alpha1_override is not None:
            self.alpha1 = min(self.alpha_max, float(self.alpha1_override))
        elif self.grad0_norm == 0.0:
            self.alpha1 = self.alpha_max
        else:
            self.alpha1 = min(self.alpha_max,
                              math.log1p(math.sqrt(self.epsilon) / self.grad0_norm))

    @property
    def certified(self) -> bool:
        return self.alpha1_override is None

    def alpha_next(self, t_k: float, alpha_k: float, theta_norm: float) -> float:
        terms = [self.alpha_max, 2.0 * alpha_k]
        if theta_norm > 0.0:
            growth = (math.sqrt(self.epsilon) * math.exp(t_k / 2.0)
                      * (-math.expm1(-t_k)) / theta_norm)
            terms.append(math.log1p(growth))
        return min(terms)

    def should_stop(self, t_n: float, theta_norm: float):
        if t_n > self.t_max:
            return True, T_EXCEEDED
        if 2.0 * theta_norm ** 2 / math.expm1(t_n) <= self.epsilon:
            return True, NORM_CRITERION
        return False, ""


def gd_inner(obj: RegularizedObjective, t_k: float, theta_init, alpha_k: float,
             sched: GdSchedule, cap: int = _INNER_CAP):
    """Backtracking gradient descent on f_{t_k} until the relative rule fires.

    Returns (theta, inner_steps); zero steps when the start already passes.
    """
    if t_k <= 0 or alpha_k <= 0:
        raise ValueError("t_k and alpha_k must be positive")
    rel = math.expm1(alpha_k) / (sched.c0 * math.expm1(t_k))
    theta = np.asarray(theta_init, dtype=float)
    f_val, grad = obj.value_and_grad(t_k, theta)
    for steps in range(cap + 1):
        g_norm_sq = float(grad @ grad)
        if math.sqrt(g_norm_sq) <= rel * float(np.linalg.norm(theta)):
            return theta, steps
        noise = 1e-15 * (1.0 + abs(f_val))
        eta = 1.0
        while True:
            candidate = theta - eta * grad
            if obj.loss.contains(candidate):
                f_new = obj.value(t_k, candidate)
                if f_new <= f_val - sched.armijo * eta * g_norm_sq + noise:
                    break
            eta *= sched.backtrack_shrink
            if eta < 1e-18:
                raise ConvergenceError("backtracking stalled in gd_inner")
        theta = candidate
        f_val, grad = obj.value_and_grad(t_k, theta)
    raise ConvergenceError(
        f"gradient descent at t={t_k} exceeded {cap} inner steps")


def run_gd_path(obj: RegularizedObjective, sched: GdSchedule,
                cap: int = _OUTER_CAP) -> PathTrace:
    """Follow the solution path with gradient-descent inner loops."""
    start = time.perf_counter()
    builder = TraceBuilder(method="gd")
    theta = np.zeros(obj.dim)
    if float(np.linalg.norm(obj.loss.gradient(theta))) == 0.0:
        return builder.build(NORM_CRITERION, wall_time=time.perf_counter() - start,
                             dim=obj.dim, alpha1=sched.alpha1)

    t, alpha = 0.0, sched.alpha1
    for k in range(1, cap + 1):
        t_next = t + alpha
        theta, inner = gd_inner(obj, t_next, theta, alpha, sched)
        g_norm = float(np.linalg.norm(obj.grad(t_next, theta)))
        builder.append(t_next, alpha, theta, g_norm, inner_steps=inner)
        t = t_next

        theta_norm = float(np.linalg.norm(theta))
        stop, reason = sched.should_stop(t, theta_norm)
        if stop:
            return builder.build(reason, wall_time=time.perf_counter() - start,
                                 dim=obj.dim, alpha1=sched.alpha1)
        alpha = _next_alpha_checked(sched, t, alpha, theta_norm)
    trace = builder.build(CAP, wall_time=time.perf_counter() - start,
                          dim=obj.dim, alpha1=sched.alpha1)
    raise NonterminationError(
        f"gradient-descent path did not terminate within {cap} steps",
        trace=trace)

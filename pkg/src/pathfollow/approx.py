"""Piecewise-linear approximate paths and their global-error evaluation.

The approximate path linearly interpolates the grid solutions, with the
implicit starting point (0, 0) prepended and a constant extension
theta(t) = theta_N beyond the last grid point.  Global accuracy is
measured by the sup over t of f_t(interpolant) - f_t(exact), estimated by
sampling t uniformly and solving each sampled problem to high accuracy.
The module also evaluates the certified upper bounds on that quantity for
both homotopy methods, fits empirical complexity slopes, measures ODE
orders of accuracy, and computes KL risk curves for the logistic
generative model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .homotopy import GdSchedule, NewtonSchedule
from .objective import T_CAP, RegularizedObjective
from .ode import OdeConfig, run_ode_path
from .trace import NORM_CRITERION, PathTrace

EVAL_HEADER = ("method,epsilon,alpha1,N_grid,total_inner_steps,"
               "sup_subopt,bound_rhs,wall_time_s,seed")
SAMPLES_HEADER = "s_i,gap_i"

_DEGENERATE_ERROR_FLOOR = 1e-13


class ApproxPath:
    """Piecewise-linear interpolant through (0, 0) and the grid solutions."""

    def __init__(self, ts, thetas, t_max: float = math.inf):
        ts = np.asarray(ts, dtype=float)
        thetas = np.asarray(thetas, dtype=float)
        if thetas.ndim != 2 or ts.shape[0] != thetas.shape[0]:
            raise ValueError("need one theta row per grid point")
        if ts.size and (ts[0] <= 0 or np.any(np.diff(ts) <= 0)):
            raise ValueError("grid must be strictly increasing and positive")
        if t_max <= 0:
            raise ValueError("t_max must be positive")
        dim = thetas.shape[1]
        self.ts = np.concatenate([[0.0], ts])
        self.thetas = np.vstack([np.zeros((1, dim)), thetas])
        self.t_max = float(t_max)
        self.dim = dim

    @classmethod
    def from_trace(cls, trace: PathTrace, t_max: float = None) -> "ApproxPath":
        if t_max is None:
            t_max = float(trace.ts[-1]) if len(trace) else math.inf
        return cls(trace.ts, trace.thetas, t_max=t_max)

    @property
    def t_last(self) -> float:
        return float(self.ts[-1])

    def __call__(self, t):
        """Interpolant value(s); accepts a scalar or an array of t's."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t_arr < 0) or np.any(t_arr > self.t_max):
            raise ValueError("t outside [0, t_max]")
        idx = np.searchsorted(self.ts, t_arr, side="right") - 1
        idx = np.clip(idx, 0, len(self.ts) - 2) if len(self.ts) > 1 else idx * 0
        if len(self.ts) == 1:
            out = np.zeros((t_arr.size, self.dim))
        else:
            left_t = self.ts[idx]
            right_t = self.ts[idx + 1]
            frac = np.clip((t_arr - left_t) / (right_t - left_t), 0.0, 1.0)
            beyond = t_arr >= self.ts[-1]
            frac[beyond] = 1.0
            out = ((1.0 - frac)[:, None] * self.thetas[idx]
                   + frac[:, None] * self.thetas[idx + 1])
        return out[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else out


def interpolate_eval(path: ApproxPath, t):
    return path(t)


@dataclass
class EvalReport:
    """Sup-suboptimality estimate plus the matching certified bound."""

    sup_subopt: float
    per_sample: np.ndarray
    bound_rhs: float = math.nan
    steps: int = 0
    total_inner_steps: int = 0
    wall_time: float = 0.0
    method: str = ""
    epsilon: float = math.nan
    alpha1: float = math.nan
    seed: int = 0
    certified: bool = True
    meta: dict = field(default_factory=dict)

    def csv_row(self) -> str:
        return (f"{self.method},{self.epsilon:.17g},{self.alpha1:.17g},"
                f"{self.steps},{self.total_inner_steps},"
                f"{self.sup_subopt:.17g},{self.bound_rhs:.17g},"
                f"{self.wall_time:.6f},{self.seed}")


def write_eval_csv(reports, path):
    with open(path, "w") as fh:
        fh.write(EVAL_HEADER + "\n")
        for report in reports:
            fh.write(report.csv_row() + "\n")


def write_samples_csv(report: EvalReport, path):
    with open(path, "w") as fh:
        fh.write(SAMPLES_HEADER + "\n")
        for s, gap in report.per_sample:
            fh.write(f"{s:.17g},{gap:.17g}\n")


def sup_suboptimality(path: ApproxPath, obj: RegularizedObjective,
                      t_max_eval: float, n_samples: int = 100,
                      ref_tol: float = 1e-10, rng_seed: int = 0) -> EvalReport:
    """Estimate sup_t {f_t(path) - f_t(exact)} from uniform t samples.

    Samples are evaluated in ascending order so each reference solve warm
    starts from the previous one; the report is deterministic given the
    seed.  A gap below -10 * ref_tol would contradict the certified
    accuracy of the reference solver and raises.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if not math.isfinite(t_max_eval) or t_max_eval <= 0:
        raise ValueError("t_max_eval must be positive and finite")
    rng = np.random.default_rng(rng_seed)
    ss = np.sort(rng.uniform(0.0, t_max_eval, size=n_samples))
    approx_thetas = path(ss)
    gaps = np.empty(n_samples)
    theta_warm = None
    for i, s in enumerate(ss):
        ref = obj.solve_exact(float(s), tol=ref_tol, theta_init=theta_warm)
        theta_warm = ref.theta
        gaps[i] = obj.value(float(s), approx_thetas[i]) - obj.value(float(s),
                                                                    ref.theta)
    if gaps.min() < -10.0 * ref_tol:
        raise ValueError(
            f"negative suboptimality gap {gaps.min():.3e} exceeds reference "
            "slack; reference solver accuracy is suspect")
    return EvalReport(sup_subopt=float(gaps.max()),
                      per_sample=np.column_stack([ss, gaps]), seed=rng_seed)


# ---------------------------------------------------------------------------
# Certified bounds
# ---------------------------------------------------------------------------

def _alpha_after(trace: PathTrace, sched) -> float:
    """The step the schedule would take after the final grid point."""
    k = len(trace) - 1
    return sched.alpha_next(float(trace.ts[k]), float(trace.alphas[k]),
                            float(np.linalg.norm(trace.thetas[k])))


def _interp_terms(trace: PathTrace, upto: int, alpha_extra: float = None):
    """e^{-t_k} ((e^{alpha_{k+1}}-1)/(1-e^{-t_k}))^2 ||theta_k||^2, k=1..upto."""
    if upto < 1:
        return np.zeros(0)
    ts = trace.ts[:upto]
    norms_sq = np.einsum("ij,ij->i", trace.thetas[:upto], trace.thetas[:upto])
    next_alphas = list(trace.alphas[1:upto + 1])
    if len(next_alphas) < upto:
        next_alphas.append(alpha_extra)
    next_alphas = np.asarray(next_alphas, dtype=float)
    return (np.exp(-ts) * (np.expm1(next_alphas) / (-np.expm1(-ts))) ** 2
            * norms_sq)


def _theta_at_tmax_norm(obj, trace, t_max, ref_tol):
    warm = trace.thetas[-1] if len(trace) else None
    ref = obj.solve_exact(min(t_max, T_CAP), tol=ref_tol, theta_init=warm)
    return float(np.linalg.norm(ref.theta))


def newton_bound_rhs(trace: PathTrace, sched: NewtonSchedule,
                     obj: RegularizedObjective = None,
                     theta_tmax_norm: float = None,
                     ref_tol: float = 1e-10) -> float:
    """Certified sup-suboptimality bound for a Newton trace.

    Clause selection follows the trace's termination: runs that overshoot
    t_max use the two-term maximum scaled by 8; runs stopped by the norm
    criterion (t_N <= t_max) add the tail term
    2 max(||theta(t_max)||, ||theta_N||)^2 / (e^{t_N} - 1), obtaining
    ||theta(t_max)|| from a reference solve when not supplied.
    """
    first = 8.0 * (math.expm1(sched.alpha1) * sched.grad0_norm) ** 2
    if len(trace) == 0:
        return first
    if trace.termination_reason == NORM_CRITERION:
        middle = _interp_terms(trace, len(trace) - 1)
        if theta_tmax_norm is None:
            if obj is None:
                raise ValueError("need obj or theta_tmax_norm for the "
                                 "norm-criterion clause")
            theta_tmax_norm = _theta_at_tmax_norm(obj, trace, sched.t_max,
                                                  ref_tol)
        theta_n = float(np.linalg.norm(trace.thetas[-1]))
        tail = (2.0 * max(theta_tmax_norm, theta_n) ** 2
                / math.expm1(float(trace.ts[-1])))
        candidates = [first, tail]
        if middle.size:
            candidates.append(8.0 * float(middle.max()))
        return max(candidates)
    middle = _interp_terms(trace, len(trace), _alpha_after(trace, sched))
    return max(first, 8.0 * float(middle.max()))


def gd_bound_rhs(trace: PathTrace, sched: GdSchedule,
                 obj: RegularizedObjective = None,
                 theta_tmax_norm: float = None,
                 ref_tol: float = 1e-10) -> float:
    """Certified sup-suboptimality bound for a gradient-descent trace."""
    first = 2.0 * (math.expm1(sched.alpha1) * sched.grad0_norm) ** 2
    if len(trace) == 0:
        return first
    middle = _interp_terms(trace, len(trace) - 1)
    candidates = [first]
    if middle.size:
        candidates.append(2.0 * float(middle.max()))
    if trace.termination_reason == NORM_CRITERION:
        if theta_tmax_norm is None:
            if obj is None:
                raise ValueError("need obj or theta_tmax_norm for the "
                                 "norm-criterion clause")
            theta_tmax_norm = _theta_at_tmax_norm(obj, trace, sched.t_max,
                                                  ref_tol)
        candidates.append(theta_tmax_norm ** 2
                          / math.expm1(float(trace.ts[-1])))
    return max(candidates)


def gd_inner_requirement(m: float, L: float, t_k: float, t_next: float,
                         eta: float) -> float:
    """Lower bound on the number of inner gradient steps at grid point k+1.

    Uses m_k = m (1-e^{-t_k}) + e^{-t_k} and L_k likewise:

        n_{k+1} >= (log 24 + max(0, log(L_{k+1}/m_k)))
                   / (-log(1 - 2 m_{k+1} L_{k+1} eta / (m_{k+1} + L_{k+1})))

    valid for eta <= 2 / (m_{k+1} + L_{k+1}).  This is a bound-evaluation
    helper only; the solvers control their inner loops with the relative
    stopping rule instead, which needs no smoothness constants.
    """
    m_prev = m * (-math.expm1(-t_k)) + math.exp(-t_k)
    m_next = m * (-math.expm1(-t_next)) + math.exp(-t_next)
    L_next = L * (-math.expm1(-t_next)) + math.exp(-t_next)
    if eta > 2.0 / (m_next + L_next):
        raise ValueError("eta exceeds 2 / (m_{k+1} + L_{k+1})")
    rate = 1.0 - 2.0 * m_next * L_next * eta / (m_next + L_next)
    if rate <= 0.0:
        return 1.0
    return ((math.log(24.0) + max(0.0, math.log(L_next / m_prev)))
            / -math.log(rate))


def opt_interp_terms(trace: PathTrace):
    """Optimization and interpolation error terms per consecutive grid pair.

    Returns (lhs, rhs) arrays over k = 1..N-1 where lhs is
    e^{t_{k+1}} max(((1-e^{-t_{k+1}})/(1-e^{-t_k}))^2 g_k^2, g_{k+1}^2) and
    rhs is the matching interpolation term; on a conforming Newton trace
    lhs stays within a constant factor of rhs.
    """
    n = len(trace)
    if n < 2:
        return np.zeros(0), np.zeros(0)
    t_k, t_next = trace.ts[:-1], trace.ts[1:]
    g_k, g_next = trace.g_norms[:-1], trace.g_norms[1:]
    norms_sq = np.einsum("ij,ij->i", trace.thetas, trace.thetas)
    ratio = (-np.expm1(-t_next)) / (-np.expm1(-t_k))
    lhs = np.exp(t_next) * np.maximum((ratio * g_k) ** 2, g_next ** 2)
    interp = (np.exp(-t_k) - np.exp(-t_next)) ** 2 * np.maximum(
        np.exp(t_next) * norms_sq[:-1] / (-np.expm1(-t_k)) ** 2,
        np.exp(t_k) * norms_sq[1:] / (-np.expm1(-t_next)) ** 2)
    return lhs, interp


# ---------------------------------------------------------------------------
# Empirical rates
# ---------------------------------------------------------------------------

def complexity_slope(points) -> float:
    """Least-squares slope of log(steps) against log(1/epsilon)."""
    points = list(points)
    if len(points) < 3:
        raise ValueError("need at least three (epsilon, steps) points")
    eps = np.array([float(e) for e, _ in points])
    steps = np.array([float(s) for _, s in points])
    if len(np.unique(eps)) != len(eps) or np.any(eps <= 0):
        raise ValueError("epsilon values must be positive and distinct")
    if np.any(steps <= 0):
        raise ValueError("step counts must be positive")
    slope, _ = np.polyfit(np.log(1.0 / eps), np.log(steps), 1)
    return float(slope)


def ode_order_estimate(obj: RegularizedObjective, method: str, alphas,
                       t_max: float, ref_tol: float = 1e-10) -> float:
    """Empirical order: slope of log(max path error) against log(alpha).

    Step sizes must form a halving ladder.  Returns NaN when the measured
    errors sit at reference-noise level (an exactly integrable problem),
    where the order is undefined.
    """
    alphas = sorted((float(a) for a in alphas), reverse=True)
    if len(alphas) < 2:
        raise ValueError("need at least two step sizes")
    for big, small in zip(alphas, alphas[1:]):
        if not 1.9 <= big / small <= 2.1:
            raise ValueError("step sizes must successively halve")
    errors = []
    for alpha in alphas:
        trace = run_ode_path(obj, OdeConfig(alpha=alpha, t_max=t_max,
                                            method=method))
        refs = obj.reference_sweep(trace.ts, tol=ref_tol)
        err = max(float(np.linalg.norm(theta - ref.theta))
                  for theta, ref in zip(trace.thetas, refs))
        errors.append(err)
    if min(errors) < _DEGENERATE_ERROR_FLOOR:
        return math.nan
    slope, _ = np.polyfit(np.log(alphas), np.log(errors), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# Statistical risk
# ---------------------------------------------------------------------------

def risk_kl(path: ApproxPath, theta_true, mc_samples: int, rng_seed: int,
            t_grid=None):
    """Monte-Carlo KL risk curve of a path under the logistic model.

    Fresh draws X ~ N(0, I), Y | X ~ logistic(theta_true); the risk at t is
    E ln(1 + e^{-Y X' path(t)}) - E ln(1 + e^{-Y X' theta_true}), estimated
    with common random numbers across the whole grid.
    """
    if mc_samples < 1:
        raise ValueError("mc_samples must be >= 1")
    theta_true = np.asarray(theta_true, dtype=float)
    rng = np.random.default_rng(rng_seed)
    if t_grid is None:
        t_grid = path.ts[1:] if len(path.ts) > 1 else path.ts
    t_grid = np.asarray(t_grid, dtype=float)
    X = rng.standard_normal((mc_samples, theta_true.size))
    margins_true = X @ theta_true
    prob_pos = 1.0 / (1.0 + np.exp(-margins_true))
    y = np.where(rng.uniform(size=mc_samples) < prob_pos, 1.0, -1.0)
    base = np.mean(np.logaddexp(0.0, -y * margins_true))
    thetas = path(t_grid)
    signed = (X @ thetas.T) * y[:, None]
    risks = np.logaddexp(0.0, -signed).mean(axis=0) - base
    return [(float(t), float(r)) for t, r in zip(t_grid, risks)]

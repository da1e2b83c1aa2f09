"""Experiment matrix execution and CSV persistence.

A run is a matrix of cells (scenario x method x epsilon x seed).  Cells are
independent and deterministic, execute in a worker pool capped by the
``PATHFOLLOW_THREADS`` environment variable, and write their output files
atomically (temp file + rename) so reruns into the same directory are
idempotent.
"""

from __future__ import annotations

import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .approx import (ApproxPath, EvalReport, gd_bound_rhs, newton_bound_rhs,
                     sup_suboptimality, write_eval_csv, write_samples_csv)
from .datagen import (gen_generative, gen_nonseparable, gen_regression,
                      gen_separable)
from .exceptions import PathfollowError
from .homotopy import GdSchedule, NewtonSchedule, run_gd_path, run_newton_path
from .losses import LogisticLoss, SquaredErrorLoss
from .objective import RegularizedObjective
from .ode import OdeConfig, rosset_path, run_ode_path

SCENARIOS = ("nonseparable", "separable", "regression", "generative")
METHODS = ("newton", "gd", "euler", "rk2", "rosset")

THREADS_ENV = "PATHFOLLOW_THREADS"


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment request; lists fan out into the cell matrix."""

    scenario: str = "nonseparable"
    n: int = 200
    p: int = 20
    sigma2: float = 1.0
    methods: tuple = ("newton",)
    epsilons: tuple = (1e-3,)
    seeds: tuple = (1,)
    alpha1: float | None = None
    alpha: float | None = None
    alpha_max: float = 0.1
    t_max: float = 10.0
    samples: int = 100
    ref_tol: float = 1e-10
    mc_samples: int = 2000
    out: str = "results"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.n < 1 or self.p < 1:
            raise ValueError("need n >= 1 and p >= 1")
        if any(eps <= 0 for eps in self.epsilons):
            raise ValueError("epsilon values must be positive")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")
        for method in self.methods:
            if method not in METHODS:
                raise ValueError(f"unknown method {method!r}")


def make_problem(scenario: str, n: int, p: int, sigma2: float, seed: int):
    """(dataset, truth vector or None, loss) for one scenario draw."""
    if scenario == "nonseparable":
        dataset, mu = gen_nonseparable(n, p, seed)
        return dataset, mu, LogisticLoss(dataset)
    if scenario == "separable":
        dataset = gen_separable(n, p, seed)
        return dataset, None, LogisticLoss(dataset)
    if scenario == "regression":
        dataset, theta_star = gen_regression(n, p, sigma2, seed)
        return dataset, theta_star, SquaredErrorLoss(dataset)
    if scenario == "generative":
        dataset, theta_true = gen_generative(n, p, seed)
        return dataset, theta_true, LogisticLoss(dataset)
    raise ValueError(f"unknown scenario {scenario!r}")


def atomic_write(path, write_fn):
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    os.close(fd)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _eval_t_max(config: ExperimentConfig, trace) -> float:
    if math.isfinite(config.t_max):
        return config.t_max
    return float(trace.ts[-1]) if len(trace) else 1.0


def run_method(obj: RegularizedObjective, loss, method: str, epsilon: float,
               config: ExperimentConfig):
    """Run one solver; returns (trace, schedule or None)."""
    grad0 = float(np.linalg.norm(loss.gradient(np.zeros(loss.dim))))
    if method == "newton":
        sched = NewtonSchedule(profile=loss.smoothness_profile(),
                               grad0_norm=grad0, epsilon=epsilon,
                               t_max=config.t_max, alpha_max=config.alpha_max,
                               alpha1_override=config.alpha1)
        return run_newton_path(obj, sched), sched
    if method == "gd":
        sched = GdSchedule(grad0_norm=grad0, epsilon=epsilon,
                           t_max=config.t_max, alpha1_override=config.alpha1)
        return run_gd_path(obj, sched), sched
    if method in ("euler", "rk2"):
        if not math.isfinite(config.t_max):
            raise PathfollowError("ODE methods need a finite t_max")
        alpha = config.alpha if config.alpha is not None else 0.1
        return run_ode_path(obj, OdeConfig(alpha=alpha, t_max=config.t_max,
                                           method=method)), None
    if method == "rosset":
        alpha = config.alpha if config.alpha is not None else 0.1
        n_steps = max(2, int(math.ceil(config.t_max / alpha)))
        return rosset_path(obj, n_steps, t_min=alpha, t_max=config.t_max,
                           ref_tol=config.ref_tol), None
    raise ValueError(f"unknown method {method!r}")


def evaluate_trace(trace, sched, obj, method: str, epsilon: float,
                   config: ExperimentConfig, seed: int) -> EvalReport:
    path = ApproxPath.from_trace(trace, t_max=config.t_max)
    report = sup_suboptimality(path, obj, _eval_t_max(config, trace),
                               n_samples=config.samples,
                               ref_tol=config.ref_tol, rng_seed=seed)
    bound = math.nan
    certified = True
    if method == "newton":
        bound = newton_bound_rhs(trace, sched, obj, ref_tol=config.ref_tol)
        certified = math.isfinite(config.t_max)
    elif method == "gd":
        bound = gd_bound_rhs(trace, sched, obj, ref_tol=config.ref_tol)
        certified = math.isfinite(config.t_max)
    report.method = method
    report.epsilon = epsilon if epsilon is not None else math.nan
    report.alpha1 = (float(trace.alphas[0]) if len(trace)
                     else (sched.alpha1 if sched else math.nan))
    report.steps = len(trace)
    report.total_inner_steps = trace.total_inner_steps
    report.wall_time = trace.wall_time
    report.bound_rhs = bound
    report.seed = seed
    report.certified = certified
    return report


def cell_tag(scenario: str, method: str, epsilon, seed: int) -> str:
    eps_part = f"{epsilon:g}" if epsilon is not None else "na"
    return f"{scenario}_{method}_eps{eps_part}_seed{seed}"


def run_cell(config: ExperimentConfig, method: str, epsilon: float,
             seed: int) -> EvalReport:
    """One cell: generate data, solve, evaluate, persist trace and samples."""
    _, _, loss = make_problem(config.scenario, config.n, config.p,
                              config.sigma2, seed)
    obj = RegularizedObjective(loss)
    trace, sched = run_method(obj, loss, method, epsilon, config)
    report = evaluate_trace(trace, sched, obj, method, epsilon, config, seed)
    tag = cell_tag(config.scenario, method, epsilon, seed)
    atomic_write(os.path.join(config.out, f"trace_{tag}.csv"),
                 lambda tmp: trace.to_csv(tmp))
    atomic_write(os.path.join(config.out, f"samples_{tag}.csv"),
                 lambda tmp: write_samples_csv(report, tmp))
    return report


def _cell_entry(args):
    config, method, epsilon, seed = args
    try:
        return None, run_cell(config, method, epsilon, seed)
    except Exception as exc:  # noqa: BLE001 - per-cell failures are recorded
        return f"{cell_tag(config.scenario, method, epsilon, seed)}: {exc}", None


def worker_count(n_cells: int) -> int:
    env = os.environ.get(THREADS_ENV)
    if env is not None:
        cap = max(1, int(env))
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_cells))


def run_matrix(config: ExperimentConfig):
    """Run the full cell matrix; returns (reports, failures)."""
    cells = [(config, method, epsilon, seed)
             for method in config.methods
             for epsilon in config.epsilons
             for seed in config.seeds]
    workers = worker_count(len(cells))
    if workers == 1:
        outcomes = [_cell_entry(cell) for cell in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_cell_entry, cells))
    failures = [err for err, _ in outcomes if err is not None]
    reports = [report for _, report in outcomes if report is not None]
    atomic_write(os.path.join(config.out, "summary.csv"),
                 lambda tmp: write_eval_csv(reports, tmp))
    return reports, failures


# ---------------------------------------------------------------------------
# Matched-budget comparison protocol
# ---------------------------------------------------------------------------

def run_comparison(config: ExperimentConfig, alpha1: float, seed: int,
                   methods=("newton", "rk2", "euler", "rosset")):
    """Equal linear-solve budget comparison against the Newton run.

    The Newton run (initial step ``alpha1``) fixes N; Euler then uses the
    constant step t_max / N, the two-solve Runge-Kutta uses twice that, and
    the ridge-weight baseline uses N grid points, so all four spend the
    same number of linear solves up to the final partial step.
    """
    if not math.isfinite(config.t_max):
        raise PathfollowError("comparison needs a finite t_max")
    _, _, loss = make_problem(config.scenario, config.n, config.p,
                              config.sigma2, seed)
    obj = RegularizedObjective(loss)
    grad0 = float(np.linalg.norm(loss.gradient(np.zeros(loss.dim))))
    sched = NewtonSchedule(profile=loss.smoothness_profile(),
                           grad0_norm=grad0, epsilon=None, t_max=config.t_max,
                           alpha_max=config.alpha_max, alpha1_override=alpha1)
    newton_trace = run_newton_path(obj, sched)
    n_newton = len(newton_trace)
    alpha = config.t_max / n_newton

    traces = {}
    for method in methods:
        if method == "newton":
            traces[method] = (newton_trace, sched)
        elif method == "euler":
            traces[method] = (run_ode_path(obj, OdeConfig(
                alpha=alpha, t_max=config.t_max, method="euler")), None)
        elif method == "rk2":
            traces[method] = (run_ode_path(obj, OdeConfig(
                alpha=min(2.0 * alpha, config.t_max), t_max=config.t_max,
                method="rk2")), None)
        elif method == "rosset":
            traces[method] = (rosset_path(
                obj, max(2, n_newton), t_min=float(newton_trace.ts[0]),
                t_max=config.t_max, ref_tol=config.ref_tol), None)
        else:
            raise ValueError(f"method {method!r} not part of the comparison")

    reports = {}
    for method, (trace, method_sched) in traces.items():
        report = evaluate_trace(trace, method_sched, obj, method, None,
                                config, seed)
        report.alpha1 = alpha1
        report.meta["linear_solves"] = trace.linear_solves
        reports[method] = report
    return reports

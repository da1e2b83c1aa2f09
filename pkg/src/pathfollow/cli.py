"""Command line interface.

Subcommands: solve-path, compare, complexity, risk, verify-a1, gen-data.
A JSON config file (--config) may preload any experiment field; explicit
flags override config values.  Exit codes: 0 on success, 1 when any cell
fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .a1 import check_assumption_a1
from .approx import ApproxPath, complexity_slope, risk_kl, write_eval_csv
from .data import save_dataset_csv
from .exceptions import PathfollowError
from .losses import (EntropyBarrierLoss, ExponentialLoss, LogBarrierLoss,
                     ScalarLogisticLoss, SquareLoss)
from .objective import RegularizedObjective
from .runner import (ExperimentConfig, atomic_write, make_problem,
                     run_comparison, run_matrix)

USAGE_ERROR = 2


def _float_list(text):
    return tuple(float(x) for x in text.split(",") if x)


def _int_list(text):
    return tuple(int(x) for x in text.split(",") if x)


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file; flags override")
    parser.add_argument("--scenario", choices=("nonseparable", "separable",
                                               "regression", "generative"))
    parser.add_argument("--loss", choices=("logistic", "squared"),
                        help="informational; the scenario fixes the loss")
    parser.add_argument("--n", type=int)
    parser.add_argument("--p", type=int)
    parser.add_argument("--sigma2", type=float)
    parser.add_argument("--t-max", type=float, dest="t_max")
    parser.add_argument("--alpha1", type=float)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--alpha-max", type=float, dest="alpha_max")
    parser.add_argument("--samples", type=int)
    parser.add_argument("--ref-tol", type=float, dest="ref_tol")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--seeds", type=_int_list)
    parser.add_argument("--out")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pathfollow",
        description="Approximate l2-regularized solution paths and "
                    "benchmark the path-following methods")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve-path", help="run solvers over an experiment "
                                           "matrix and evaluate each path")
    _add_common(sp)
    sp.add_argument("--method", dest="methods", type=lambda s: tuple(s.split(",")))
    sp.add_argument("--methods", dest="methods", type=lambda s: tuple(s.split(",")))
    sp.add_argument("--epsilon", dest="epsilons", type=_float_list)
    sp.add_argument("--epsilons", dest="epsilons", type=_float_list)

    cp = sub.add_parser("compare", help="matched linear-solve budget "
                                        "comparison against the Newton run")
    _add_common(cp)
    cp.add_argument("--methods", type=lambda s: tuple(s.split(",")),
                    default=("newton", "rk2", "euler", "rosset"))
    cp.add_argument("--match-budget", default="newton",
                    choices=("newton",), help="budget-setting method")
    cp.add_argument("--alpha1s", type=_float_list, default=(0.1,))

    cx = sub.add_parser("complexity", help="steps versus target "
                                           "suboptimality slope")
    _add_common(cx)
    cx.add_argument("--method", default="newton", choices=("newton", "gd"))
    cx.add_argument("--epsilons", type=_float_list,
                    default=(1e-2, 3e-3, 1e-3, 3e-4, 1e-4))

    rk = sub.add_parser("risk", help="KL risk curves under the logistic "
                                     "generative model")
    _add_common(rk)
    rk.add_argument("--methods", type=lambda s: tuple(s.split(",")),
                    default=("newton", "rk2", "euler"))
    rk.add_argument("--mc-samples", type=int, dest="mc_samples")
    rk.add_argument("--grid-points", type=int, default=100)

    va = sub.add_parser("verify-a1", help="sampling check of the local "
                                          "Lipschitz-Hessian condition")
    _add_common(va)
    va.add_argument("--a1-loss", default="logistic",
                    choices=("logistic", "scalar-logistic", "exponential",
                             "square", "log-barrier", "entropy-barrier"))
    va.add_argument("--beta-scale", type=float, default=1.0)

    gd = sub.add_parser("gen-data", help="write a scenario dataset as CSV")
    _add_common(gd)
    return parser


def load_config(args) -> ExperimentConfig:
    base = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            base = json.load(fh)
        unknown = set(base) - set(ExperimentConfig.__dataclass_fields__)
        if unknown:
            raise PathfollowError(f"unknown config keys: {sorted(unknown)}")
    overrides = {}
    for key in ("scenario", "n", "p", "sigma2", "t_max", "alpha1", "alpha",
                "alpha_max", "samples", "ref_tol", "out", "seeds",
                "mc_samples"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "seed", None) is not None and "seeds" not in overrides:
        overrides["seeds"] = (args.seed,)
    for key in ("methods", "epsilons"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = tuple(value)
    merged = {**base, **overrides}
    for key in ("methods", "epsilons", "seeds"):
        if key in merged:
            merged[key] = tuple(merged[key])
    return ExperimentConfig(**merged)


def cmd_solve_path(args) -> int:
    config = load_config(args)
    reports, failures = run_matrix(config)
    for report in reports:
        print(f"{report.method} eps={report.epsilon:g} seed={report.seed}: "
              f"N={report.steps} inner={report.total_inner_steps} "
              f"sup_subopt={report.sup_subopt:.3e} bound={report.bound_rhs:.3e}")
    for failure in failures:
        print(f"FAILED {failure}", file=sys.stderr)
    print(f"wrote {os.path.join(config.out, 'summary.csv')}")
    return 1 if failures else 0


def cmd_compare(args) -> int:
    config = load_config(args)
    reports = []
    failures = []
    for alpha1 in args.alpha1s:
        for seed in config.seeds:
            try:
                by_method = run_comparison(config, alpha1, seed,
                                           methods=args.methods)
            except Exception as exc:  # noqa: BLE001
                failures.append(f"alpha1={alpha1} seed={seed}: {exc}")
                continue
            reports.extend(by_method.values())
            ordered = sorted(by_method, key=lambda m: by_method[m].sup_subopt)
            print(f"alpha1={alpha1} seed={seed}: "
                  + " <= ".join(ordered)
                  + "  (" + ", ".join(
                        f"{m}={by_method[m].sup_subopt:.3e}"
                        for m in args.methods) + ")")
    atomic_write(os.path.join(config.out, "compare.csv"),
                 lambda tmp: write_eval_csv(reports, tmp))
    print(f"wrote {os.path.join(config.out, 'compare.csv')}")
    for failure in failures:
        print(f"FAILED {failure}", file=sys.stderr)
    return 1 if failures else 0


def cmd_complexity(args) -> int:
    config = load_config(args)
    config = ExperimentConfig(**{**config.__dict__,
                                 "methods": (args.method,),
                                 "epsilons": tuple(args.epsilons),
                                 "extra": {}})
    reports, failures = run_matrix(config)
    rows = {}
    lines = ["method,epsilon,steps,sup_subopt,wall_time_s,seed"]
    for report in reports:
        steps = (report.total_inner_steps if args.method == "gd"
                 else report.steps)
        rows.setdefault(report.epsilon, []).append(steps)
        lines.append(f"{report.method},{report.epsilon:g},{steps},"
                     f"{report.sup_subopt:.17g},{report.wall_time:.6f},"
                     f"{report.seed}")
    out_path = os.path.join(config.out, "complexity.csv")
    atomic_write(out_path,
                 lambda tmp: open(tmp, "w").write("\n".join(lines) + "\n"))
    points = [(eps, float(np.mean(steps))) for eps, steps in sorted(rows.items())]
    slope = complexity_slope(points)
    print(f"method={args.method} slope={slope:.4f} over "
          + ", ".join(f"eps={eps:g}:steps={steps:.0f}" for eps, steps in points))
    print(f"wrote {out_path}")
    for failure in failures:
        print(f"FAILED {failure}", file=sys.stderr)
    return 1 if failures else 0


def cmd_risk(args) -> int:
    config = load_config(args)
    if config.scenario != "generative":
        config = ExperimentConfig(**{**config.__dict__,
                                     "scenario": "generative", "extra": {}})
    seed = config.seeds[0]
    _, theta_true, loss = make_problem("generative", config.n, config.p,
                                       config.sigma2, seed)
    obj = RegularizedObjective(loss)
    t_grid = np.linspace(config.t_max / args.grid_points, config.t_max,
                         args.grid_points)
    lines = ["method,alpha1,t,risk"]

    refs = obj.reference_sweep(t_grid, tol=config.ref_tol)
    exact_path = ApproxPath(t_grid, np.array([r.theta for r in refs]),
                            t_max=config.t_max)
    for t, risk in risk_kl(exact_path, theta_true, config.mc_samples,
                           seed, t_grid=t_grid):
        lines.append(f"exact,nan,{t:.17g},{risk:.17g}")

    from .runner import run_method
    for method in args.methods:
        trace, _ = run_method(obj, loss, method, 1e-3, config)
        path = ApproxPath.from_trace(trace, t_max=config.t_max)
        alpha1 = float(trace.alphas[0]) if len(trace) else math.nan
        for t, risk in risk_kl(path, theta_true, config.mc_samples, seed,
                               t_grid=t_grid):
            lines.append(f"{method},{alpha1:.17g},{t:.17g},{risk:.17g}")
    out_path = os.path.join(config.out, "risk.csv")
    atomic_write(out_path,
                 lambda tmp: open(tmp, "w").write("\n".join(lines) + "\n"))
    print(f"wrote {out_path}")
    return 0


def _a1_loss(args, config):
    name = args.a1_loss
    if name == "logistic":
        _, _, loss = make_problem(config.scenario if config.scenario in
                                  ("nonseparable", "separable", "generative")
                                  else "nonseparable",
                                  config.n, config.p, config.sigma2,
                                  config.seeds[0])
        return loss
    return {"scalar-logistic": ScalarLogisticLoss,
            "exponential": ExponentialLoss,
            "square": SquareLoss,
            "log-barrier": LogBarrierLoss,
            "entropy-barrier": EntropyBarrierLoss}[name]()


def cmd_verify_a1(args) -> int:
    config = load_config(args)
    loss = _a1_loss(args, config)
    profile = loss.smoothness_profile().scaled_beta(args.beta_scale)
    report = check_assumption_a1(loss, profile, config.samples,
                                 config.seeds[0])
    print(f"loss={args.a1_loss} beta={profile.beta:g} "
          f"gamma1={profile.gamma1:g} gamma2={profile.gamma2:g} "
          f"samples={report.samples} violations={report.violations} "
          f"worst_ratio={report.worst_ratio:.6g}")
    out_path = os.path.join(config.out, "a1_report.csv")
    atomic_write(out_path, lambda tmp: open(tmp, "w").write(
        "loss,beta,gamma1,gamma2,samples,violations,worst_ratio\n"
        f"{args.a1_loss},{profile.beta:.17g},{profile.gamma1:g},"
        f"{profile.gamma2:g},{report.samples},{report.violations},"
        f"{report.worst_ratio:.17g}\n"))
    return 0


def cmd_gen_data(args) -> int:
    config = load_config(args)
    seed = config.seeds[0]
    dataset, truth, _ = make_problem(config.scenario, config.n, config.p,
                                     config.sigma2, seed)
    os.makedirs(config.out, exist_ok=True)
    data_path = os.path.join(config.out,
                             f"data_{config.scenario}_seed{seed}.csv")
    atomic_write(data_path, lambda tmp: save_dataset_csv(dataset, tmp))
    print(f"wrote {data_path}")
    if truth is not None:
        truth_path = data_path.replace(".csv", ".truth.csv")
        atomic_write(truth_path,
                     lambda tmp: np.savetxt(tmp, truth, fmt="%.17g"))
        print(f"wrote {truth_path}")
    return 0


_COMMANDS = {
    "solve-path": cmd_solve_path,
    "compare": cmd_compare,
    "complexity": cmd_complexity,
    "risk": cmd_risk,
    "verify-a1": cmd_verify_a1,
    "gen-data": cmd_gen_data,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (PathfollowError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())

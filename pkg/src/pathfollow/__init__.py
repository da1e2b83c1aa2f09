"""Approximate l2-regularized solution paths for smooth convex losses.

The solution path theta(t) minimizes (e^t - 1) L_n(theta) + ||theta||^2/2
as t sweeps [0, infinity).  This package computes piecewise-linear
approximations of the whole path with adaptive Newton and gradient-descent
homotopy methods or constant-step ODE integrators, certifies their global
suboptimality, and ships the benchmark protocols comparing them.
"""

__version__ = "0.1.0"

from .a1 import A1Report, check_assumption_a1
from .approx import (ApproxPath, EvalReport, complexity_slope, gd_bound_rhs,
                     gd_inner_requirement, interpolate_eval, newton_bound_rhs,
                     ode_order_estimate, opt_interp_terms, risk_kl,
                     sup_suboptimality)
from .data import Dataset, load_dataset_csv, save_dataset_csv
from .datagen import (gen_generative, gen_nonseparable, gen_regression,
                      gen_separable)
from .estimators import LogisticSolutionPath, RidgeSolutionPath
from .exceptions import (ConvergenceError, DomainError, NonterminationError,
                         NumericalError, PathfollowError, UnsupportedLossError)
from .homotopy import (GdSchedule, NewtonSchedule, gd_inner, newton_step,
                       newton_step_from_gradient, run_gd_path, run_newton_path)
from .losses import (AffineLoss, EntropyBarrierLoss, ExponentialLoss,
                     LogBarrierLoss, LogisticLoss, LossModel,
                     ScalarLogisticLoss, SmoothnessProfile, SquaredErrorLoss,
                     SquareLoss, WeightedSumLoss, loss_derivatives, loss_value,
                     psd_power, smoothness_profile)
from .objective import (ReferencePoint, RegularizedObjective, T_CAP)
from .ode import OdeConfig, euler_step, rk2_step, rosset_path, run_ode_path
from .runner import ExperimentConfig, run_comparison, run_matrix
from .trace import PathIterate, PathTrace

__all__ = [name for name in dir() if not name.startswith("_")]

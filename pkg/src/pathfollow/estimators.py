"""Estimator-style front end so the path solvers compose with ML pipelines.

The classes follow the scikit-learn protocol (``get_params``/``set_params``
derived from the constructor signature, ``fit``/``predict``/``score``)
without depending on scikit-learn itself.  ``fit`` computes the whole
regularization path; predictions are made at a chosen point ``t`` on it.
"""

from __future__ import annotations

import inspect
import math

import numpy as np

from ._validation import (check_array_2d, check_classification_labels,
                          check_vector)
from .approx import ApproxPath
from .data import Dataset
from .homotopy import GdSchedule, NewtonSchedule, run_gd_path, run_newton_path
from .losses import LogisticLoss, SquaredErrorLoss
from .objective import RegularizedObjective
from .ode import OdeConfig, run_ode_path


class BaseEstimator:
    """Minimal scikit-learn compatible parameter handling."""

    @classmethod
    def _param_names(cls):
        signature = inspect.signature(cls.__init__)
        return [name for name, param in signature.parameters.items()
                if name != "self"
                and param.kind is not inspect.Parameter.VAR_KEYWORD]

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"invalid parameter {name!r} for "
                                 f"{type(self).__name__}")
            setattr(self, name, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"

    def _check_fitted(self):
        if not hasattr(self, "path_"):
            raise RuntimeError(f"{type(self).__name__} is not fitted yet")


class _SolutionPathMixin:
    """Shared fitting machinery over a dataset-backed loss."""

    def _run(self, loss):
        obj = RegularizedObjective(loss)
        grad0 = float(np.linalg.norm(loss.gradient(np.zeros(loss.dim))))
        method = self.method
        if method == "newton":
            sched = NewtonSchedule(profile=loss.smoothness_profile(),
                                   grad0_norm=grad0, epsilon=self.epsilon,
                                   t_max=self.t_max,
                                   alpha1_override=self.alpha1)
            trace = run_newton_path(obj, sched)
        elif method == "gd":
            sched = GdSchedule(grad0_norm=grad0, epsilon=self.epsilon,
                               t_max=self.t_max, alpha1_override=self.alpha1)
            trace = run_gd_path(obj, sched)
        elif method in ("euler", "rk2"):
            if not math.isfinite(self.t_max):
                raise ValueError("ODE methods need a finite t_max")
            alpha = self.alpha if self.alpha is not None else 0.1
            trace = run_ode_path(obj, OdeConfig(alpha=alpha, t_max=self.t_max,
                                                method=method))
        else:
            raise ValueError(f"unknown method {method!r}")
        self.objective_ = obj
        self.trace_ = trace
        self.path_ = ApproxPath.from_trace(trace, t_max=self.t_max)
        self.ts_ = self.path_.ts
        self.coefs_ = self.path_.thetas
        return self

    def coef_at(self, t=None) -> np.ndarray:
        """Coefficients at path position t (default: end of the path)."""
        self._check_fitted()
        if t is None:
            t = (self.path_.t_max if math.isfinite(self.path_.t_max)
                 else self.path_.t_last)
        return self.path_(float(t))


class LogisticSolutionPath(BaseEstimator, _SolutionPathMixin):
    """Binary classifier exposing the whole l2-regularized logistic path.

    Parameters mirror the solver knobs: ``method`` is one of ``newton``,
    ``gd``, ``euler`` or ``rk2``; ``epsilon`` is the target path
    suboptimality for the homotopy methods; ``alpha`` the constant step for
    the ODE methods; ``alpha1`` optionally pins the initial step.
    """

    def __init__(self, method="newton", epsilon=1e-3, t_max=10.0,
                 alpha1=None, alpha=None):
        self.method = method
        self.epsilon = epsilon
        self.t_max = t_max
        self.alpha1 = alpha1
        self.alpha = alpha

    def fit(self, X, y):
        X = check_array_2d(X)
        y, self.classes_ = check_classification_labels(y)
        check_vector(y, X.shape[0])
        return self._run(LogisticLoss(Dataset(X=X, y=y)))

    def decision_function(self, X, t=None):
        self._check_fitted()
        X = check_array_2d(X)
        return X @ self.coef_at(t)

    def predict(self, X, t=None):
        scores = self.decision_function(X, t)
        return np.where(scores >= 0, self.classes_[1], self.classes_[0])

    def predict_proba(self, X, t=None):
        scores = self.decision_function(X, t)
        pos = 1.0 / (1.0 + np.exp(-scores))
        return np.column_stack([1.0 - pos, pos])

    def score(self, X, y, t=None):
        y_mapped, _ = check_classification_labels(y)
        predicted = self.predict(X, t)
        predicted_mapped = np.where(predicted == self.classes_[1], 1.0, -1.0)
        return float(np.mean(predicted_mapped == y_mapped))


class RidgeSolutionPath(BaseEstimator, _SolutionPathMixin):
    """Regressor exposing the whole l2-regularized least-squares path."""

    def __init__(self, method="newton", epsilon=1e-3, t_max=10.0,
                 alpha1=None, alpha=None):
        self.method = method
        self.epsilon = epsilon
        self.t_max = t_max
        self.alpha1 = alpha1
        self.alpha = alpha

    def fit(self, X, y):
        X = check_array_2d(X)
        y = check_vector(y, X.shape[0])
        return self._run(SquaredErrorLoss(Dataset(X=X, y=y)))

    def predict(self, X, t=None):
        self._check_fitted()
        X = check_array_2d(X)
        return X @ self.coef_at(t)

    def score(self, X, y, t=None):
        y = check_vector(y)
        residual = y - self.predict(X, t)
        total = y - y.mean()
        return 1.0 - float(residual @ residual) / float(total @ total)

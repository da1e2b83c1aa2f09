"""Grid-point records produced by the path-following solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

T_EXCEEDED = "t_exceeded"
NORM_CRITERION = "norm_criterion"
CAP = "cap"

TRACE_HEADER = "k,t_k,alpha_k,g_norm,theta_norm,inner_steps"


@dataclass(frozen=True)
class PathIterate:
    """One grid point: index, grid location, step, solution and residual."""

    k: int
    t: float
    alpha: float
    theta: np.ndarray
    g_norm: float
    inner_steps: int = 1


@dataclass
class PathTrace:
    """Ordered grid-point records of a single path-following run.

    Arrays are indexed by grid point (k = 1..N maps to position k-1); the
    implicit starting point (t=0, theta=0) is not stored.
    """

    ts: np.ndarray
    alphas: np.ndarray
    thetas: np.ndarray
    g_norms: np.ndarray
    inner_steps: np.ndarray
    termination_reason: str
    wall_time: float = 0.0
    linear_solves: int = 0
    method: str = ""
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.ts.shape[0]

    @property
    def theta_norms(self) -> np.ndarray:
        return np.linalg.norm(self.thetas, axis=1) if len(self) else np.zeros(0)

    @property
    def total_inner_steps(self) -> int:
        return int(self.inner_steps.sum())

    def iterate(self, k: int) -> PathIterate:
        """Grid point k (1-based, matching the solver indexing)."""
        i = k - 1
        return PathIterate(k=k, t=float(self.ts[i]), alpha=float(self.alphas[i]),
                           theta=self.thetas[i],
                           g_norm=float(self.g_norms[i]),
                           inner_steps=int(self.inner_steps[i]))

    def to_csv(self, path, theta_path=None):
        """Write the trace; optionally dump iterate vectors to a side file."""
        norms = self.theta_norms
        with open(path, "w") as fh:
            fh.write(TRACE_HEADER + "\n")
            for i in range(len(self)):
                fh.write(f"{i + 1},{self.ts[i]:.17g},{self.alphas[i]:.17g},"
                         f"{self.g_norms[i]:.17g},{norms[i]:.17g},"
                         f"{int(self.inner_steps[i])}\n")
        if theta_path is not None:
            np.savetxt(theta_path, self.thetas, delimiter=",", fmt="%.17g")


class TraceBuilder:
    """Accumulates iterates; cheap appends for long runs."""

    def __init__(self, method: str = ""):
        self.method = method
        self._ts = []
        self._alphas = []
        self._thetas = []
        self._g_norms = []
        self._inner = []
        self.linear_solves = 0

    def append(self, t, alpha, theta, g_norm, inner_steps=1):
        self._ts.append(float(t))
        self._alphas.append(float(alpha))
        self._thetas.append(np.array(theta, dtype=float))
        self._g_norms.append(float(g_norm))
        self._inner.append(int(inner_steps))

    def set_last_g_norm(self, g_norm):
        self._g_norms[-1] = float(g_norm)

    def __len__(self):
        return len(self._ts)

    @property
    def last_t(self):
        return self._ts[-1]

    @property
    def last_alpha(self):
        return self._alphas[-1]

    @property
    def last_theta(self):
        return self._thetas[-1]

    def build(self, reason, wall_time=0.0, dim=0, **meta) -> PathTrace:
        n = len(self._ts)
        thetas = (np.array(self._thetas)
                  if n else np.zeros((0, dim)))
        return PathTrace(
            ts=np.array(self._ts), alphas=np.array(self._alphas),
            thetas=thetas, g_norms=np.array(self._g_norms),
            inner_steps=np.array(self._inner, dtype=int),
            termination_reason=reason, wall_time=wall_time,
            linear_solves=self.linear_solves, method=self.method, meta=meta)


def read_trace_csv(path) -> dict:
    """Trace CSV columns as arrays (theta vectors are not recoverable)."""
    body = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {
        "k": body[:, 0].astype(int), "t": body[:, 1], "alpha": body[:, 2],
        "g_norm": body[:, 3], "theta_norm": body[:, 4],
        "inner_steps": body[:, 5].astype(int),
    }

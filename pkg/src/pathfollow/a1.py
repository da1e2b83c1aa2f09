"""Sampling verifier for the local Lipschitz-Hessian condition.

For random pairs (theta, delta) with ``delta' H(theta)^gamma2 delta <=
beta**-2`` (delta rescaled onto that boundary when the raw draw exceeds it)
and ``theta + delta`` inside the domain, the checker compares

    lhs = ||grad(theta + delta) - grad(theta) - H(theta) delta||
    rhs = beta * delta' H(theta)^gamma1 delta

and reports how often lhs exceeds rhs (beyond a 1e-10 relative slack) along
with the worst lhs/rhs ratio seen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .losses import LossModel, SmoothnessProfile, psd_power

_REL_SLACK = 1e-10
_MAX_DOMAIN_SHRINKS = 80


@dataclass(frozen=True)
class A1Report:
    violations: int
    worst_ratio: float
    samples: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _ratio(lhs: float, rhs: float) -> float:
    if lhs == 0.0:
        return 0.0
    if rhs == 0.0:
        return np.inf
    return lhs / rhs


def check_assumption_a1(model: LossModel, profile: SmoothnessProfile,
                        samples: int, rng_seed: int) -> A1Report:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(rng_seed)
    beta, g1, g2 = profile.beta, profile.gamma1, profile.gamma2
    radius_sq = beta ** -2

    violations = 0
    worst = 0.0
    drawn = 0
    while drawn < samples:
        theta = model.random_interior(rng)
        if not model.contains(theta):
            continue
        H = model.hessian(theta)
        H_g2 = psd_power(H, g2)
        delta = rng.standard_normal(model.dim)
        q = float(delta @ H_g2 @ delta)
        if q > radius_sq:
            delta = delta * np.sqrt(radius_sq / q)
        ok = True
        for _ in range(_MAX_DOMAIN_SHRINKS):
            if model.contains(theta + delta):
                break
            delta = 0.5 * delta
        else:
            ok = False
        if not ok:
            continue
        drawn += 1

        grad_far = model.gradient(theta + delta)
        grad_near = model.gradient(theta)
        linear = H @ delta
        lhs = float(np.linalg.norm(grad_far - grad_near - linear))
        # Differences below float cancellation noise are indistinguishable
        # from an exact zero (quadratic losses hit this).
        noise = 1e-13 * (np.linalg.norm(grad_far) + np.linalg.norm(grad_near)
                         + np.linalg.norm(linear))
        if lhs <= noise:
            lhs = 0.0
        rhs = beta * float(delta @ psd_power(H, g1) @ delta)
        if lhs > rhs * (1.0 + _REL_SLACK):
            violations += 1
        worst = max(worst, _ratio(lhs, rhs))
    return A1Report(violations=violations, worst_ratio=worst, samples=samples)

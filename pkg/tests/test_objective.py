import math

import numpy as np
import pytest

from pathfollow import (RegularizedObjective, SquareLoss, rk2_step)
from conftest import fd_gradient, rel_err


@pytest.fixture(scope="module")
def shifted_square_obj():
    # One-dimensional loss (theta - 1)^2 with closed-form path
    # theta(t) = 2(1 - e^-t) / (2(1 - e^-t) + e^-t).
    return RegularizedObjective(SquareLoss(center=1.0))


def shifted_square_path(t):
    w = -math.expm1(-t)
    return 2 * w / (2 * w + math.exp(-t))


def test_value_at_t_zero_is_half_norm(small_logistic_obj, rng):
    theta = rng.standard_normal(5)
    assert small_logistic_obj.value(0.0, theta) == pytest.approx(
        0.5 * theta @ theta)


def test_value_at_ln2_logistic_origin(small_logistic_obj):
    assert small_logistic_obj.value(math.log(2.0), np.zeros(5)) == \
        pytest.approx(0.5 * math.log(2.0))


def test_value_shifted_square_example(shifted_square_obj):
    expected = -math.expm1(-1.0) * 0.25 + math.exp(-1.0) / 2 * 0.25
    assert shifted_square_obj.value(1.0, np.array([0.5])) == \
        pytest.approx(expected, rel=1e-14)


def test_negative_t_rejected(small_logistic_obj):
    with pytest.raises(ValueError):
        small_logistic_obj.value(-0.1, np.zeros(5))


def test_grad_special_cases(small_logistic_obj, rng):
    theta = rng.standard_normal(5)
    np.testing.assert_allclose(small_logistic_obj.grad(0.0, theta), theta,
                               rtol=1e-14)
    t = 1.7
    expected = -math.expm1(-t) * small_logistic_obj.loss.gradient(np.zeros(5))
    np.testing.assert_allclose(small_logistic_obj.grad(t, np.zeros(5)),
                               expected, rtol=1e-14)


def test_grad_matches_finite_differences(small_logistic_obj, rng):
    theta = rng.standard_normal(5)
    for t in (0.3, 1.0, 4.0):
        fd = fd_gradient(lambda x: small_logistic_obj.value(t, x), theta)
        assert rel_err(fd, small_logistic_obj.grad(t, theta)) < 1e-6


def test_strong_convexity_of_f_t(small_logistic_obj, rng):
    for t in (0.5, 2.0, 6.0):
        for _ in range(5):
            th1 = rng.standard_normal(5)
            th2 = rng.standard_normal(5)
            lhs = (small_logistic_obj.grad(t, th1)
                   - small_logistic_obj.grad(t, th2)) @ (th1 - th2)
            assert lhs >= math.exp(-t) * np.sum((th1 - th2) ** 2) - 1e-10


def test_ode_rhs_identity_at_zero(small_logistic_obj, rng):
    theta = rng.standard_normal(5)
    np.testing.assert_allclose(
        small_logistic_obj.ode_rhs(0.0, theta),
        -small_logistic_obj.loss.gradient(theta), rtol=1e-12)


def test_ode_rhs_approaches_newton_direction(small_ridge_obj, rng):
    theta = rng.standard_normal(6)
    hess = small_ridge_obj.loss.hessian(theta)
    grad = small_ridge_obj.loss.gradient(theta)
    newton_dir = -np.linalg.solve(hess, grad)
    far = small_ridge_obj.ode_rhs(30.0, theta)
    assert rel_err(far, newton_dir) < 1e-8


def test_ode_rhs_shifted_square_value(shifted_square_obj):
    got = shifted_square_obj.ode_rhs(1.0, np.array([0.0]))
    expected = 2.0 / (2 * -math.expm1(-1.0) + math.exp(-1.0))
    assert got[0] == pytest.approx(expected, rel=1e-14)


# -- reference solver ---------------------------------------------------------

def test_solve_exact_at_zero(small_logistic_obj):
    ref = small_logistic_obj.solve_exact(0.0)
    assert ref.grad_norm == 0.0
    assert np.array_equal(ref.theta, np.zeros(5))


def test_solve_exact_matches_closed_form(shifted_square_obj):
    for t in (0.2, 1.0, 3.0, 8.0):
        ref = shifted_square_obj.solve_exact(t, tol=1e-12)
        assert ref.theta[0] == pytest.approx(shifted_square_path(t),
                                             abs=1e-10)


def test_solve_exact_certifies_gradient(small_logistic_obj):
    ref = small_logistic_obj.solve_exact(3.0, tol=1e-10)
    assert ref.grad_norm <= 1e-10
    direct = np.linalg.norm(small_logistic_obj.grad(3.0, ref.theta))
    assert direct <= 1e-10


def test_solve_exact_warm_start_invariance(small_logistic_obj, rng):
    tol = 1e-11
    a = small_logistic_obj.solve_exact(2.5, tol=tol)
    b = small_logistic_obj.solve_exact(2.5, tol=tol,
                                       theta_init=rng.standard_normal(5))
    assert np.linalg.norm(a.theta - b.theta) <= 10 * tol


def test_optimality_relation(small_logistic_obj):
    tol = 1e-10
    for t in (0.5, 2.0, 5.0):
        ref = small_logistic_obj.solve_exact(t, tol=tol)
        resid = (math.expm1(t)
                 * small_logistic_obj.loss.gradient(ref.theta) + ref.theta)
        assert np.linalg.norm(resid) <= math.exp(t) * tol


def test_ode_matches_path_on_shifted_square(shifted_square_obj):
    # Integrate the path ODE and land on the optimizer's answer.
    theta = np.zeros(1)
    t, step = 0.0, 1e-3
    while t < 2.0 - 1e-12:
        theta = rk2_step(shifted_square_obj, t, theta, step)
        t += step
    exact = shifted_square_obj.solve_exact(2.0, tol=1e-12).theta
    assert abs(theta[0] - exact[0]) < 1e-5


def test_reference_sweep_warm_starts(small_logistic_obj):
    ts = np.linspace(0.5, 4.0, 8)
    points = small_logistic_obj.reference_sweep(ts, tol=1e-10)
    for t, point in zip(ts, points):
        assert point.t == pytest.approx(t)
        assert point.grad_norm <= 1e-10


# -- path property report -------------------------------------------------------

def test_path_properties_hold(small_logistic_obj):
    ts = [0.5, 1.0, 2.0, 4.0, 8.0]
    points = small_logistic_obj.reference_sweep(ts, tol=1e-10)
    report = small_logistic_obj.path_property_report(points)
    assert report.total_violations == 0


def test_path_properties_single_point(small_logistic_obj):
    points = small_logistic_obj.reference_sweep([1.0], tol=1e-10)
    report = small_logistic_obj.path_property_report(points)
    assert report.total_violations == 0


def test_path_properties_detect_corruption(small_logistic_obj):
    ts = [0.5, 1.0, 2.0]
    points = small_logistic_obj.reference_sweep(ts, tol=1e-10)
    # Swap the solutions at the first two grid locations.
    from pathfollow import ReferencePoint
    broken = [ReferencePoint(points[0].t, points[1].theta, 0.0),
              ReferencePoint(points[1].t, points[0].theta, 0.0),
              points[2]]
    report = small_logistic_obj.path_property_report(broken)
    assert report.total_violations > 0


def test_path_properties_reject_unsorted(small_logistic_obj):
    points = small_logistic_obj.reference_sweep([0.5, 1.0], tol=1e-10)
    with pytest.raises(ValueError):
        small_logistic_obj.path_property_report(points[::-1])

import numpy as np
import pytest

from pathfollow import (LogisticSolutionPath, RidgeSolutionPath,
                        gen_nonseparable, gen_regression)


@pytest.fixture(scope="module")
def class_data():
    dataset, _ = gen_nonseparable(300, 6, seed=11)
    return dataset.X, dataset.y


@pytest.fixture(scope="module")
def reg_data():
    dataset, theta_star = gen_regression(200, 8, sigma2=0.25, seed=13)
    return dataset.X, dataset.y, theta_star


def test_get_set_params_round_trip():
    est = LogisticSolutionPath(method="gd", epsilon=1e-2, t_max=4.0)
    params = est.get_params()
    assert params == {"method": "gd", "epsilon": 1e-2, "t_max": 4.0,
                      "alpha1": None, "alpha": None}
    clone = LogisticSolutionPath(**params)
    assert clone.get_params() == params
    est.set_params(epsilon=1e-3)
    assert est.get_params()["epsilon"] == 1e-3
    with pytest.raises(ValueError):
        est.set_params(bogus=1)


def test_logistic_path_fit_predict(class_data):
    X, y = class_data
    est = LogisticSolutionPath(method="newton", epsilon=1e-2, t_max=4.0)
    assert est.fit(X, y) is est
    assert est.ts_[0] == 0.0 and np.all(np.diff(est.ts_) > 0)
    assert est.coefs_.shape == (len(est.ts_), X.shape[1])
    predictions = est.predict(X)
    assert set(np.unique(predictions)) <= {-1.0, 1.0}
    assert est.score(X, y) > 0.7
    probs = est.predict_proba(X, t=2.0)
    assert probs.shape == (X.shape[0], 2)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, rtol=1e-12)


def test_logistic_path_label_mapping(class_data):
    X, y = class_data
    labels = np.where(y > 0, "spam", "ham")
    est = LogisticSolutionPath(method="euler", alpha=0.2, t_max=2.0)
    est.fit(X, labels)
    got = est.predict(X[:10])
    assert set(got) <= {"spam", "ham"}


def test_coef_at_t_interpolates(class_data):
    X, y = class_data
    est = LogisticSolutionPath(method="newton", epsilon=1e-2, t_max=3.0)
    est.fit(X, y)
    mid = 0.5 * (est.ts_[3] + est.ts_[4])
    expected = 0.5 * (est.coefs_[3] + est.coefs_[4])
    np.testing.assert_allclose(est.coef_at(mid), expected, rtol=1e-12)


def test_ridge_path_recovers_signal(reg_data):
    X, y, theta_star = reg_data
    est = RidgeSolutionPath(method="newton", epsilon=1e-3, t_max=8.0)
    est.fit(X, y)
    assert est.score(X, y) > 0.7
    end = est.coef_at()
    assert np.linalg.norm(end - theta_star) < 0.5


def test_gd_method_and_unfitted_errors(reg_data):
    X, y, _ = reg_data
    est = RidgeSolutionPath(method="gd", epsilon=1e-2, t_max=3.0)
    with pytest.raises(RuntimeError):
        est.predict(X)
    est.fit(X, y)
    assert est.predict(X).shape == (X.shape[0],)
    with pytest.raises(ValueError):
        RidgeSolutionPath(method="sgd").fit(X, y)


def test_input_validation(class_data):
    X, y = class_data
    est = LogisticSolutionPath(epsilon=1e-2, t_max=2.0)
    with pytest.raises(ValueError):
        est.fit(X, y[:-5])
    with pytest.raises(ValueError):
        est.fit(np.full_like(X, np.nan), y)
    with pytest.raises(ValueError):
        est.fit(X, np.zeros(len(y)))  # single class

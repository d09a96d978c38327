"""scikit-learn compatibility of the estimator facades."""

import numpy as np
import pytest
from sklearn.base import clone

from polyinit.basis import eval_expansion, total_degree_set
from polyinit.estimators import (
    DenseReluRegressor,
    LegendreExpansionRegressor,
    PolyInitNetRegressor,
    QuadraticInitNetRegressor,
    check_interval,
    check_matrix,
    check_paired,
)


def test_check_matrix_coerces_and_validates():
    out = check_matrix([1.0, 2.0, 3.0])
    assert out.shape == (3, 1)
    with pytest.raises(ValueError):
        check_matrix(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        check_matrix(np.array([[np.nan]]))


def test_check_paired_validates_lengths():
    with pytest.raises(ValueError):
        check_paired(np.zeros((3, 1)), np.zeros(4))
    with pytest.raises(ValueError):
        check_paired(np.zeros((3, 1)), np.array([0.0, np.inf, 1.0]))


def test_check_interval():
    assert check_interval((-1, 1)) == (-1.0, 1.0)
    with pytest.raises(ValueError):
        check_interval((1, 1))


def test_expansion_regressor_recovers_polynomial():
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, (60, 2))
    index_set = total_degree_set(2, 3)
    coeffs = rng.normal(size=len(index_set))
    from polyinit.basis import Expansion

    truth = Expansion(index_set, coeffs, (-1.0, 1.0))
    reg = LegendreExpansionRegressor(degree=3).fit(x, truth(x))
    np.testing.assert_allclose(reg.expansion_.coefficients, coeffs, rtol=1e-8)
    np.testing.assert_allclose(reg.predict(x), truth(x), atol=1e-9)
    assert reg.score(x, truth(x)) == pytest.approx(1.0)


def test_expansion_regressor_params_round_trip():
    reg = LegendreExpansionRegressor(degree=4, domain=(0.0, 1.0))
    params = reg.get_params()
    assert params == {"degree": 4, "domain": (0.0, 1.0)}
    cloned = clone(reg)
    assert cloned.get_params() == params


def test_dense_relu_regressor_trains_and_predicts():
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, (40, 1))
    y = 0.5 * x[:, 0] + 0.1
    reg = DenseReluRegressor(hidden_sizes=(8,), epochs=500, seed=2).fit(x, y)
    assert reg.loss_trace_.train[-1] < reg.loss_trace_.train[0]
    assert reg.predict(x).shape == (40,)
    assert reg.n_features_in_ == 1


def test_dense_relu_regressor_seeded_reproducibility():
    rng = np.random.default_rng(3)
    x = rng.uniform(-1, 1, (30, 2))
    y = rng.normal(size=30)
    a = DenseReluRegressor(hidden_sizes=(6,), epochs=50, seed=9).fit(x, y)
    b = DenseReluRegressor(hidden_sizes=(6,), epochs=50, seed=9).fit(x, y)
    np.testing.assert_array_equal(a.predict(x), b.predict(x))


def test_polyinit_regressor_zero_epochs_equals_construction():
    x = np.linspace(-1, 1, 25)[:, None]
    y = 1.0 / (1.0 + 25.0 * x[:, 0] ** 2)
    reg = PolyInitNetRegressor(degree=4, block_depth=6, epochs=0).fit(x, y)
    pred = reg.predict(x)
    exact = eval_expansion(reg.expansion_, x)
    assert np.max(np.abs(pred - exact)) <= reg.construction_bound_
    assert reg.initial_loss_ == reg.loss_trace_.train[0]


def test_polyinit_regressor_improves_on_polynomial():
    x = np.linspace(-1, 1, 33)[:, None]
    y = 1.0 / (1.0 + 25.0 * x[:, 0] ** 2)
    reg = PolyInitNetRegressor(
        degree=4, block_depth=4, epochs=800, learning_rate=1e-4, seed=0
    ).fit(x, y)
    assert reg.loss_trace_.train[-1] < reg.loss_trace_.train[0]


def test_quadratic_regressor_width_follows_dimension():
    rng = np.random.default_rng(5)
    x = rng.uniform(0, 1, (40, 3))
    y = np.exp(-np.sum(np.abs(x - 0.5), axis=1))
    reg = QuadraticInitNetRegressor(hidden_layers=2, epochs=20, seed=1).fit(x, y)
    assert reg.net_.layers[0].out_size == 4 * (2 * 3 - 1)
    assert reg.predict(x).shape == (40,)


def test_estimators_clone_with_full_params():
    for est in (
        DenseReluRegressor(hidden_sizes=(4,), epochs=3),
        PolyInitNetRegressor(degree=3, block_depth=2, epochs=3),
        QuadraticInitNetRegressor(hidden_layers=2, epochs=3),
    ):
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()


def test_estimator_rejects_bad_domain():
    x = np.linspace(0, 1, 20)[:, None]
    with pytest.raises(ValueError):
        LegendreExpansionRegressor(degree=2, domain=(1.0, 0.0)).fit(x, x[:, 0])
    with pytest.raises(ValueError):
        PolyInitNetRegressor(degree=2, domain=(2.0, 2.0), epochs=1).fit(x, x[:, 0])

"""scikit-learn style estimators wrapping the functional core.

Each estimator keeps the constructor-argument convention (parameters stored
verbatim, fitted state in trailing-underscore attributes), so ``clone``,
``get_params`` and pipelines work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .basis import eval_expansion, fit_least_squares, total_degree_set
from .construct import (
    build_expansion_net,
    build_stilde_net,
    expansion_error_bound,
)
from .network import TrainConfig, forward, mse_loss, train, xavier_init


def check_matrix(x):
    """Coerce to a finite float64 (n_samples, n_features) array."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError(f"expected a nonempty 2-D sample array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    return x


def check_paired(x, y):
    """Validate a matching (X, y) pair and return float64 copies."""
    x = check_matrix(x)
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != x.shape[0]:
        raise ValueError(f"got {x.shape[0]} samples but {y.shape[0]} targets")
    if not np.all(np.isfinite(y)):
        raise ValueError("targets must be finite")
    return x, y


def check_interval(domain):
    a, b = float(domain[0]), float(domain[1])
    if not np.isfinite(a) or not np.isfinite(b) or b <= a:
        raise ValueError(f"degenerate interval [{a}, {b}]: need a < b")
    return a, b


class LegendreExpansionRegressor(BaseEstimator, RegressorMixin):
    """Least-squares regression onto a total-degree tensor Legendre basis.

    Parameters
    ----------
    degree : int
        Maximum total degree of the index set.
    domain : tuple of float
        The box [a, b]^d the shifted basis lives on.
    """

    def __init__(self, degree=6, domain=(-1.0, 1.0)):
        self.degree = degree
        self.domain = domain

    def fit(self, X, y):
        X, y = check_paired(X, y)
        domain = check_interval(self.domain)
        index_set = total_degree_set(X.shape[1], self.degree)
        self.expansion_, self.residual_ = fit_least_squares(X, y, index_set, domain)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        X = check_matrix(X)
        return eval_expansion(self.expansion_, X)


class DenseReluRegressor(BaseEstimator, RegressorMixin):
    """Xavier-initialized dense ReLU network trained by full-batch ADAM."""

    def __init__(
        self,
        hidden_sizes=(16, 16),
        epochs=2000,
        learning_rate=1e-3,
        beta1=0.9,
        beta2=0.999,
        eps=1e-8,
        batch_size=None,
        seed=0,
    ):
        self.hidden_sizes = hidden_sizes
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.batch_size = batch_size
        self.seed = seed

    def _train_config(self, **overrides):
        base = dict(
            learning_rate=self.learning_rate,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            epochs=self.epochs,
            batch_size=self.batch_size,
            seed=self.seed,
        )
        base.update(overrides)
        return TrainConfig(**base)

    def fit(self, X, y):
        X, y = check_paired(X, y)
        sizes = [X.shape[1], *self.hidden_sizes, 1]
        net = xavier_init(sizes, self.seed)
        self.net_, self.loss_trace_ = train(net, X, y, self._train_config())
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        X = check_matrix(X)
        return forward(self.net_, X)


class PolyInitNetRegressor(DenseReluRegressor):
    """Network built and initialized from a Legendre fit, then trained.

    ``fit`` first solves the least-squares expansion of the data, assembles
    the network that realizes it, and finally trains all parameters.  With
    ``epochs=0`` the predictor is just the constructed network.
    """

    def __init__(
        self,
        degree=6,
        block_depth=6,
        domain=(-1.0, 1.0),
        epochs=20000,
        learning_rate=1e-3,
        beta1=0.9,
        beta2=0.999,
        eps=1e-8,
        batch_size=None,
        seed=0,
    ):
        super().__init__(
            hidden_sizes=(),
            epochs=epochs,
            learning_rate=learning_rate,
            beta1=beta1,
            beta2=beta2,
            eps=eps,
            batch_size=batch_size,
            seed=seed,
        )
        self.degree = degree
        self.block_depth = block_depth
        self.domain = domain

    def fit(self, X, y):
        X, y = check_paired(X, y)
        domain = check_interval(self.domain)
        index_set = total_degree_set(X.shape[1], self.degree)
        self.expansion_, self.residual_ = fit_least_squares(X, y, index_set, domain)
        net, self.layout_ = build_expansion_net(self.expansion_, self.block_depth)
        self.construction_bound_ = expansion_error_bound(self.expansion_, self.block_depth)
        self.initial_loss_ = mse_loss(net, X, y)
        self.net_, self.loss_trace_ = train(net, X, y, self._train_config())
        self.n_features_in_ = X.shape[1]
        return self


class QuadraticInitNetRegressor(DenseReluRegressor):
    """Fully connected net initialized to a coordinate sum-of-squares form.

    The width is forced to 4(2d - 1) by the block-diagonal initialization;
    all cross-block weights start at zero and train freely.
    """

    def __init__(
        self,
        hidden_layers=8,
        domain=(0.0, 1.0),
        epochs=5000,
        learning_rate=1e-3,
        beta1=0.9,
        beta2=0.999,
        eps=1e-8,
        batch_size=None,
        seed=0,
    ):
        super().__init__(
            hidden_sizes=(),
            epochs=epochs,
            learning_rate=learning_rate,
            beta1=beta1,
            beta2=beta2,
            eps=eps,
            batch_size=batch_size,
            seed=seed,
        )
        self.hidden_layers = hidden_layers
        self.domain = domain

    def fit(self, X, y):
        X, y = check_paired(X, y)
        domain = check_interval(self.domain)
        net, self.layout_ = build_stilde_net(X.shape[1], domain, self.hidden_layers)
        self.initial_loss_ = mse_loss(net, X, y)
        self.net_, self.loss_trace_ = train(net, X, y, self._train_config())
        self.n_features_in_ = X.shape[1]
        return self

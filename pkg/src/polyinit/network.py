"""Dense feed-forward ReLU networks with from-scratch training.

Everything is float64 numpy: weight matrices are (out, in), biases are
(out,), and batches are row-major (n, d).  The ReLU derivative at exactly
zero is taken to be 0 so that repeated runs are bit-reproducible.
Training copies its input network; callers keep the initialization.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NumericalError

RELU = "relu"
IDENTITY = "identity"

FULL_BATCH = None


@dataclass
class Layer:
    weights: np.ndarray
    bias: np.ndarray
    activation: str = RELU

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.bias = np.asarray(self.bias, dtype=float)
        if self.weights.ndim != 2 or self.bias.ndim != 1:
            raise ValueError("weights must be 2-D and bias 1-D")
        if self.weights.shape[0] != self.bias.shape[0]:
            raise ValueError("bias length must equal the layer's output size")
        if self.activation not in (RELU, IDENTITY):
            raise ValueError(f"unknown activation {self.activation!r}")

    @property
    def out_size(self):
        return self.weights.shape[0]

    @property
    def in_size(self):
        return self.weights.shape[1]


class DenseNet:
    """A chain of affine layers with ReLU or identity activations."""

    def __init__(self, layers):
        layers = list(layers)
        if not layers:
            raise ValueError("a network needs at least one layer")
        for prev, cur in zip(layers, layers[1:]):
            if cur.in_size != prev.out_size:
                raise ValueError(
                    f"layer shapes do not chain: {prev.out_size} -> {cur.in_size}"
                )
        if layers[-1].activation != IDENTITY:
            raise ValueError("the output layer must have identity activation")
        for layer in layers:
            if not (np.all(np.isfinite(layer.weights)) and np.all(np.isfinite(layer.bias))):
                raise ValueError("network parameters must be finite")
        self.layers = layers

    @property
    def input_dim(self):
        return self.layers[0].in_size

    @property
    def output_dim(self):
        return self.layers[-1].out_size

    @property
    def n_params(self):
        return sum(l.weights.size + l.bias.size for l in self.layers)

    def copy(self):
        return copy.deepcopy(self)

    def __call__(self, x):
        return forward(self, x)


def forward(net, x):
    """Evaluate the network; scalar output nets map (n, d) -> (n,) and (d,) -> float."""
    out = forward_trace(net, x)[-1]
    if out.shape[0] == 1 and np.asarray(x).ndim == 1:
        return float(out[0, 0]) if net.output_dim == 1 else out[0]
    return out[:, 0] if net.output_dim == 1 else out


def forward_trace(net, x):
    """Per-layer post-activation values, input included as the first entry."""
    a = np.asarray(x, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    if a.shape[1] != net.input_dim:
        raise ValueError(f"input dimension {a.shape[1]} != network input {net.input_dim}")
    trace = [a]
    for layer in net.layers:
        z = a @ layer.weights.T + layer.bias
        a = np.maximum(z, 0.0) if layer.activation == RELU else z
        trace.append(a)
    return trace


def mse_loss(net, x, y):
    """Mean squared error of the network against targets ``y``."""
    y = np.asarray(y, dtype=float).ravel()
    if y.size == 0:
        raise ValueError("empty sample list")
    pred = forward(net, np.atleast_2d(np.asarray(x, dtype=float)))
    return float(np.mean((pred - y) ** 2))


def backward(net, x, y, freeze_mask=None):
    """Gradient of :func:`mse_loss` with respect to every parameter.

    Returns a list of (dW, db) pairs aligned with ``net.layers``.  Where a
    pre-activation is exactly zero the ReLU derivative is taken as 0.
    Entries marked True in ``freeze_mask`` come back as exact zeros.
    """
    grads, _ = _loss_and_grads(net, x, y, freeze_mask)
    return grads


def _loss_and_grads(net, x, y, freeze_mask=None):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n = y.size
    if n == 0:
        raise ValueError("empty sample list")
    trace = forward_trace(net, x)
    pred = trace[-1]
    resid = pred - y[:, None]
    loss = float(np.mean(resid**2))
    delta = (2.0 / n) * resid
    grads = [None] * len(net.layers)
    for idx in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[idx]
        a_prev = trace[idx]
        grads[idx] = (delta.T @ a_prev, delta.sum(axis=0))
        if idx > 0:
            delta = delta @ layer.weights
            prev = net.layers[idx - 1]
            if prev.activation == RELU:
                delta = delta * (trace[idx] > 0.0)
    if freeze_mask is not None:
        _check_mask(net, freeze_mask)
        for (gw, gb), (mw, mb) in zip(grads, freeze_mask):
            gw[mw] = 0.0
            gb[mb] = 0.0
    return grads, loss


def _check_mask(net, mask):
    if len(mask) != len(net.layers):
        raise ValueError("freeze mask must have one entry per layer")
    for layer, (mw, mb) in zip(net.layers, mask):
        if mw.shape != layer.weights.shape or mb.shape != layer.bias.shape:
            raise ValueError("freeze mask shapes must match the parameters")


def freeze_all_but_output(net):
    """Mask freezing every parameter except the output layer's."""
    mask = [
        (np.ones_like(l.weights, dtype=bool), np.ones_like(l.bias, dtype=bool))
        for l in net.layers
    ]
    mask[-1] = (
        np.zeros_like(net.layers[-1].weights, dtype=bool),
        np.zeros_like(net.layers[-1].bias, dtype=bool),
    )
    return mask


def freeze_nothing(net):
    return [
        (np.zeros_like(l.weights, dtype=bool), np.zeros_like(l.bias, dtype=bool))
        for l in net.layers
    ]


@dataclass
class TrainConfig:
    """Hyperparameters for ADAM training.

    ``batch_size=None`` means full batch.  ``freeze_mask`` entries marked
    True are never updated.
    """

    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 1000
    batch_size: int | None = FULL_BATCH
    seed: int = 0
    freeze_mask: list | None = None

    def __post_init__(self):
        if not 0.0 < self.beta1 < 1.0 or not 0.0 < self.beta2 < 1.0:
            raise ValueError("beta1 and beta2 must lie strictly in (0, 1)")
        if self.learning_rate <= 0.0:
            raise ValueError("learning rate must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("batch size must be >= 1 or None for full batch")


@dataclass
class LossTrace:
    """Per-epoch losses; index 0 holds the pre-training value."""

    train: list = field(default_factory=list)
    validation: list | None = None


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0


def init_adam_state(net):
    zeros = lambda l: (np.zeros_like(l.weights), np.zeros_like(l.bias))
    return AdamState([zeros(l) for l in net.layers], [zeros(l) for l in net.layers])


def adam_step(net, grads, state, config):
    """One ADAM update with bias correction; mutates ``net`` and ``state``.

    Frozen parameters stay untouched because their gradients arrive as
    exact zeros and their moments start at zero.
    """
    if len(grads) != len(net.layers):
        raise ValueError("gradient does not match the network's layers")
    state.t += 1
    b1, b2 = config.beta1, config.beta2
    correction1 = 1.0 - b1**state.t
    correction2 = 1.0 - b2**state.t
    for layer, (gw, gb), (mw, mb), (vw, vb) in zip(net.layers, grads, state.m, state.v):
        if gw.shape != layer.weights.shape or gb.shape != layer.bias.shape:
            raise ValueError("gradient shapes must match the parameters")
        for param, g, m, v in ((layer.weights, gw, mw, vw), (layer.bias, gb, mb, vb)):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            param -= config.learning_rate * (m / correction1) / (
                np.sqrt(v / correction2) + config.eps
            )
    return net, state


def train(net, x, y, config, x_val=None, y_val=None):
    """Train a copy of ``net`` by ADAM on the mean squared error.

    Returns ``(trained_net, LossTrace)``.  The trace records the loss before
    training (index 0) and after every epoch, on the full training set; a
    validation trace is kept when validation samples are provided.
    Minibatch order is drawn from a generator seeded by ``config.seed``, so
    identical inputs give bit-identical results.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    net = net.copy()
    if config.freeze_mask is not None:
        _check_mask(net, config.freeze_mask)
    trace = LossTrace(train=[mse_loss(net, x, y)])
    has_val = x_val is not None
    if has_val:
        x_val = np.atleast_2d(np.asarray(x_val, dtype=float))
        y_val = np.asarray(y_val, dtype=float).ravel()
        trace.validation = [mse_loss(net, x_val, y_val)]
    state = init_adam_state(net)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    n = y.size
    batch = n if config.batch_size is None else min(config.batch_size, n)
    for _ in range(config.epochs):
        if batch == n:
            grads, _ = _loss_and_grads(net, x, y, config.freeze_mask)
            adam_step(net, grads, state, config)
        else:
            order = rng.permutation(n)
            for start in range(0, n, batch):
                sel = order[start : start + batch]
                grads, _ = _loss_and_grads(net, x[sel], y[sel], config.freeze_mask)
                adam_step(net, grads, state, config)
        epoch_loss = mse_loss(net, x, y)
        if not np.isfinite(epoch_loss):
            raise NumericalError("training loss became non-finite")
        trace.train.append(epoch_loss)
        if has_val:
            trace.validation.append(mse_loss(net, x_val, y_val))
    return net, trace


def xavier_init(layer_sizes, seed):
    """Random network with uniform(+-sqrt(6 / (fan_in + fan_out))) weights.

    ``layer_sizes`` chains [input, hidden..., output]; hidden layers are
    ReLU, the output layer identity, and all biases start at zero.
    """
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise ValueError("layer_sizes must chain at least input -> output")
    rng = np.random.Generator(np.random.PCG64(seed))
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:])):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        act = IDENTITY if i == len(sizes) - 2 else RELU
        layers.append(Layer(weights, np.zeros(fan_out), act))
    return DenseNet(layers)


# ---------------------------------------------------------------------------
# Serialization: structured text, one row of weights per line, 17 significant
# digits so the round trip is bit exact.

_NET_MAGIC = "relu-net 1"


def save_net(net, path):
    lines = [_NET_MAGIC, f"input_dim {net.input_dim}", f"layers {len(net.layers)}"]
    for i, layer in enumerate(net.layers):
        lines.append(f"layer {i} {layer.activation} in {layer.in_size} out {layer.out_size}")
        for row in layer.weights:
            lines.append("w " + " ".join(f"{v:.17g}" for v in row))
        lines.append("b " + " ".join(f"{v:.17g}" for v in layer.bias))
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


def load_net(path):
    with open(path) as handle:
        lines = [line.rstrip("\n") for line in handle if line.strip()]
    if not lines or lines[0] != _NET_MAGIC:
        raise ValueError(f"{path}: not a network file (bad header)")
    n_layers = int(lines[2].split()[1])
    layers = []
    pos = 3
    for _ in range(n_layers):
        parts = lines[pos].split()
        if parts[0] != "layer":
            raise ValueError(f"{path}: expected a layer header at line {pos + 1}")
        activation, in_size, out_size = parts[2], int(parts[4]), int(parts[6])
        pos += 1
        weights = np.empty((out_size, in_size))
        for r in range(out_size):
            fields = lines[pos].split()
            if fields[0] != "w" or len(fields) != in_size + 1:
                raise ValueError(f"{path}: malformed weight row at line {pos + 1}")
            weights[r] = [float(v) for v in fields[1:]]
            pos += 1
        fields = lines[pos].split()
        if fields[0] != "b" or len(fields) != out_size + 1:
            raise ValueError(f"{path}: malformed bias row at line {pos + 1}")
        bias = np.array([float(v) for v in fields[1:]])
        pos += 1
        layers.append(Layer(weights, bias, activation))
    return DenseNet(layers)

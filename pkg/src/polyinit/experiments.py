"""Target functions, sampling, and the four canned training studies.

Every study is a pure function of its config dataclass (the seed included):
same config, same result, byte for byte in the written files.  Wall-clock
durations are the one nondeterministic quantity and go to a separate
``timing.txt`` sidecar so the data files stay reproducible.
"""

from __future__ import annotations

import os
import tempfile
import time
from dataclasses import dataclass, field, fields

import numpy as np

from .basis import Expansion, fit_least_squares, total_degree_set
from .construct import (
    build_expansion_net,
    build_squaring_net,
    build_stilde_net,
    expansion_error_bound,
)
from .network import (
    DenseNet,
    IDENTITY,
    Layer,
    TrainConfig,
    forward,
    forward_trace,
    mse_loss,
    train,
    xavier_init,
)

EQUISPACED = "equispaced"
UNIFORM = "uniform-random"


@dataclass(frozen=True)
class TargetFunction:
    """A named scalar target on a box, evaluable at (n, d) point arrays."""

    name: str
    dimension: int
    domain: tuple
    fn: object
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.shape[1] != self.dimension:
            raise ValueError(
                f"target {self.name} has dimension {self.dimension}, got {x.shape[1]}"
            )
        values = self.fn(x)
        return float(values[0]) if single else values


def runge_target():
    """The classic rational bump 1 / (1 + 25 x^2) on [-1, 1]."""
    return TargetFunction("runge", 1, (-1.0, 1.0), lambda x: 1.0 / (1.0 + 25.0 * x[:, 0] ** 2))


def cos_radial_target():
    """cos(2 pi (x1^2 + x2^2)) on [-1, 1]^2."""
    return TargetFunction(
        "cos-radial", 2, (-1.0, 1.0), lambda x: np.cos(2.0 * np.pi * (x[:, 0] ** 2 + x[:, 1] ** 2))
    )


def cos_freq4_target():
    """cos(4 pi x) on [-1, 1]: four full periods."""
    return TargetFunction("cos4pi", 1, (-1.0, 1.0), lambda x: np.cos(4.0 * np.pi * x[:, 0]))


def genz_target(dimension, decay=5.0, center=0.5):
    """The separable exponential-decay family exp(-sum a_i |x_i - u_i|) on [0, 1]^d."""
    a = np.full(dimension, float(decay))
    u = np.full(dimension, float(center))
    fn = lambda x: np.exp(-np.sum(a * np.abs(x - u), axis=1))
    return TargetFunction(
        "genz", dimension, (0.0, 1.0), fn, {"decay": float(decay), "center": float(center)}
    )


def sample(target, count, scheme, seed=0):
    """Draw ``count`` samples of ``target``; deterministic for a given seed.

    ``equispaced`` is defined for 1-D targets only; ``uniform-random`` draws
    from the target's box with a PCG64 generator.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    a, b = target.domain
    if scheme == EQUISPACED:
        if target.dimension != 1:
            raise ValueError("equispaced sampling is defined for 1-D targets only")
        x = np.linspace(a, b, count)[:, None] if count > 1 else np.array([[0.5 * (a + b)]])
    elif scheme == UNIFORM:
        rng = np.random.Generator(np.random.PCG64(seed))
        x = rng.uniform(a, b, size=(count, target.dimension))
    else:
        raise ValueError(f"unknown sampling scheme {scheme!r}")
    return x, target(x)


# ---------------------------------------------------------------------------
# Results


@dataclass
class ArmRun:
    """One trained arm: its seed, loss trace, and dense-grid predictions."""

    seed: int
    trace: object
    final_train_loss: float
    grid_pred: np.ndarray
    train_x: np.ndarray
    train_y: np.ndarray


@dataclass
class ExperimentResult:
    name: str
    config: dict
    seed: int
    arms: dict
    grid_points: np.ndarray
    grid_target: np.ndarray
    extras: dict = field(default_factory=dict)
    duration_s: float = 0.0


def _config_dict(config):
    return {f.name: getattr(config, f.name) for f in fields(config)}


# ---------------------------------------------------------------------------
# Study 1: train a network initialized to a Legendre fit of the Runge bump.
# Equispaced samples and full-batch ADAM make this run fully deterministic;
# the seed is kept in the config for the minibatch case.


@dataclass
class RungeConfig:
    n_train: int = 33
    degree: int = 6
    block_depth: int = 6
    epochs: int = 20000
    learning_rate: float = 1e-4
    batch_size: int | None = None
    seed: int = 0
    grid_points: int = 1000


def run_runge(config=None):
    config = config or RungeConfig()
    start = time.perf_counter()
    target = runge_target()
    x, y = sample(target, config.n_train, EQUISPACED, config.seed)
    index_set = total_degree_set(1, config.degree)
    expansion, residual = fit_least_squares(x, y, index_set, target.domain)
    net, _layout = build_expansion_net(expansion, config.block_depth)
    bound = expansion_error_bound(expansion, config.block_depth)
    initial_mse = mse_loss(net, x, y)
    expansion_mse = float(np.mean((expansion(x) - y) ** 2))
    cfg = TrainConfig(
        learning_rate=config.learning_rate,
        epochs=config.epochs,
        batch_size=config.batch_size,
        seed=config.seed,
    )
    trained, trace = train(net, x, y, cfg)
    grid = np.linspace(*target.domain, config.grid_points)[:, None]
    run = ArmRun(config.seed, trace, trace.train[-1], forward(trained, grid), x, y)
    return ExperimentResult(
        name="runge",
        config=_config_dict(config),
        seed=config.seed,
        arms={"polyinit": [run]},
        grid_points=grid,
        grid_target=target(grid),
        extras={
            "fit_residual": residual,
            "expansion_train_mse": expansion_mse,
            "initial_train_mse": initial_mse,
            "construction_bound": bound,
        },
        duration_s=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# Study 2: two-phase training of an expansion-structured net on a radial
# cosine.  Phase 1 adjusts only the output layer: one coefficient per term
# plus the constant.  Every earlier layer is frozen, so each term's scalar
# readout is a constant feature and the phase trains exactly in that
# reduced linear form (the coefficient parameterization, which is an
# affine bijection of the output layer and far better conditioned than
# the raw offset-shifted nodes); the result is written back into the net.


@dataclass
class TwoPhaseConfig:
    n_train: int = 200
    total_degree: int = 8
    block_depth: int = 4
    phase1_epochs: int = 20000
    phase1_learning_rate: float = 1e-2
    phase2_epochs: int = 200
    phase2_learning_rate: float = 1e-6
    batch_size: int | None = None
    seed: int = 0
    grid_side: int = 40


def block_feature_matrix(net, layout, x):
    """Scalar readout of every block at the points ``x``, shape (n, n_blocks)."""
    hidden = forward_trace(net, x)[-2]
    vecs = np.stack([block.readout[0] for block in layout.blocks])
    offs = np.array([block.readout[1] for block in layout.blocks])
    return hidden @ vecs.T + offs


def run_two_phase(config=None):
    config = config or TwoPhaseConfig()
    start = time.perf_counter()
    target = cos_radial_target()
    x, y = sample(target, config.n_train, UNIFORM, config.seed)
    index_set = total_degree_set(2, config.total_degree)
    blank = Expansion(index_set, np.zeros(len(index_set)), target.domain)
    net, layout = build_expansion_net(blank, config.block_depth)

    features = block_feature_matrix(net, layout, x)
    head = DenseNet([Layer(np.zeros((1, features.shape[1])), np.zeros(1), IDENTITY)])
    cfg1 = TrainConfig(
        learning_rate=config.phase1_learning_rate,
        epochs=config.phase1_epochs,
        batch_size=config.batch_size,
        seed=config.seed,
    )
    head, trace1 = train(head, features, y, cfg1)
    coeffs = head.layers[0].weights[0]
    vecs = np.stack([block.readout[0] for block in layout.blocks])
    offs = np.array([block.readout[1] for block in layout.blocks])
    net.layers[-1].weights[0, :] = coeffs @ vecs
    net.layers[-1].bias[0] = float(coeffs @ offs + head.layers[0].bias[0])

    design = np.column_stack([features, np.ones(len(y))])
    ls_coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
    ls_mse = float(np.mean((design @ ls_coeffs - y) ** 2))

    side = np.linspace(*target.domain, config.grid_side)
    gx, gy = np.meshgrid(side, side, indexing="ij")
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    run1 = ArmRun(config.seed, trace1, trace1.train[-1], forward(net, grid), x, y)

    cfg2 = TrainConfig(
        learning_rate=config.phase2_learning_rate,
        epochs=config.phase2_epochs,
        batch_size=config.batch_size,
        seed=config.seed,
    )
    trained, trace2 = train(net, x, y, cfg2)
    run2 = ArmRun(config.seed, trace2, trace2.train[-1], forward(trained, grid), x, y)
    return ExperimentResult(
        name="two-phase",
        config=_config_dict(config),
        seed=config.seed,
        arms={"phase1": [run1], "phase2": [run2]},
        grid_points=grid,
        grid_target=target(grid),
        extras={"frozen_feature_ls_mse": ls_mse},
        duration_s=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# Study 3: one squaring-block architecture (4 nodes wide), started either
# from the x^2 construction or from Xavier noise, fit to cos(4 pi x).
# Both arms of a seed share the identical sample set.


@dataclass
class Cos4piConfig:
    n_train: int = 80
    hidden_layers: int = 6
    epochs: int = 20000
    learning_rate: float = 1e-3
    batch_size: int | None = None
    seed: int = 0
    n_seeds: int = 5
    grid_points: int = 1000


def run_cos4pi_comparison(config=None):
    config = config or Cos4piConfig()
    start = time.perf_counter()
    target = cos_freq4_target()
    grid = np.linspace(*target.domain, config.grid_points)[:, None]
    grid_y = target(grid)
    poly_net, _plan = build_squaring_net(target.domain, config.hidden_layers)
    shape = [1] + [4] * config.hidden_layers + [1]
    arms = {"polyinit": [], "xavier": []}
    for k in range(config.n_seeds):
        seed_k = config.seed + k
        x, y = sample(target, config.n_train, UNIFORM, seed_k)
        cfg = TrainConfig(
            learning_rate=config.learning_rate,
            epochs=config.epochs,
            batch_size=config.batch_size,
            seed=seed_k,
        )
        for arm, net0 in (("polyinit", poly_net), ("xavier", xavier_init(shape, seed_k))):
            trained, trace = train(net0, x, y, cfg)
            arms[arm].append(
                ArmRun(seed_k, trace, trace.train[-1], forward(trained, grid), x, y)
            )
    finals = {arm: [run.final_train_loss for run in runs] for arm, runs in arms.items()}
    return ExperimentResult(
        name="cos4pi",
        config=_config_dict(config),
        seed=config.seed,
        arms=arms,
        grid_points=grid,
        grid_target=grid_y,
        extras={
            "median_final_polyinit": float(np.median(finals["polyinit"])),
            "median_final_xavier": float(np.median(finals["xavier"])),
        },
        duration_s=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# Study 4: the separable exponential target in d dimensions, sum-of-squares
# block initialization against Xavier at identical architecture, with a
# held-out validation trace.  The d=20 run is exposed as a preset config.


@dataclass
class GenzConfig:
    dimension: int = 4
    hidden_layers: int = 8
    width: int | None = None
    n_train: int = 500
    n_val: int = 3000
    epochs: int = 5000
    learning_rate: float = 1e-3
    batch_size: int | None = None
    seed: int = 0
    decay: float = 5.0
    center: float = 0.5


def genz_d20_config(**overrides):
    """Full-size 20-dimensional preset: width 156, 300 train / 5000 validation."""
    base = dict(dimension=20, hidden_layers=8, n_train=300, n_val=5000, epochs=2000)
    base.update(overrides)
    return GenzConfig(**base)


def run_genz(config=None):
    config = config or GenzConfig()
    start = time.perf_counter()
    block_width = 4 * (2 * config.dimension - 1)
    width = block_width if config.width is None else config.width
    if width != block_width:
        raise ValueError(
            f"width {width} does not match the block initialization width "
            f"4(2d-1) = {block_width} for dimension {config.dimension}"
        )
    target = genz_target(config.dimension, config.decay, config.center)
    train_ss, val_ss, init_ss = np.random.SeedSequence(config.seed).spawn(3)
    x, y = sample(target, config.n_train, UNIFORM, train_ss)
    x_val, y_val = sample(target, config.n_val, UNIFORM, val_ss)
    poly_net, _layout = build_stilde_net(config.dimension, target.domain, config.hidden_layers)
    shape = [config.dimension] + [width] * config.hidden_layers + [1]
    xavier_net = xavier_init(shape, init_ss)
    cfg = TrainConfig(
        learning_rate=config.learning_rate,
        epochs=config.epochs,
        batch_size=config.batch_size,
        seed=config.seed,
    )
    arms = {}
    for arm, net0 in (("polyinit", poly_net), ("xavier", xavier_net)):
        trained, trace = train(net0, x, y, cfg, x_val, y_val)
        arms[arm] = [ArmRun(config.seed, trace, trace.train[-1], forward(trained, x_val), x, y)]
    return ExperimentResult(
        name="genz",
        config=_config_dict(config),
        seed=config.seed,
        arms=arms,
        grid_points=x_val,
        grid_target=y_val,
        extras={"arm_width": width},
        duration_s=time.perf_counter() - start,
    )


EXPERIMENTS = {
    "runge": (RungeConfig, run_runge),
    "two-phase": (TwoPhaseConfig, run_two_phase),
    "cos4pi": (Cos4piConfig, run_cos4pi_comparison),
    "genz": (GenzConfig, run_genz),
}


# ---------------------------------------------------------------------------
# Result files: per-arm loss curves and grid evaluations as CSV, one
# structured-text manifest, and the nondeterministic timings kept apart.


def _fmt(value):
    return f"{value:.17g}"


def write_result(result, outdir):
    """Write result files atomically into a fresh directory ``outdir``.

    Everything except ``timing.txt`` is a pure function of the experiment
    config.  Fails if ``outdir`` already exists.
    """
    outdir = os.path.abspath(outdir)
    parent = os.path.dirname(outdir)
    os.makedirs(parent, exist_ok=True)
    if os.path.exists(outdir):
        raise FileExistsError(f"output directory {outdir} already exists")
    tmp = tempfile.mkdtemp(prefix=".tmp-result-", dir=parent)
    try:
        files = _write_files(result, tmp)
        os.rename(tmp, outdir)
    except BaseException:
        for name in os.listdir(tmp):
            os.unlink(os.path.join(tmp, name))
        os.rmdir(tmp)
        raise
    return [os.path.join(outdir, name) for name in files]


def _write_files(result, directory):
    files = []

    def _loss_name(arm, runs, run):
        return f"loss_{arm}.csv" if len(runs) == 1 else f"loss_{arm}_seed{run.seed}.csv"

    def _grid_name(arm, runs, run):
        return f"grid_{arm}.csv" if len(runs) == 1 else f"grid_{arm}_seed{run.seed}.csv"

    for arm in sorted(result.arms):
        runs = result.arms[arm]
        for run in runs:
            name = _loss_name(arm, runs, run)
            with open(os.path.join(directory, name), "w") as handle:
                has_val = run.trace.validation is not None
                handle.write("epoch,train_loss,val_loss\n" if has_val else "epoch,train_loss\n")
                for epoch, loss in enumerate(run.trace.train):
                    row = f"{epoch},{_fmt(loss)}"
                    if has_val:
                        row += f",{_fmt(run.trace.validation[epoch])}"
                    handle.write(row + "\n")
            files.append(name)
            name = _grid_name(arm, runs, run)
            dim = result.grid_points.shape[1]
            with open(os.path.join(directory, name), "w") as handle:
                cols = [f"x{i}" for i in range(dim)] + ["target", "net"]
                handle.write(",".join(cols) + "\n")
                for point, tval, nval in zip(result.grid_points, result.grid_target, run.grid_pred):
                    fields_ = [_fmt(v) for v in point] + [_fmt(tval), _fmt(nval)]
                    handle.write(",".join(fields_) + "\n")
            files.append(name)

    manifest = ["experiment-result 1", f"name {result.name}", f"seed {result.seed}", "config:"]
    for key in sorted(result.config):
        manifest.append(f"  {key} = {result.config[key]}")
    if result.extras:
        manifest.append("extras:")
        for key in sorted(result.extras):
            value = result.extras[key]
            manifest.append(f"  {key} = {_fmt(value) if isinstance(value, float) else value}")
    manifest.append("files:")
    for name in files:
        manifest.append(f"  {name}")
    with open(os.path.join(directory, "manifest.txt"), "w") as handle:
        handle.write("\n".join(manifest) + "\n")
    files.append("manifest.txt")

    with open(os.path.join(directory, "timing.txt"), "w") as handle:
        handle.write(f"duration_s {result.duration_s:.3f}\n")
    files.append("timing.txt")
    return files

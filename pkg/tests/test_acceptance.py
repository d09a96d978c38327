"""Acceptance gate: one test per shipping criterion, tolerances pinned.

The slow studies (criteria 6-9) run at their default configurations and are
cached at module scope; everything else is deterministic and fast.  Each
test prints a single PASS line (visible with ``pytest -s`` or on failure).
"""

import os

import numpy as np
import pytest

from polyinit.basis import eval_expansion, fit_least_squares, total_degree_set
from polyinit.construct import (
    build_expansion_net,
    build_product_net,
    build_squaring_net,
    expansion_error_bound,
    product_error_bound,
)
from polyinit.experiments import (
    Cos4piConfig,
    GenzConfig,
    RungeConfig,
    TwoPhaseConfig,
    run_cos4pi_comparison,
    run_genz,
    run_runge,
    run_two_phase,
    write_result,
)
from polyinit.network import backward, forward, mse_loss

SEEDS = [0, 1, 2, 3, 4]


def report(number, text):
    print(f"ACCEPTANCE {number} PASS: {text}")


# ---------------------------------------------------------------------------
# 1. squaring-block sup error and breakpoint exactness


def test_criterion_1_squaring_bound_and_breakpoints():
    grid = np.linspace(-1.0, 1.0, 10_000)[:, None]
    for depth in (2, 4, 6, 8):
        net, plan = build_squaring_net((-1.0, 1.0), depth)
        sup = np.max(np.abs(forward(net, grid) - grid[:, 0] ** 2))
        assert sup <= 1.0 / 2 ** (2 * depth), f"depth {depth}: sup {sup:.3e}"
        xi = plan.breakpoints
        bp_err = np.max(np.abs(forward(net, xi[:, None]) - xi**2))
        assert bp_err <= 1e-12, f"depth {depth}: breakpoint error {bp_err:.3e}"
    report(1, "squaring sup error <= 4^-depth and exact breakpoints, depth 2/4/6/8")


# ---------------------------------------------------------------------------
# 2. error shrinks by ~4x per added layer


def test_criterion_2_four_fold_decay():
    grid = np.linspace(-1.0, 1.0, 10_000)[:, None]
    sup = {}
    for depth in range(2, 8):
        net, _ = build_squaring_net((-1.0, 1.0), depth)
        sup[depth] = np.max(np.abs(forward(net, grid) - grid[:, 0] ** 2))
    ratios = [float(sup[d] / sup[d + 1]) for d in range(2, 7)]
    assert all(3.5 <= r <= 4.5 for r in ratios), ratios
    report(2, f"per-layer error ratios in [3.5, 4.5]: {[round(r, 3) for r in ratios]}")


# ---------------------------------------------------------------------------
# 3. product network against exact multiplication


def test_criterion_3_product_grid_bound():
    net = build_product_net((-1.0, 1.0), 6)
    g = np.linspace(-1.0, 1.0, 200)
    gx, gy = np.meshgrid(g, g)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    err = np.max(np.abs(forward(net, pts) - pts[:, 0] * pts[:, 1]))
    bound = product_error_bound((-1.0, 1.0), 6)
    assert bound == pytest.approx(3.0 / 2**12)
    assert err <= bound, f"max error {err:.3e} > {bound:.3e}"
    report(3, f"product net max grid error {err:.3e} <= 3/2^12 = {bound:.3e}")


# ---------------------------------------------------------------------------
# 4. expansion net stays within the composed analytic bound


def test_criterion_4_expansion_fidelity():
    x = np.linspace(-1.0, 1.0, 33)[:, None]
    y = 1.0 / (1.0 + 25.0 * x[:, 0] ** 2)
    expansion, _ = fit_least_squares(x, y, total_degree_set(1, 6), (-1.0, 1.0))
    net, _ = build_expansion_net(expansion, 8)
    bound = expansion_error_bound(expansion, 8)
    grid = np.linspace(-1.0, 1.0, 1000)[:, None]
    deviation = np.max(np.abs(forward(net, grid) - eval_expansion(expansion, grid)))
    assert deviation <= bound, f"deviation {deviation:.3e} > bound {bound:.3e}"
    net_mse = mse_loss(net, x, y)
    exp_mse = float(np.mean((eval_expansion(expansion, x) - y) ** 2))
    assert abs(net_mse - exp_mse) <= bound
    report(4, f"degree-6 fit: net deviates {deviation:.2e} <= {bound:.2e}, "
              f"epoch-0 mse gap {abs(net_mse - exp_mse):.2e}")


# ---------------------------------------------------------------------------
# 5. backpropagation against central finite differences


def test_criterion_5_gradient_check():
    rng = np.random.default_rng(2024)
    step = 1e-6
    for _ in range(20):
        n_hidden = int(rng.integers(1, 4))
        sizes = [int(rng.integers(1, 4))] + [
            int(rng.integers(1, 9)) for _ in range(n_hidden)
        ] + [1]
        net = _random_net(sizes, rng)
        x = _kink_avoiding_samples(net, 8, rng)
        y = rng.normal(size=8)
        analytic = backward(net, x, y)
        for li, layer in enumerate(net.layers):
            for arr, grad in ((layer.weights, analytic[li][0]), (layer.bias, analytic[li][1])):
                for idx in np.ndindex(*arr.shape):
                    keep = arr[idx]
                    arr[idx] = keep + step
                    up = mse_loss(net, x, y)
                    arr[idx] = keep - step
                    down = mse_loss(net, x, y)
                    arr[idx] = keep
                    numeric = (up - down) / (2 * step)
                    assert grad[idx] == pytest.approx(numeric, rel=1e-5, abs=1e-8)
    report(5, "backward matches central differences (rel 1e-5) on 20 random nets")


def _random_net(sizes, rng):
    from polyinit.network import DenseNet, IDENTITY, Layer, RELU

    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:])):
        act = IDENTITY if i == len(sizes) - 2 else RELU
        layers.append(Layer(rng.normal(size=(fan_out, fan_in)), rng.normal(size=fan_out), act))
    return DenseNet(layers)


def _kink_avoiding_samples(net, count, rng, margin=1e-3):
    from polyinit.network import RELU

    for _ in range(500):
        x = rng.normal(size=(count, net.input_dim))
        a, clear = x, True
        for layer in net.layers:
            pre = a @ layer.weights.T + layer.bias
            if layer.activation == RELU:
                if np.min(np.abs(pre)) < margin:
                    clear = False
                    break
                a = np.maximum(pre, 0.0)
            else:
                a = pre
        if clear:
            return x
    raise AssertionError("no kink-free sample found")


# ---------------------------------------------------------------------------
# 6-9. the four studies at their default configurations


@pytest.fixture(scope="module")
def runge_results():
    return [run_runge(RungeConfig(seed=seed)) for seed in SEEDS]


@pytest.fixture(scope="module")
def two_phase_results():
    return [run_two_phase(TwoPhaseConfig(seed=seed)) for seed in SEEDS]


@pytest.fixture(scope="module")
def cos4pi_result():
    return run_cos4pi_comparison(Cos4piConfig(seed=SEEDS[0], n_seeds=len(SEEDS)))


@pytest.fixture(scope="module")
def genz_result():
    return run_genz(GenzConfig(seed=SEEDS[0]))


def test_criterion_6_runge_training_improves(runge_results):
    improved = 0
    for result in runge_results:
        trace = result.arms["polyinit"][0].trace.train
        assert trace[-1] <= trace[0], "final loss above the initial loss"
        if trace[-1] <= 0.5 * trace[0]:
            improved += 1
    assert improved >= 4, f"halved the initial loss in only {improved}/5 seeds"
    finals = [r.arms["polyinit"][0].trace.train[-1] for r in runge_results]
    report(6, f"runge: final <= epoch-0 in 5/5, halved in {improved}/5 "
              f"(median final {np.median(finals):.2e})")


def test_criterion_7_two_phase(two_phase_results):
    better = 0
    for result in two_phase_results:
        p1 = result.arms["phase1"][0].final_train_loss
        ls = result.extras["frozen_feature_ls_mse"]
        assert p1 <= 1.05 * ls, f"phase-1 loss {p1:.4e} not within 5% of LS {ls:.4e}"
        if result.arms["phase2"][0].final_train_loss <= p1:
            better += 1
    assert better >= 4, f"phase 2 beat phase 1 in only {better}/5 seeds"
    report(7, f"two-phase: phase-1 within 5% of least squares in 5/5, "
              f"phase-2 <= phase-1 in {better}/5")


def test_criterion_8_cos4pi_median_comparison(cos4pi_result):
    finals = {
        arm: [run.final_train_loss for run in runs]
        for arm, runs in cos4pi_result.arms.items()
    }
    med_poly = float(np.median(finals["polyinit"]))
    med_xavier = float(np.median(finals["xavier"]))
    assert med_poly <= med_xavier, (med_poly, med_xavier)
    report(8, f"cos4pi: median final loss polyinit {med_poly:.2e} "
              f"<= xavier {med_xavier:.2e} over {len(SEEDS)} paired seeds")


def test_criterion_9_genz_validation(genz_result):
    trace = genz_result.arms["polyinit"][0].trace
    val = np.array(trace.validation)
    assert val[-1] <= val[0] / 2.0, f"validation only fell {val[0] / val[-1]:.2f}x"
    window = 500
    rises = [
        (i, val[i], val[i + window])
        for i in range(len(val) - window)
        if val[i + window] > 1.1 * val[i]
    ]
    assert not rises, f"sustained validation increase at epochs {rises[:3]}"
    report(9, f"genz d=4: validation {val[0]:.3f} -> {val[-1]:.5f} "
              f"({val[0] / val[-1]:.0f}x), no rising 500-epoch window")


# ---------------------------------------------------------------------------
# 10. repeated runs produce byte-identical files


def test_criterion_10_byte_identical_outputs(tmp_path):
    small = {
        "runge": (run_runge, RungeConfig(n_train=15, degree=3, block_depth=2,
                                         epochs=3, grid_points=20)),
        "two-phase": (run_two_phase, TwoPhaseConfig(n_train=25, total_degree=2,
                                                    block_depth=2, phase1_epochs=40,
                                                    phase2_epochs=2, grid_side=5)),
        "cos4pi": (run_cos4pi_comparison, Cos4piConfig(n_train=12, hidden_layers=2,
                                                       epochs=3, n_seeds=2,
                                                       grid_points=15)),
        "genz": (run_genz, GenzConfig(dimension=2, hidden_layers=2, n_train=14,
                                      n_val=10, epochs=2)),
    }
    for name, (runner, config) in small.items():
        dir_a = tmp_path / name / "a"
        dir_b = tmp_path / name / "b"
        write_result(runner(config), dir_a)
        write_result(runner(config), dir_b)
        names = sorted(os.listdir(dir_a))
        assert names == sorted(os.listdir(dir_b))
        for fname in names:
            if fname == "timing.txt":
                continue
            assert (dir_a / fname).read_bytes() == (dir_b / fname).read_bytes(), (
                f"{name}/{fname} differs between identical runs"
            )
    report(10, "all four studies byte-identical across repeated runs "
               "(timing sidecar excluded)")

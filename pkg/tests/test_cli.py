"""Command-line interface: subcommands, exit codes, and file outputs."""

import os

import numpy as np
import pytest

from polyinit.basis import Expansion, save_expansion, total_degree_set
from polyinit.cli import main
from polyinit.construct import breakpoint_grid
from polyinit.network import DenseNet, IDENTITY, Layer, load_net, save_net


def run_cli(*argv):
    return main(list(argv))


def test_build_squaring_writes_net_and_prints_bound(tmp_path, capsys):
    out = tmp_path / "sq"
    assert run_cli("build", "squaring", "--interval", "-1", "1", "--depth", "4",
                   "--out", str(out)) == 0
    captured = capsys.readouterr().out
    assert f"{1.0 / 256:.17g}" in captured
    net = load_net(f"{out}.net")
    assert [l.out_size for l in net.layers] == [4, 4, 4, 4, 1]
    assert os.path.exists(f"{out}.layout")


def test_build_squaring_net_evaluates_squares(tmp_path):
    out = tmp_path / "sq"
    run_cli("build", "squaring", "--interval", "-1", "1", "--depth", "5",
            "--out", str(out))
    net = load_net(f"{out}.net")
    xi = breakpoint_grid((-1.0, 1.0), 5)
    from polyinit.network import forward

    assert np.max(np.abs(forward(net, xi[:, None]) - xi**2)) <= 1e-12


def test_build_stilde_records_width(tmp_path):
    out = tmp_path / "blocks"
    assert run_cli("build", "stilde", "--dim", "4", "--depth", "8",
                   "--out", str(out)) == 0
    header = open(f"{out}.net").read().splitlines()[:50]
    assert any("out 28" in line for line in header)


def test_build_rejects_degenerate_interval(tmp_path):
    code = run_cli("build", "squaring", "--interval", "2", "-1", "--depth", "3",
                   "--out", str(tmp_path / "x"))
    assert code == 2


def test_build_monomial_and_expansion(tmp_path):
    out = tmp_path / "mono"
    assert run_cli("build", "monomial", "--index", "2,1", "--depth", "3",
                   "--out", str(out)) == 0
    index_set = total_degree_set(1, 3)
    expansion = Expansion(index_set, np.array([0.5, 1.0, -0.25, 0.125]), (-1.0, 1.0))
    exp_path = tmp_path / "expansion.txt"
    save_expansion(expansion, exp_path)
    out2 = tmp_path / "exp"
    assert run_cli("build", "expansion", "--expansion", str(exp_path), "--depth", "4",
                   "--out", str(out2)) == 0
    assert os.path.exists(f"{out2}.net") and os.path.exists(f"{out2}.layout")


def test_eval_identity_net(tmp_path, capsys):
    net = DenseNet([Layer(np.array([[1.0]]), np.zeros(1), IDENTITY)])
    net_path = tmp_path / "id.net"
    save_net(net, net_path)
    pts = tmp_path / "points.txt"
    pts.write_text("1.5\n-2.25\n")
    assert run_cli("eval", "--net", str(net_path), "--points", str(pts)) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x0,output"
    assert lines[1].split(",")[1] == "1.5"
    assert lines[2].split(",")[1] == "-2.25"


def test_eval_dimension_mismatch_exits_2(tmp_path):
    net = DenseNet([Layer(np.array([[1.0]]), np.zeros(1), IDENTITY)])
    net_path = tmp_path / "id.net"
    save_net(net, net_path)
    pts = tmp_path / "points.txt"
    pts.write_text("1.0 2.0\n")
    assert run_cli("eval", "--net", str(net_path), "--points", str(pts)) == 2


def test_eval_missing_file_exits_2(tmp_path):
    assert run_cli("eval", "--net", str(tmp_path / "nope.net"),
                   "--points", str(tmp_path / "nope.txt")) == 2


def test_train_roundtrip(tmp_path, capsys):
    out = tmp_path / "sq"
    run_cli("build", "squaring", "--interval", "-1", "1", "--depth", "2",
            "--out", str(out))
    xs = np.linspace(-1, 1, 12)
    data = tmp_path / "data.txt"
    data.write_text("".join(f"{x:.6f},{x * x:.6f}\n" for x in xs))
    trained = tmp_path / "trained.net"
    loss_csv = tmp_path / "loss.csv"
    assert run_cli("train", "--net", f"{out}.net", "--data", str(data),
                   "--epochs", "5", "--out", str(trained),
                   "--loss-csv", str(loss_csv)) == 0
    assert load_net(trained).input_dim == 1
    lines = loss_csv.read_text().splitlines()
    assert lines[0] == "epoch,train_loss"
    assert len(lines) == 7  # header + epochs 0..5


def test_experiment_unknown_name_exits_2(capsys):
    with pytest.raises(SystemExit) as info:
        run_cli("experiment", "nonsense")
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err.lower()


def test_experiment_runs_and_is_deterministic(tmp_path):
    args = ["experiment", "runge", "--seed", "7",
            "--set", "epochs=3", "--set", "n_train=15", "--set", "degree=3",
            "--set", "block_depth=2", "--set", "grid_points=20"]
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert run_cli(*args, "--out", str(out_a)) == 0
    assert run_cli(*args, "--out", str(out_b)) == 0
    for name in sorted(os.listdir(out_a)):
        if name == "timing.txt":
            continue
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


def test_experiment_existing_outdir_exits_2(tmp_path):
    out = tmp_path / "r"
    args = ["experiment", "runge", "--set", "epochs=1", "--set", "n_train=9",
            "--set", "degree=2", "--set", "block_depth=2",
            "--set", "grid_points=5", "--out", str(out)]
    assert run_cli(*args) == 0
    assert run_cli(*args) == 2


def test_experiment_config_file_and_flag_priority(tmp_path):
    config = tmp_path / "exp.cfg"
    config.write_text(
        "[config]\nversion = 1\n\n[params]\nepochs = 2\nn_train = 9\ndegree = 2\n"
        "block_depth = 2\ngrid_points = 5\nseed = 3\n"
    )
    out = tmp_path / "r"
    assert run_cli("experiment", "runge", "--config", str(config),
                   "--seed", "11", "--out", str(out)) == 0
    manifest = (out / "manifest.txt").read_text()
    assert "seed 11" in manifest  # flag beats file
    assert "epochs = 2" in manifest  # file beats default


def test_experiment_config_requires_version(tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("[params]\nepochs = 2\n")
    assert run_cli("experiment", "runge", "--config", str(config),
                   "--out", str(tmp_path / "r")) == 2


def test_experiment_rejects_unknown_field(tmp_path):
    assert run_cli("experiment", "runge", "--set", "bogus=1",
                   "--out", str(tmp_path / "r")) == 2


def test_experiment_genz_dim_flag(tmp_path):
    out = tmp_path / "genz"
    assert run_cli("experiment", "genz", "--dim", "2", "--set", "epochs=1",
                   "--set", "n_train=10", "--set", "n_val=8",
                   "--set", "hidden_layers=1", "--out", str(out)) == 0
    manifest = (out / "manifest.txt").read_text()
    assert "arm_width = 12" in manifest


def test_experiment_genz_d20_preset_width(tmp_path):
    out = tmp_path / "genz20"
    assert run_cli("experiment", "genz", "--dim", "20", "--set", "epochs=1",
                   "--set", "n_train=12", "--set", "n_val=8", "--epochs", "1",
                   "--set", "hidden_layers=1", "--out", str(out)) == 0
    manifest = (out / "manifest.txt").read_text()
    assert "arm_width = 156" in manifest
    assert "dimension = 20" in manifest


def test_verify_passes(capsys):
    assert run_cli("verify") == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 8
    assert "FAIL" not in out

"""Command-line interface: build, eval, train, experiment, verify.

Exit codes: 0 on success, 2 for usage or configuration problems, 3 when a
numeric routine fails.  Every command is deterministic given its flags and
config file; flags override file values which override defaults.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import sys

import numpy as np

from . import experiments
from .basis import load_expansion
from .exceptions import NumericalError
from .legendre import factorize
from .network import TrainConfig, forward, load_net, mse_loss, save_net, train
from .construct import (
    Block,
    BlockLayout,
    breakpoint_grid,
    build_expansion_net,
    build_monomial_net,
    build_product_net,
    build_squaring_net,
    build_stilde_net,
    expansion_error_bound,
    monomial_error_bound,
    product_error_bound,
    save_layout,
    squaring_error_bound,
    stilde_error_bound,
)

USAGE_ERROR = 2
NUMERIC_ERROR = 3


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NUMERIC_ERROR
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="polyinit",
        description="Construct, train, and compare polynomial-initialized ReLU networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="construct a network and write it to disk")
    b_sub = p_build.add_subparsers(dest="kind", required=True)

    def add_build(kind, help_):
        p = b_sub.add_parser(kind, help=help_)
        p.add_argument("--interval", type=float, nargs=2, default=(-1.0, 1.0),
                       metavar=("A", "B"))
        p.add_argument("--depth", type=int, required=True,
                       help="hidden layers per squaring block")
        p.add_argument("--out", default="net", help="output path prefix")
        p.set_defaults(func=cmd_build, kind=kind)
        return p

    add_build("squaring", "4-node-wide net realizing the x^2 interpolant")
    add_build("product", "12-node-wide net realizing x*y via polarization")
    p_mono = add_build("monomial", "chain of product blocks for one multi-index")
    p_mono.add_argument("--index", required=True,
                        help="comma-separated per-dimension degrees, e.g. 2,1")
    p_exp = b_sub.add_parser("expansion", help="parallel chains for a saved expansion")
    p_exp.add_argument("--expansion", required=True, help="expansion file to realize")
    p_exp.add_argument("--depth", type=int, required=True)
    p_exp.add_argument("--out", default="net")
    p_exp.set_defaults(func=cmd_build, kind="expansion")
    p_st = add_build("stilde", "fully connected sum-of-squares block net")
    p_st.add_argument("--dim", type=int, required=True)

    p_eval = sub.add_parser("eval", help="evaluate a saved network at points")
    p_eval.add_argument("--net", required=True)
    p_eval.add_argument("--points", required=True,
                        help="text file, one whitespace/comma separated point per line")
    p_eval.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p_eval.set_defaults(func=cmd_eval)

    p_train = sub.add_parser("train", help="train a saved network on a data file")
    p_train.add_argument("--net", required=True)
    p_train.add_argument("--data", required=True,
                         help="text file, columns x0..x{d-1},y per line")
    p_train.add_argument("--out", required=True, help="path for the trained network")
    p_train.add_argument("--loss-csv", default=None, help="optional loss curve output")
    p_train.add_argument("--epochs", type=int, default=1000)
    p_train.add_argument("--learning-rate", type=float, default=1e-3)
    p_train.add_argument("--batch-size", type=int, default=None)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.set_defaults(func=cmd_train)

    p_run = sub.add_parser("experiment", help="run one of the canned studies")
    p_run.add_argument("name", choices=sorted(experiments.EXPERIMENTS))
    p_run.add_argument("--config", default=None, help="config file ([params] section)")
    p_run.add_argument("--out", default=None, help="result directory (must not exist)")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--epochs", type=int, default=None)
    p_run.add_argument("--dim", type=int, default=None,
                       help="genz only: 20 selects the full-size preset")
    p_run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config field (repeatable)")
    p_run.set_defaults(func=cmd_experiment)

    p_verify = sub.add_parser("verify", help="run the construction-exactness suite")
    p_verify.set_defaults(func=cmd_verify)
    return parser


# ---------------------------------------------------------------------------
# build


def cmd_build(args):
    a, b = getattr(args, "interval", (-1.0, 1.0))
    kind = args.kind
    layout = None
    if kind == "squaring":
        net, plan = build_squaring_net((a, b), args.depth)
        bound = squaring_error_bound((a, b), args.depth)
        layout = BlockLayout(
            args.depth,
            [4] * args.depth,
            [Block("square", {l: (0, 4) for l in range(args.depth)}, (a, b), args.depth)],
        )
    elif kind == "product":
        net = build_product_net((a, b), args.depth)
        bound = product_error_bound((a, b), args.depth)
        layout = BlockLayout(
            args.depth,
            [12] * args.depth,
            [
                Block(name, {l: (4 * k, 4 * k + 4) for l in range(args.depth)}, (a, b), args.depth)
                for k, name in enumerate(("square_x", "square_mean", "square_y"))
            ],
        )
    elif kind == "monomial":
        nu = tuple(int(v) for v in args.index.split(","))
        factors = [factorize(order, (a, b)) for order in nu]
        net, layout = build_monomial_net(nu, factors, (a, b), args.depth)
        bound = monomial_error_bound(nu, factors, (a, b), args.depth)
    elif kind == "expansion":
        expansion = load_expansion(args.expansion)
        net, layout = build_expansion_net(expansion, args.depth)
        bound = expansion_error_bound(expansion, args.depth)
    elif kind == "stilde":
        net, layout = build_stilde_net(args.dim, (a, b), args.depth)
        bound = stilde_error_bound(args.dim, (a, b), args.depth)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown construction {kind!r}")
    net_path = f"{args.out}.net"
    save_net(net, net_path)
    print(f"wrote {net_path}")
    if layout is not None:
        layout_path = f"{args.out}.layout"
        save_layout(layout, layout_path)
        print(f"wrote {layout_path}")
    print(f"sup error bound on the build domain: {bound:.17g}")
    return 0


# ---------------------------------------------------------------------------
# eval / train


def _read_table(path, what):
    rows = []
    with open(path) as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.replace(",", " ").split()
            try:
                rows.append([float(v) for v in fields])
            except ValueError:
                if lineno == 1:
                    continue  # header row
                raise ValueError(f"{path}:{lineno}: malformed {what} row {line!r}")
    if not rows:
        raise ValueError(f"{path}: no {what} rows found")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: inconsistent column counts")
    return np.array(rows)


def cmd_eval(args):
    net = load_net(args.net)
    points = _read_table(args.points, "point")
    if points.shape[1] != net.input_dim:
        raise ValueError(
            f"points have dimension {points.shape[1]} but the network expects {net.input_dim}"
        )
    values = forward(net, points)
    lines = [",".join([f"x{i}" for i in range(points.shape[1])] + ["output"])]
    for point, value in zip(points, values):
        lines.append(",".join(f"{v:.17g}" for v in point) + f",{value:.17g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_train(args):
    net = load_net(args.net)
    table = _read_table(args.data, "sample")
    if table.shape[1] != net.input_dim + 1:
        raise ValueError(
            f"data rows have {table.shape[1]} columns but the network expects "
            f"{net.input_dim} inputs plus one target"
        )
    x, y = table[:, :-1], table[:, -1]
    cfg = TrainConfig(
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    trained, trace = train(net, x, y, cfg)
    save_net(trained, args.out)
    print(f"wrote {args.out}")
    if args.loss_csv:
        with open(args.loss_csv, "w") as handle:
            handle.write("epoch,train_loss\n")
            for epoch, loss in enumerate(trace.train):
                handle.write(f"{epoch},{loss:.17g}\n")
        print(f"wrote {args.loss_csv}")
    print(f"final training mse: {mse_loss(trained, x, y):.17g}")
    return 0


# ---------------------------------------------------------------------------
# experiment


def _load_config_file(path):
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ValueError(f"config file {path} not found")
    if "config" not in parser or parser.get("config", "version", fallback=None) != "1":
        raise ValueError(f"{path}: missing or unsupported [config] version (expected 1)")
    return dict(parser["params"]) if "params" in parser else {}

def _coerce(field, raw):
    if isinstance(raw, str) and raw.lower() in ("none", "full"):
        return None
    base = field.type
    if base in ("int", "int | None"):
        return int(raw)
    if base in ("float", "float | None"):
        return float(raw)
    return raw


def cmd_experiment(args):
    config_cls, runner = experiments.EXPERIMENTS[args.name]
    overrides = {}
    if args.config:
        overrides.update(_load_config_file(args.config))
    for item in args.set:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    if args.dim is not None:
        if args.name != "genz":
            raise ValueError("--dim applies to the genz experiment only")
        overrides["dimension"] = args.dim
    if args.name == "genz" and int(overrides.get("dimension", 4)) == 20:
        config = experiments.genz_d20_config()
    else:
        config = config_cls()
    known = {f.name: f for f in dataclasses.fields(config_cls)}
    for key, raw in overrides.items():
        if key not in known:
            raise ValueError(f"unknown config field {key!r} for experiment {args.name}")
        setattr(config, key, _coerce(known[key], raw))
    outdir = args.out or f"results/{args.name}-seed{config.seed}"
    result = runner(config)
    files = experiments.write_result(result, outdir)
    print(f"wrote {len(files)} files to {outdir}")
    for arm in sorted(result.arms):
        runs = result.arms[arm]
        finals = ", ".join(f"{run.final_train_loss:.6g}" for run in runs)
        print(f"  {arm}: final train loss {finals}")
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args):
    checks = []

    def check(name, fn):
        try:
            fn()
            checks.append((name, True, ""))
            print(f"PASS {name}")
        except AssertionError as exc:
            checks.append((name, False, str(exc)))
            print(f"FAIL {name}: {exc}")

    def squaring_exact():
        for interval in ((-1.0, 1.0), (0.0, 1.0), (-3.0, 2.0)):
            for depth in range(1, 7):
                net, plan = build_squaring_net(interval, depth)
                xi = plan.breakpoints
                err = np.max(np.abs(forward(net, xi[:, None]) - xi**2))
                assert err <= 1e-12, f"breakpoint error {err:.2e} on {interval} depth {depth}"

    def squaring_interpolant():
        net, plan = build_squaring_net((-2.0, 1.5), 5)
        xs = np.linspace(-2.0, 1.5, 10001)
        oracle = np.interp(xs, plan.breakpoints, plan.breakpoints**2)
        err = np.max(np.abs(forward(net, xs[:, None]) - oracle))
        assert err <= 1e-10, f"interpolant mismatch {err:.2e}"

    def squaring_bound():
        for depth in (2, 4):
            net, _ = build_squaring_net((-1.0, 1.0), depth)
            xs = np.linspace(-1.0, 1.0, 2001)
            err = np.max(np.abs(forward(net, xs[:, None]) - xs**2))
            assert err <= squaring_error_bound((-1.0, 1.0), depth) + 1e-12

    def product_bound():
        net = build_product_net((-1.0, 1.0), 4)
        g = np.linspace(-1.0, 1.0, 101)
        gx, gy = np.meshgrid(g, g)
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        err = np.max(np.abs(forward(net, pts) - pts[:, 0] * pts[:, 1]))
        assert err <= product_error_bound((-1.0, 1.0), 4) + 1e-12, f"error {err:.2e}"

    def product_breakpoints():
        net = build_product_net((-1.0, 1.0), 3)
        xi = breakpoint_grid((-1.0, 1.0), 3)
        pts = [(xi[i], xi[j]) for i in range(len(xi)) for j in range(len(xi)) if (i + j) % 2 == 0]
        pts = np.array(pts)
        err = np.max(np.abs(forward(net, pts) - pts[:, 0] * pts[:, 1]))
        assert err <= 1e-12, f"breakpoint-pair error {err:.2e}"

    def monomial_bound():
        from .basis import eval_basis

        nu = (2, 1)
        factors = [factorize(v) for v in nu]
        net, _ = build_monomial_net(nu, factors, (-1.0, 1.0), 5)
        rng = np.random.Generator(np.random.PCG64(7))
        pts = rng.uniform(-1.0, 1.0, (500, 2))
        err = np.max(np.abs(forward(net, pts) - eval_basis(nu, pts, (-1.0, 1.0))))
        bound = monomial_error_bound(nu, factors, (-1.0, 1.0), 5)
        assert err <= bound, f"error {err:.2e} > bound {bound:.2e}"

    def expansion_checks():
        from .basis import Expansion, eval_expansion, total_degree_set

        index_set = total_degree_set(2, 3)
        rng = np.random.Generator(np.random.PCG64(3))
        expansion = Expansion(index_set, rng.normal(size=len(index_set)), (0.0, 1.0))
        net, layout = build_expansion_net(expansion, 5)
        pts = rng.uniform(0.0, 1.0, (400, 2))
        err = np.max(np.abs(forward(net, pts) - eval_expansion(expansion, pts)))
        bound = expansion_error_bound(expansion, 5)
        assert err <= bound, f"error {err:.2e} > bound {bound:.2e}"
        doubled = Expansion(index_set, 2.0 * expansion.coefficients, (0.0, 1.0))
        net2, _ = build_expansion_net(doubled, 5)
        lin = np.max(np.abs(forward(net2, pts) - 2.0 * forward(net, pts)))
        assert lin <= 1e-12, f"output not linear in coefficients: {lin:.2e}"
        for mask, layer in zip(layout.structural_zero_masks(), net.layers[1:]):
            assert np.all(layer.weights[mask] == 0.0), "structural zero entry is nonzero"

    def stilde_checks():
        from .construct import stilde_reference

        net, layout = build_stilde_net(3, (-1.0, 1.0), 2)
        assert net.layers[0].out_size == 4 * (2 * 3 - 1)
        xi = breakpoint_grid((-1.0, 1.0), 2)
        pts = np.array([(u, v, w) for u in xi[::2] for v in xi[::2] for w in xi[::2]])
        err = np.max(np.abs(forward(net, pts) - stilde_reference(pts)))
        assert err <= 1e-12, f"lattice error {err:.2e}"
        for mask, layer in zip(layout.structural_zero_masks(), net.layers[1:]):
            assert np.all(layer.weights[mask] == 0.0), "structural zero entry is nonzero"

    check("squaring breakpoint exactness", squaring_exact)
    check("squaring interpolant identity", squaring_interpolant)
    check("squaring error bound", squaring_bound)
    check("product error bound", product_bound)
    check("product breakpoint-pair exactness", product_breakpoints)
    check("monomial chain against basis oracle", monomial_bound)
    check("expansion net fidelity, linearity, layout honesty", expansion_checks)
    check("sum-of-squares block net exactness", stilde_checks)
    failed = [name for name, ok, _ in checks if not ok]
    print(f"{len(checks) - len(failed)}/{len(checks)} construction checks passed")
    return 0 if not failed else NUMERIC_ERROR


if __name__ == "__main__":
    sys.exit(main())

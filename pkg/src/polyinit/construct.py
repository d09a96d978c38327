"""Builders for ReLU networks whose initial weights realize polynomials exactly.

The primitive is a depth-``m`` squaring block of 4 nodes per layer (three
"refinement" nodes that fold a hat function onto itself, one "approximation"
node that accumulates the interpolant).  Its output equals the piecewise
linear interpolant of x^2 on 2^m + 1 uniform breakpoints, so the sup error
on [a, b] is (b - a)^2 / 4 / 4^m and the value at every breakpoint is exact.

Node order inside a squaring block is fixed as [u1, u2, u3, v] where the
u-nodes carry the refinement combination and v the running interpolant;
tests and the layout sidecar rely on that order.

Products come from the polarization identity x*y = ((x+y)^2 - x^2 - y^2)/2
applied to three parallel squaring blocks.  Monomials chain product blocks
over root-shifted inputs, each stage on a symmetric interval wide enough to
hold the running partial product; expansions place monomial chains in
parallel, padded with exact positive-offset passthrough nodes so the whole
net is rectangular per layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .legendre import _check_interval, factorize
from .network import DenseNet, IDENTITY, Layer, RELU


# ---------------------------------------------------------------------------
# Plans and layouts


@dataclass(frozen=True)
class SquaringPlan:
    """Construction record for one squaring block: grid and error constant."""

    interval: tuple
    depth: int
    breakpoints: np.ndarray
    error_constant: float

    def __post_init__(self):
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if self.error_constant <= 0:
            raise ValueError("error constant must be positive")


@dataclass
class Block:
    """Node spans of one sub-network, per hidden layer (half-open ranges).

    ``readout`` optionally carries the affine functional (vector over the
    final hidden layer, bias) whose value is this block's scalar output;
    the network's output layer is a coefficient-weighted sum of these.
    """

    name: str
    spans: dict
    interval: tuple | None = None
    depth: int | None = None
    readout: tuple | None = None


@dataclass
class BlockLayout:
    """Which nodes belong to which parallel sub-network, layer by layer.

    Cross-block entries of every hidden-to-hidden weight matrix are
    structurally zero at initialization; :meth:`structural_zero_masks`
    reconstructs exactly those entries.
    """

    n_hidden: int
    widths: list
    blocks: list = field(default_factory=list)

    def validate(self):
        for layer in range(self.n_hidden):
            seen = []
            for block in self.blocks:
                if layer in block.spans:
                    seen.append(block.spans[layer])
            seen.sort()
            covered = 0
            for start, stop in seen:
                if start != covered:
                    raise ValueError(f"layer {layer}: spans leave a gap at node {covered}")
                covered = stop
            if covered != self.widths[layer]:
                raise ValueError(f"layer {layer}: spans cover {covered} of {self.widths[layer]} nodes")

    def _owner(self, layer):
        owner = np.full(self.widths[layer], -1, dtype=int)
        for k, block in enumerate(self.blocks):
            if layer in block.spans:
                start, stop = block.spans[layer]
                owner[start:stop] = k
        return owner

    def structural_zero_masks(self):
        """Boolean masks, one per hidden-to-hidden matrix (layers 1..n_hidden-1).

        True marks an entry that connects two different blocks and was
        therefore left at exactly 0.0 by the builder.
        """
        masks = []
        for layer in range(1, self.n_hidden):
            rows = self._owner(layer)
            cols = self._owner(layer - 1)
            masks.append(rows[:, None] != cols[None, :])
        return masks


def breakpoint_grid(interval, depth):
    """The 2^depth + 1 uniform knots of the depth-``depth`` interpolant on [a, b]."""
    a, b = _check_interval(interval)
    return a + np.arange(2**depth + 1) * (b - a) / 2**depth


# ---------------------------------------------------------------------------
# Squaring block primitives.  A "functional" is a pair (vector over the
# previous layer's nodes, bias) describing an affine read-out.


def _sq_first_rows(w, bias, row0, arg, interval):
    """First-layer rows of a squaring block fed by the affine argument ``arg``."""
    a, b = interval
    vec, off = arg
    mid = 0.5 * (a + b)
    w[row0 + 0, :] = vec
    bias[row0 + 0] = off - a
    w[row0 + 1, :] = vec
    bias[row0 + 1] = off - mid
    w[row0 + 2, :] = vec
    bias[row0 + 2] = off - b
    # the running interpolant starts at the chord through (a, a^2), (b, b^2),
    # which is a single ReLU because min(a^2, b^2) >= 0
    w[row0 + 3, :] = (a + b) * vec
    bias[row0 + 3] = (a + b) * off - a * b


def _g_coeffs(j, interval):
    """Read-out of the level-j hat from the refinement nodes of layer j-1."""
    if j == 1:
        c = 2.0 / (interval[1] - interval[0])
        return (c, -2.0 * c, c)
    return (2.0, -4.0, 2.0)


def _sq_mid_rows(w, bias, row0, prev0, j, interval):
    """Layer ``j`` (1-based within the block) of a squaring block."""
    a, b = interval
    c = (b - a) ** 2 / 4.0
    coeffs = _g_coeffs(j, interval)
    for t, shift in enumerate((0.0, 0.5, 1.0)):
        for s, coef in enumerate(coeffs):
            w[row0 + t, prev0 + s] = coef
        bias[row0 + t] = -shift
    # v' = v - C g_j / 4^(j-1); the interpolant is nonnegative, so sigma is exact
    scale = c / 4.0 ** (j - 1)
    for s, coef in enumerate(coeffs):
        w[row0 + 3, prev0 + s] = -scale * coef
    w[row0 + 3, prev0 + 3] = 1.0
    bias[row0 + 3] = 0.0


def _sq_output(width, node0, depth, interval):
    """Read-out of the depth-``depth`` interpolant from the block's last layer."""
    a, b = interval
    c = (b - a) ** 2 / 4.0
    vec = np.zeros(width)
    scale = c / 4.0 ** (depth - 1)
    for s, coef in enumerate(_g_coeffs(depth, interval)):
        vec[node0 + s] = -scale * coef
    vec[node0 + 3] = 1.0
    return vec, 0.0


def _prod_first_rows(w, bias, row0, arg1, arg2, bound):
    """First layer of a product stage: three squaring blocks on [-bound, bound]."""
    interval = (-bound, bound)
    vec1, off1 = arg1
    vec2, off2 = arg2
    mean = (0.5 * (vec1 + vec2), 0.5 * (off1 + off2))
    _sq_first_rows(w, bias, row0 + 0, arg1, interval)
    _sq_first_rows(w, bias, row0 + 4, mean, interval)
    _sq_first_rows(w, bias, row0 + 8, arg2, interval)


def _prod_mid_rows(w, bias, row0, prev0, j, bound):
    interval = (-bound, bound)
    for k in (0, 4, 8):
        _sq_mid_rows(w, bias, row0 + k, prev0 + k, j, interval)


def _prod_output(width, node0, depth, bound):
    """x*y = 2 f((x+y)/2) - f(x)/2 - f(y)/2 read from the stage's last layer."""
    interval = (-bound, bound)
    v1, b1 = _sq_output(width, node0 + 0, depth, interval)
    v2, b2 = _sq_output(width, node0 + 4, depth, interval)
    v3, b3 = _sq_output(width, node0 + 8, depth, interval)
    return 2.0 * v2 - 0.5 * v1 - 0.5 * v3, 2.0 * b2 - 0.5 * b1 - 0.5 * b3


# ---------------------------------------------------------------------------
# Error bounds


def squaring_error_bound(interval, depth):
    """Sup-norm error of the depth-``depth`` squaring block on [a, b]."""
    a, b = _check_interval(interval)
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    return (b - a) ** 2 / 4.0 / 4.0**depth


def product_error_bound(interval, depth):
    """Sup-norm error of the product net: three squaring errors, weights 2 + 1/2 + 1/2."""
    return 3.0 * squaring_error_bound(interval, depth)


def stilde_error_bound(dimension, interval, depth):
    """Sup-norm bound for the block-initialized net: 2d - 1 unit-weight blocks."""
    return (2 * dimension - 1) * squaring_error_bound(interval, depth)


def _chain_bounds(n_factors, depth):
    """Per-stage working radii and error accumulation for a product chain.

    The chain multiplies factors normalized into [-1, 1], so the true
    partial product never leaves [-1, 1] and stage ``s`` only needs the
    symmetric interval of radius 1 + (accumulated deviation).  Returns
    (radius list, final deviation bound of the normalized product).
    """
    if n_factors == 1:
        return [], 0.0
    radii = [1.0]
    eps = 3.0 / 4.0**depth
    for _ in range(2, n_factors):
        rho = 1.0 + eps
        radii.append(rho)
        eps = 3.0 * rho * rho / 4.0**depth + eps
    return radii, eps


def monomial_error_bound(nu, factors, domain, depth):
    """Deviation bound of a monomial chain from its tensor-product polynomial."""
    chain = _MonomialChain(nu, factors, domain, depth)
    return chain.error_bound


def expansion_error_bound(expansion, depth):
    """Sum over terms of |c_nu| times the per-monomial chain bound."""
    total = 0.0
    for nu, c in zip(expansion.index_set, expansion.coefficients):
        if sum(nu) == 0:
            continue
        factors = [factorize(order, expansion.domain) for order in nu]
        total += abs(c) * monomial_error_bound(nu, factors, expansion.domain, depth)
    return total


# ---------------------------------------------------------------------------
# Squaring / product / block-diagonal builders (uniform width)


def build_squaring_net(interval, depth):
    """Depth-``depth`` network of width 4 realizing the x^2 interpolant on [a, b].

    Returns ``(net, plan)``; the net output equals x^2 exactly at every
    breakpoint of ``plan`` and within ``squaring_error_bound`` everywhere
    on the interval.
    """
    a, b = _check_interval(interval)
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    weights = [np.zeros((4, 1))] + [np.zeros((4, 4)) for _ in range(depth - 1)]
    biases = [np.zeros(4) for _ in range(depth)]
    _sq_first_rows(weights[0], biases[0], 0, (np.ones(1), 0.0), (a, b))
    for j in range(1, depth):
        _sq_mid_rows(weights[j], biases[j], 0, 0, j, (a, b))
    out_vec, out_bias = _sq_output(4, 0, depth, (a, b))
    layers = [Layer(w, bv, RELU) for w, bv in zip(weights, biases)]
    layers.append(Layer(out_vec[None, :], np.array([out_bias]), IDENTITY))
    plan = SquaringPlan(
        (a, b), depth, breakpoint_grid((a, b), depth), (b - a) ** 2 / 4.0
    )
    return DenseNet(layers), plan


def build_product_net(interval, depth):
    """Two-input network approximating x*y for x, y in [a, b].

    Three squaring blocks run in parallel (width 12) on the arguments x,
    (x + y)/2 and y; the output weights combine them through the
    polarization identity.  Exact whenever all three arguments land on
    breakpoints.
    """
    a, b = _check_interval(interval)
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    weights = [np.zeros((12, 2))] + [np.zeros((12, 12)) for _ in range(depth - 1)]
    biases = [np.zeros(12) for _ in range(depth)]
    e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    scaled = lambda vec: (vec, 0.0)
    # polarization needs (x+y)/2 mapped back into [a, b], which holds by convexity
    mean = (0.5 * (e1 + e2), 0.0)
    _sq_first_rows(weights[0], biases[0], 0, scaled(e1), (a, b))
    _sq_first_rows(weights[0], biases[0], 4, mean, (a, b))
    _sq_first_rows(weights[0], biases[0], 8, scaled(e2), (a, b))
    for j in range(1, depth):
        for k in (0, 4, 8):
            _sq_mid_rows(weights[j], biases[j], k, k, j, (a, b))
    v1, c1 = _sq_output(12, 0, depth, (a, b))
    v2, c2 = _sq_output(12, 4, depth, (a, b))
    v3, c3 = _sq_output(12, 8, depth, (a, b))
    out_vec = 2.0 * v2 - 0.5 * v1 - 0.5 * v3
    out_bias = 2.0 * c2 - 0.5 * c1 - 0.5 * c3
    layers = [Layer(w, bv, RELU) for w, bv in zip(weights, biases)]
    layers.append(Layer(out_vec[None, :], np.array([out_bias]), IDENTITY))
    return DenseNet(layers)


def build_stilde_net(dimension, interval, depth):
    """Fully connected net of width 4(2d - 1) initialized to a sum of squares.

    The initial output realizes sum_i x_i^2 + sum_i (x_i + x_{i+1})^2 / 4
    through 2d - 1 block-diagonal squaring blocks: d on the coordinates and
    d - 1 on consecutive midpoints.  Cross-block weights start at exactly 0
    but are ordinary trainable parameters.
    """
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    a, b = _check_interval(interval)
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    n_blocks = 2 * dimension - 1
    width = 4 * n_blocks
    weights = [np.zeros((width, dimension))] + [
        np.zeros((width, width)) for _ in range(depth - 1)
    ]
    biases = [np.zeros(width) for _ in range(depth)]
    args = []
    for i in range(dimension):
        vec = np.zeros(dimension)
        vec[i] = 1.0
        args.append((f"square_x{i}", (vec, 0.0)))
    for i in range(dimension - 1):
        vec = np.zeros(dimension)
        vec[i] = 0.5
        vec[i + 1] = 0.5
        args.append((f"square_mid{i}", (vec, 0.0)))
    blocks = []
    for k, (name, arg) in enumerate(args):
        node0 = 4 * k
        _sq_first_rows(weights[0], biases[0], node0, arg, (a, b))
        for j in range(1, depth):
            _sq_mid_rows(weights[j], biases[j], node0, node0, j, (a, b))
        blocks.append(
            Block(
                name,
                {l: (node0, node0 + 4) for l in range(depth)},
                (a, b),
                depth,
                _sq_output(width, node0, depth, (a, b)),
            )
        )
    out_vec = np.zeros(width)
    out_bias = 0.0
    for k in range(n_blocks):
        vec, c = _sq_output(width, 4 * k, depth, (a, b))
        # the midpoint blocks already carry the 1/4 factor: ((x_i+x_j)/2)^2
        out_vec += vec
        out_bias += c
    layers = [Layer(w, bv, RELU) for w, bv in zip(weights, biases)]
    layers.append(Layer(out_vec[None, :], np.array([out_bias]), IDENTITY))
    layout = BlockLayout(depth, [width] * depth, blocks)
    layout.validate()
    return DenseNet(layers), layout


def stilde_reference(x, dimension=None):
    """The sum-of-squares polynomial the block net is initialized to."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    value = np.sum(x**2, axis=1)
    if x.shape[1] > 1:
        value = value + 0.25 * np.sum((x[:, :-1] + x[:, 1:]) ** 2, axis=1)
    return float(value[0]) if single else value


# ---------------------------------------------------------------------------
# Monomial chains and expansion assembly


class _MonomialChain:
    """Plan for one tensor-product monomial realized as a chain of products.

    The shift layer emits normalized factors (x_i - r_k) / B_k (one node
    per root, identity activation), where B_k bounds |x_i - r_k| over the
    box; every true partial product then lives in [-1, 1] and each stage
    multiplies by the next factor through a product block on an interval
    of radius 1 plus the accumulated deviation.  Factors not yet consumed
    ride along in positive-offset passthrough nodes.  The single overall
    scale (leading coefficients times the normalizers) is folded into the
    chain's read-out, so no inner weight grows with the degree.
    """

    def __init__(self, nu, factors, domain, depth, name="monomial"):
        a, b = _check_interval(domain)
        nu = tuple(int(v) for v in nu)
        if len(factors) != len(nu):
            raise ValueError("need one factorization per dimension")
        if depth < 1:
            raise ValueError(f"depth must be >= 1, got {depth}")
        shifts = []
        scale = 1.0
        for i, (order, poly) in enumerate(zip(nu, factors)):
            if poly.degree != order:
                raise ValueError(
                    f"factorization degree {poly.degree} != index entry {order} in dim {i}"
                )
            if order == 0:
                continue
            scale *= poly.leading_scale
            for root in poly.roots:
                bound = max(b - root, root - a)
                shifts.append((i, float(root), bound))
                scale *= bound
        if not shifts:
            raise ValueError("constant index: handled by the caller as a bias term")
        self.name = name
        self.nu = nu
        self.m = depth
        self.domain = (a, b)
        self.shifts = shifts
        self.n = len(shifts)
        self.scale = scale
        self.radii, eps = _chain_bounds(self.n, depth)
        self.normalized_error = eps
        self.error_bound = abs(scale) * eps
        self.depth = 1 + (self.n - 1) * depth
        # normalized values stay within 1 + eps, so small constant offsets
        # keep every passthrough node in the linear regime
        self.carry_offset = 2.0
        self.pad_offset = 2.0 + eps

    def width_at(self, layer):
        if layer == 0:
            return self.n
        if layer < self.depth:
            stage = (layer - 1) // self.m + 1
            return 12 + (self.n - 1 - stage)
        return 1

    def emit(self, w, bias, layer, off, prev_off):
        if layer == 0:
            for j, (dim, root, bound) in enumerate(self.shifts):
                w[off + j, dim] = 1.0 / bound
                bias[off + j] = -root / bound
            return
        if layer < self.depth:
            stage = (layer - 1) // self.m + 1
            pos = (layer - 1) % self.m
            radius = self.radii[stage - 1]
            if pos > 0:
                _prod_mid_rows(w, bias, off, prev_off, pos, radius)
                for t in range(self.n - 1 - stage):
                    w[off + 12 + t, prev_off + 12 + t] = 1.0
                return
            if stage == 1:
                arg1 = (_unit(w.shape[1], prev_off + 0), 0.0)
                arg2 = (_unit(w.shape[1], prev_off + 1), 0.0)
                _prod_first_rows(w, bias, off, arg1, arg2, radius)
                for t, k in enumerate(range(2, self.n)):
                    w[off + 12 + t, prev_off + k] = 1.0
                    bias[off + 12 + t] = self.carry_offset
                return
            prev_width = w.shape[1]
            arg1 = _prod_output(prev_width, prev_off, self.m, self.radii[stage - 2])
            arg2 = (_unit(prev_width, prev_off + 12), -self.carry_offset)
            _prod_first_rows(w, bias, off, arg1, arg2, radius)
            for t in range(self.n - 1 - stage):
                w[off + 12 + t, prev_off + 12 + 1 + t] = 1.0
            return
        if layer == self.depth:
            # the chain is done; park its normalized value in one positive node
            vec, c = self._normalized_output(w.shape[1], prev_off)
            w[off, :] = vec
            bias[off] = c + self.pad_offset
            return
        w[off, prev_off] = 1.0

    def _normalized_output(self, prev_width, prev_off):
        """Normalized chain value read from the chain's own last layer."""
        if self.n == 1:
            return _unit(prev_width, prev_off), 0.0
        return _prod_output(prev_width, prev_off, self.m, self.radii[-1])

    def final_functional(self, final_layer, final_width, off):
        """Read-out of the scaled monomial value from the net's last hidden layer."""
        if self.depth - 1 == final_layer:
            vec, c = self._normalized_output(final_width, off)
            return self.scale * vec, self.scale * c
        vec = np.zeros(final_width)
        vec[off] = self.scale
        return vec, -self.scale * self.pad_offset


def _unit(size, index):
    vec = np.zeros(size)
    vec[index] = 1.0
    return vec


def build_monomial_net(nu, factors, domain, depth):
    """Network realizing one tensor-product monomial term on the given box.

    ``factors`` supplies the root-factored univariate polynomial for every
    dimension (degree matching the index entry).  The leading scales and
    the per-factor normalizers fold into one output-weight scale, so a
    total degree of 1 is reproduced exactly and higher degrees within the
    composed chain bound (see :func:`monomial_error_bound`).

    Returns ``(net, layout)``.
    """
    chain = _MonomialChain(nu, factors, domain, depth)
    dimension = len(chain.nu)
    widths = [chain.width_at(l) for l in range(chain.depth)]
    weights = [np.zeros((widths[0], dimension))] + [
        np.zeros((widths[l], widths[l - 1])) for l in range(1, chain.depth)
    ]
    biases = [np.zeros(widths[l]) for l in range(chain.depth)]
    for layer in range(chain.depth):
        chain.emit(weights[layer], biases[layer], layer, 0, 0)
    out_vec, out_bias = chain.final_functional(chain.depth - 1, widths[-1], 0)
    layers = [Layer(weights[0], biases[0], IDENTITY)]
    layers += [Layer(w, bv, RELU) for w, bv in zip(weights[1:], biases[1:])]
    layers.append(Layer(out_vec[None, :], np.array([out_bias]), IDENTITY))
    name = "mono_" + "_".join(str(v) for v in chain.nu)
    block = Block(
        name,
        {l: (0, widths[l]) for l in range(chain.depth)},
        chain.domain,
        depth,
        (out_vec, out_bias),
    )
    layout = BlockLayout(chain.depth, widths, [block])
    layout.validate()
    return DenseNet(layers), layout


def build_expansion_net(expansion, depth):
    """Network initialized to a tensor-product Legendre expansion.

    One monomial chain per non-constant index runs in parallel; chains of
    smaller total degree are padded with exact passthrough nodes so every
    hidden layer is rectangular, and the last hidden layer holds exactly
    one node per term.  The output layer carries the expansion
    coefficients, one weight per term up to each chain's folded scale
    (zero coefficients keep their block, so the weights can be learned
    later); constant terms fold into the output bias.

    Returns ``(net, layout)``.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if len(expansion.index_set) == 0:
        raise ValueError("empty expansion")
    dimension = expansion.dimension
    const_bias = 0.0
    chains = []
    coeffs = []
    for nu, c in zip(expansion.index_set, expansion.coefficients):
        if sum(nu) == 0:
            const_bias += c
            continue
        factors = [factorize(order, expansion.domain) for order in nu]
        name = "mono_" + "_".join(str(v) for v in nu)
        chains.append(_MonomialChain(nu, factors, expansion.domain, depth, name))
        coeffs.append(c)
    if not chains:
        out = Layer(np.zeros((1, dimension)), np.array([const_bias]), IDENTITY)
        return DenseNet([out]), BlockLayout(0, [], [])
    # one layer past the deepest chain, so every term materializes into a
    # single node and the output layer holds exactly one weight per term
    total_depth = max(chain.depth for chain in chains) + 1
    widths = []
    offsets = []
    for layer in range(total_depth):
        layer_offsets = []
        pos = 0
        for chain in chains:
            layer_offsets.append(pos)
            pos += chain.width_at(layer)
        offsets.append(layer_offsets)
        widths.append(pos)
    weights = [np.zeros((widths[0], dimension))] + [
        np.zeros((widths[l], widths[l - 1])) for l in range(1, total_depth)
    ]
    biases = [np.zeros(widths[l]) for l in range(total_depth)]
    for layer in range(total_depth):
        for k, chain in enumerate(chains):
            prev = offsets[layer - 1][k] if layer > 0 else 0
            chain.emit(weights[layer], biases[layer], layer, offsets[layer][k], prev)
    out_vec = np.zeros(widths[-1])
    out_bias = const_bias
    for k, (chain, c) in enumerate(zip(chains, coeffs)):
        vec, cb = chain.final_functional(total_depth - 1, widths[-1], offsets[-1][k])
        out_vec += c * vec
        out_bias += c * cb
    layers = [Layer(weights[0], biases[0], IDENTITY)]
    layers += [Layer(w, bv, RELU) for w, bv in zip(weights[1:], biases[1:])]
    layers.append(Layer(out_vec[None, :], np.array([out_bias]), IDENTITY))
    blocks = [
        Block(
            chain.name,
            {
                l: (offsets[l][k], offsets[l][k] + chain.width_at(l))
                for l in range(total_depth)
            },
            chain.domain,
            depth,
            chain.final_functional(total_depth - 1, widths[-1], offsets[-1][k]),
        )
        for k, chain in enumerate(chains)
    ]
    layout = BlockLayout(total_depth, widths, blocks)
    layout.validate()
    return DenseNet(layers), layout


# ---------------------------------------------------------------------------
# Layout sidecar serialization

_LAYOUT_MAGIC = "net-layout 1"


def save_layout(layout, path):
    lines = [
        _LAYOUT_MAGIC,
        f"hidden_layers {layout.n_hidden}",
        "widths " + " ".join(str(v) for v in layout.widths),
        f"blocks {len(layout.blocks)}",
    ]
    for block in layout.blocks:
        meta = ""
        if block.interval is not None:
            meta += f" interval {block.interval[0]:.17g} {block.interval[1]:.17g}"
        if block.depth is not None:
            meta += f" depth {block.depth}"
        lines.append(f"block {block.name}{meta}")
        for layer in sorted(block.spans):
            start, stop = block.spans[layer]
            lines.append(f"span {layer} {start} {stop}")
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


def load_layout(path):
    with open(path) as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines or lines[0] != _LAYOUT_MAGIC:
        raise ValueError(f"{path}: not a layout file (bad header)")
    n_hidden = int(lines[1].split()[1])
    widths = [int(v) for v in lines[2].split()[1:]]
    blocks = []
    for line in lines[4:]:
        parts = line.split()
        if parts[0] == "block":
            name = parts[1]
            interval = None
            depth = None
            if "interval" in parts:
                i = parts.index("interval")
                interval = (float(parts[i + 1]), float(parts[i + 2]))
            if "depth" in parts:
                depth = int(parts[parts.index("depth") + 1])
            blocks.append(Block(name, {}, interval, depth))
        elif parts[0] == "span":
            blocks[-1].spans[int(parts[1])] = (int(parts[2]), int(parts[3]))
        else:
            raise ValueError(f"{path}: unexpected line {line!r}")
    layout = BlockLayout(n_hidden, widths, blocks)
    layout.validate()
    return layout

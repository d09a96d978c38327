"""Tensor-product Legendre bases: multi-indices, evaluation, and fitting.

A multi-index is a plain tuple of per-dimension degrees.  An ``IndexSet``
fixes an ordered collection of distinct multi-indices; an ``Expansion``
attaches one coefficient per index plus the domain box the shifted basis
lives on.  Coefficients are fit by QR-based least squares, never normal
equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import RankDeficiencyError
from .legendre import _check_interval, legendre_eval_shifted

_RANK_TOL = 1e-12


class IndexSet:
    """An ordered set of distinct multi-indices of a common dimension."""

    def __init__(self, dimension, indices):
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        indices = [tuple(int(v) for v in nu) for nu in indices]
        for nu in indices:
            if len(nu) != dimension:
                raise ValueError(f"index {nu} does not have dimension {dimension}")
            if any(v < 0 for v in nu):
                raise ValueError(f"index {nu} has a negative entry")
        if len(set(indices)) != len(indices):
            raise ValueError("duplicate multi-indices")
        self.dimension = dimension
        self.indices = indices

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __getitem__(self, i):
        return self.indices[i]

    def __eq__(self, other):
        return (
            isinstance(other, IndexSet)
            and self.dimension == other.dimension
            and self.indices == other.indices
        )

    def __repr__(self):
        return f"IndexSet(dimension={self.dimension}, size={len(self)})"


def total_degree_set(dimension, max_degree):
    """All multi-indices with total degree <= ``max_degree``, graded-lex ordered.

    Within a grade the indices are in ascending lexicographic order; the
    cardinality is binomial(max_degree + dimension, dimension).
    """
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    if max_degree < 0:
        raise ValueError(f"max_degree must be >= 0, got {max_degree}")
    indices = []
    for grade in range(max_degree + 1):
        indices.extend(_compositions(dimension, grade))
    assert len(indices) == math.comb(max_degree + dimension, dimension)
    return IndexSet(dimension, indices)


def _compositions(d, total):
    """Length-``d`` tuples of nonnegative ints summing to ``total``, lex ascending."""
    if d == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(d - 1, total - first):
            yield (first,) + rest


def eval_basis(nu, x, domain):
    """Evaluate the tensor-product basis function for multi-index ``nu``.

    ``x`` may be a single point of shape (d,) or a batch of shape (n, d);
    the result is a float or an array of shape (n,).
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != len(nu):
        raise ValueError(f"point dimension {x.shape[1]} != index dimension {len(nu)}")
    result = np.ones(x.shape[0])
    for i, order in enumerate(nu):
        if order > 0:
            result = result * legendre_eval_shifted(order, x[:, i], domain)
    return float(result[0]) if single else result


@dataclass
class Expansion:
    """Coefficients over a tensor-product Legendre basis on a box [a, b]^d."""

    index_set: IndexSet
    coefficients: np.ndarray
    domain: tuple = (-1.0, 1.0)

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.shape != (len(self.index_set),):
            raise ValueError(
                f"got {self.coefficients.shape[0] if self.coefficients.ndim else 0} "
                f"coefficients for {len(self.index_set)} indices"
            )
        if not np.all(np.isfinite(self.coefficients)):
            raise ValueError("coefficients must be finite")
        self.domain = _check_interval(self.domain)

    @property
    def dimension(self):
        return self.index_set.dimension

    def __call__(self, x):
        return eval_expansion(self, x)


def eval_expansion(expansion, x):
    """Evaluate sum_nu c_nu Psi_nu(x); the ground truth the nets are checked against."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != expansion.dimension:
        raise ValueError(
            f"point dimension {x.shape[1]} != expansion dimension {expansion.dimension}"
        )
    design = _design_matrix(x, expansion.index_set, expansion.domain)
    values = design @ expansion.coefficients
    return float(values[0]) if single else values


def _design_matrix(points, index_set, domain):
    n = points.shape[0]
    design = np.empty((n, len(index_set)))
    for j, nu in enumerate(index_set):
        design[:, j] = eval_basis(nu, points, domain)
    return design


def fit_least_squares(points, values, index_set, domain):
    """Least-squares coefficients for samples ``(points, values)``.

    Solves min_c ||values - Design c||_2 through a QR factorization and
    returns ``(Expansion, residual)`` where ``residual`` is the 2-norm of
    the misfit at the sample points.

    Raises ``ValueError`` if there are fewer samples than basis functions
    and ``RankDeficiencyError`` (naming the offending index) if the design
    matrix is numerically rank deficient.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    values = np.asarray(values, dtype=float).ravel()
    if points.shape[0] != values.shape[0]:
        raise ValueError("points and values must have equal length")
    if points.shape[1] != index_set.dimension:
        raise ValueError(
            f"point dimension {points.shape[1]} != index dimension {index_set.dimension}"
        )
    m, n = points.shape[0], len(index_set)
    if m < n:
        raise ValueError(f"need at least {n} samples for {n} basis functions, got {m}")
    domain = _check_interval(domain)
    design = _design_matrix(points, index_set, domain)
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    threshold = _RANK_TOL * diag.max() if diag.size else 0.0
    bad = np.nonzero(diag < threshold)[0]
    if bad.size:
        j = int(bad[0])
        raise RankDeficiencyError(
            index_set[j], f"|R[{j},{j}]| = {diag[j]:.3e} < {threshold:.3e}"
        )
    coeffs = solve_triangular(r, q.T @ values)
    residual = float(np.linalg.norm(values - design @ coeffs))
    return Expansion(index_set, coeffs, domain), residual


# ---------------------------------------------------------------------------
# Serialization: structured text, 17 significant digits, stable ordering.

_EXPANSION_MAGIC = "legendre-expansion 1"


def save_expansion(expansion, path):
    """Write an expansion to a structured text file (17 significant digits)."""
    lines = [
        _EXPANSION_MAGIC,
        f"dimension {expansion.dimension}",
        f"domain {expansion.domain[0]:.17g} {expansion.domain[1]:.17g}",
        f"terms {len(expansion.index_set)}",
    ]
    for nu, c in zip(expansion.index_set, expansion.coefficients):
        lines.append("term " + " ".join(str(v) for v in nu) + f" {c:.17g}")
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


def load_expansion(path):
    """Read an expansion written by :func:`save_expansion`."""
    with open(path) as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines or lines[0] != _EXPANSION_MAGIC:
        raise ValueError(f"{path}: not an expansion file (bad header)")
    header = dict(line.split(maxsplit=1) for line in lines[1:4])
    dimension = int(header["dimension"])
    domain = tuple(float(v) for v in header["domain"].split())
    n_terms = int(header["terms"])
    indices, coeffs = [], []
    for line in lines[4:]:
        parts = line.split()
        if parts[0] != "term":
            raise ValueError(f"{path}: unexpected line {line!r}")
        indices.append(tuple(int(v) for v in parts[1 : 1 + dimension]))
        coeffs.append(float(parts[1 + dimension]))
    if len(indices) != n_terms:
        raise ValueError(f"{path}: expected {n_terms} terms, found {len(indices)}")
    return Expansion(IndexSet(dimension, indices), np.array(coeffs), domain)

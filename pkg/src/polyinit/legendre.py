"""Univariate Legendre polynomials: evaluation, roots, and factored form.

Evaluation uses the classical normalization (L_n(1) = 1) via the three-term
recurrence.  Roots come from the eigenvalues of the symmetric tridiagonal
Jacobi matrix, which is unconditionally stable for orthogonal families.  The
factored form ``scale * prod(x - r_k)`` is what the network constructions
consume: each root becomes one shifted input node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .exceptions import RootSolveError

# Leading coefficients overflow useful precision well before double overflow;
# nothing downstream needs more than degree 8.
MAX_DEGREE = 30

_ROOT_RESIDUAL_TOL = 1e-10


def legendre_eval(n, x):
    """Evaluate the degree-``n`` Legendre polynomial at ``x``.

    Uses the recurrence (k+1) L_{k+1} = (2k+1) x L_k - k L_{k-1} with
    L_0 = 1 and L_1 = x.  ``x`` may be a scalar or an ndarray; the return
    value matches its shape.
    """
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = x.copy()
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1) * x * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def legendre_eval_shifted(n, x, domain):
    """Evaluate L_n pulled back to the interval ``domain = (a, b)``.

    Returns L_n(2 (x - a) / (b - a) - 1), i.e. the member of the shifted
    Legendre family that is orthogonal on [a, b].
    """
    a, b = _check_interval(domain)
    x = np.asarray(x, dtype=float)
    t = 2.0 * (x - a) / (b - a) - 1.0
    return legendre_eval(n, t)


def legendre_roots(n):
    """Roots of L_n, sorted ascending.

    Computed as eigenvalues of the Jacobi matrix (zero diagonal,
    off-diagonal beta_k = k / sqrt(4 k^2 - 1)).  Every returned root is
    checked to satisfy |L_n(root)| <= 1e-10.
    """
    if n < 1:
        raise ValueError(f"degree must be >= 1 for roots, got {n}")
    if n == 1:
        return np.array([0.0])
    k = np.arange(1, n, dtype=float)
    beta = k / np.sqrt(4.0 * k * k - 1.0)
    try:
        roots = eigh_tridiagonal(np.zeros(n), beta, eigvals_only=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - scipy rarely fails here
        raise RootSolveError(n, str(exc)) from exc
    roots = np.sort(roots)
    residual = np.max(np.abs(legendre_eval(n, roots)))
    if not np.isfinite(residual) or residual > _ROOT_RESIDUAL_TOL:
        raise RootSolveError(n, f"max |L_n(root)| = {residual:.3e}")
    return roots


def leading_coefficient(n):
    """Leading coefficient (2n)! / (2^n (n!)^2) of L_n, computed stably."""
    scale = 1.0
    for k in range(1, n + 1):
        scale *= (2 * k - 1) / k
    return scale


@dataclass(frozen=True)
class UnivariatePoly:
    """A univariate polynomial in root-factored form: scale * prod(x - r_k).

    ``basis_index`` records which member of the (shifted) Legendre family
    this is; ``degree`` equals ``len(roots)``.
    """

    degree: int
    basis_index: int
    leading_scale: float
    roots: tuple

    def __post_init__(self):
        if self.degree != len(self.roots):
            raise ValueError("degree must equal the number of roots")
        if list(self.roots) != sorted(self.roots):
            raise ValueError("roots must be sorted ascending")
        if not np.isfinite(self.leading_scale):
            raise ValueError("leading scale must be finite")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        result = np.full_like(x, self.leading_scale)
        for r in self.roots:
            result = result * (x - r)
        return result if result.ndim else float(result)


def factorize(n, domain=(-1.0, 1.0)):
    """Root-factored form of the degree-``n`` Legendre polynomial on ``domain``.

    For the default domain this is L_n itself.  For a general interval
    [a, b] the polynomial is L_n(2 (x - a)/(b - a) - 1); its roots are the
    Legendre roots mapped affinely into (a, b) and its leading scale picks
    up a factor (2 / (b - a))^n.
    """
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if n > MAX_DEGREE:
        raise ValueError(f"degree {n} exceeds the supported cap {MAX_DEGREE}")
    a, b = _check_interval(domain)
    if n == 0:
        return UnivariatePoly(0, 0, 1.0, ())
    roots = legendre_roots(n)
    mapped = a + (roots + 1.0) * (b - a) / 2.0
    scale = leading_coefficient(n) * (2.0 / (b - a)) ** n
    return UnivariatePoly(n, n, scale, tuple(np.sort(mapped)))


def _check_interval(domain):
    a, b = float(domain[0]), float(domain[1])
    if not (np.isfinite(a) and np.isfinite(b)) or b <= a:
        raise ValueError(f"degenerate interval [{a}, {b}]: need a < b")
    return a, b

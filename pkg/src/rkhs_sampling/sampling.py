"""Finite-sample reconstruction with Lagrange (dual Riesz) bases.

For a point set ``X = {x_1, ..., x_n}`` the kernel sections ``K(., x_j)``
form a Riesz basis of their span. Its dual basis is the Lagrange basis
``l_k`` with ``l_k(x_j) = delta_jk``, whose kernel coefficients are the
columns of ``A^{-1}``. The interpolant to data ``f_X`` is
``s = sum_j f(x_j) l_j = sum_j c_j K(., x_j)`` with ``c = A^{-1} f_X``.

Native inner products are always taken through Gram coefficients, never by
quadrature.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import check_array2d, check_vector
from .exceptions import DimensionError
from .linalg import as_pointset, assemble_gram, native_inner, native_norm_sq, riesz_constants

__all__ = [
    "SamplingModel",
    "DualBasisVector",
    "StabilityCheck",
    "DualRepresentations",
    "fit",
    "evaluate",
    "lagrange_basis",
    "lagrange_values",
    "eval_dual",
    "biorthogonality_residual",
    "stability_check_dual",
    "stability_check_primal",
    "dual_representations",
]

DEFAULT_SLACK = 1e-10


def _expand(kernel, points, coeffs, x):
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 0 or (X.ndim == 1 and X.size == kernel.dim)
    Xq = check_array2d(X, kernel.dim, "x")
    values = kernel._matrix(Xq, points.coords) @ coeffs
    return float(values[0]) if single else values


@dataclass(frozen=True)
class SamplingModel:
    """An element ``s = sum_j c_j K(., x_j)`` of the span, fitted to samples.

    Calling the model evaluates ``s`` at one point (returns a float) or at
    an ``(q, d)`` array of points (returns an array).
    """

    kernel: object
    points: object
    samples: np.ndarray
    coeffs: np.ndarray
    gram: object

    @property
    def dim(self):
        return self.kernel.dim

    def __call__(self, x):
        return _expand(self.kernel, self.points, self.coeffs, x)

    def node_residual(self):
        """Max-abs deviation of the model from its samples at the nodes."""
        return float(np.max(np.abs(self(self.points.coords) - self.samples)))


@dataclass(frozen=True)
class DualBasisVector:
    """Dual basis function ``l_k = sum_n (A^{-1} e_k)_n K(., x_n)``.

    ``index`` is 0-based; ``coeffs`` holds ``A^{-1} e_k``.
    """

    index: int
    coeffs: np.ndarray
    gram: object

    def __call__(self, x):
        return _expand(self.gram.kernel, self.gram.points, self.coeffs, x)


def fit(k, X, f_X):
    """Interpolate samples ``f_X`` on ``X``; coefficients solve ``A c = f_X``."""
    X = as_pointset(X, k.dim)
    f_X = check_vector(f_X, len(X), "samples")
    G = assemble_gram(k, X)
    return fit_gram(G, f_X)


def fit_gram(G, f_X):
    """Like :func:`fit` for an already assembled Gram matrix."""
    f_X = check_vector(f_X, G.n, "samples")
    coeffs = G.solve(f_X)
    return SamplingModel(G.kernel, G.points, f_X.copy(), coeffs, G)


def evaluate(model, x):
    """Evaluate a fitted model, ``s(x) = <c, R_X(x)>``."""
    return model(x)


def lagrange_basis(G, k):
    """Dual (Lagrange) basis vector for the 0-based node index ``k``.

    Costs one pair of triangular solves against the cached factor.
    """
    n = G.n
    if not 0 <= k < n:
        raise IndexError(f"basis index {k} out of range 0..{n - 1}")
    e = np.zeros(n)
    e[k] = 1.0
    return DualBasisVector(int(k), G.solve(e), G)


def eval_dual(L, x):
    """Evaluate a dual basis function at ``x``."""
    return L(x)


def lagrange_values(G, x):
    """All Lagrange basis values ``l(x)`` at one point, from ``A l(x) = R_X(x)``."""
    k = G.kernel
    Xq = check_array2d(x, k.dim, "x")
    if Xq.shape[0] != 1:
        raise DimensionError("lagrange_values takes a single point")
    R = k._matrix(G.points.coords, Xq)[:, 0]
    return G.solve(R)


def biorthogonality_residual(G):
    """``max_{j,k} |(K(., x_j), l_k)_K - delta_jk|``, i.e. ``max|A A^{-1} - I|``."""
    n = G.n
    I = np.eye(n)
    Ainv = G.solve(I)
    return float(np.max(np.abs(G.entries @ Ainv - I)))


class StabilityCheck(NamedTuple):
    lhs: float
    mid: float
    rhs: float
    ok: bool

    def to_dict(self):
        return {"lhs": self.lhs, "mid": self.mid, "rhs": self.rhs, "ok": self.ok}


def _sandwich(lhs, mid, rhs, slack):
    ok = lhs <= mid * (1.0 + slack) and mid <= rhs * (1.0 + slack)
    return StabilityCheck(float(lhs), float(mid), float(rhs), bool(ok))


def stability_check_dual(G, f_X, slack=DEFAULT_SLACK):
    """Check ``|f_X|^2 / Lambda <= |sum f(x_j) l_j|_K^2 <= |f_X|^2 / lambda``."""
    f_X = check_vector(f_X, G.n, "samples")
    bounds = riesz_constants(G)
    sq = float(f_X @ f_X)
    mid = native_norm_sq(G, G.solve(f_X))
    return _sandwich(sq / bounds.lambda_max, mid, sq / bounds.lambda_min, slack)


def stability_check_primal(G, c, slack=DEFAULT_SLACK):
    """Check ``lambda |s|_K^2 <= |s_X|^2 <= Lambda |s|_K^2`` for ``s = sum c_j K(., x_j)``."""
    c = check_vector(c, G.n, "coefficients")
    bounds = riesz_constants(G)
    s_X = G.entries @ c
    norm_sq = native_norm_sq(G, c)
    return _sandwich(bounds.lambda_min * norm_sq, float(s_X @ s_X), bounds.lambda_max * norm_sq, slack)


class DualRepresentations(NamedTuple):
    coeffs_lagrange: np.ndarray
    coeffs_kernel: np.ndarray


def dual_representations(G, c):
    """Both expansions of ``f = sum_j c_j K(., x_j)``.

    Returns ``(f, K(., x_j))_K`` (coefficients in the Lagrange basis) and
    ``(f, l_j)_K`` (coefficients in the kernel basis), each computed as a
    native inner product. The latter reproduces ``c``.
    """
    c = check_vector(c, G.n, "coefficients")
    n = G.n
    I = np.eye(n)
    Ainv = G.solve(I)
    lagrange = np.array([native_inner(G, c, I[j]) for j in range(n)])
    kernel = np.array([native_inner(G, c, Ainv[:, j]) for j in range(n)])
    return DualRepresentations(lagrange, kernel)

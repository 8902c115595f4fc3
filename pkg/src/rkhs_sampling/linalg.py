"""Kernel matrices: assembly, Cholesky factorization, spectra and native norms.

A :class:`GramMatrix` holds the symmetric matrix ``A[j, k] = K(x_j, x_k)``
for a :class:`PointSet`. Its Cholesky factor and eigendecomposition are
computed lazily, once, and cached.
"""

import threading
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, eigh
from scipy.linalg.lapack import dpotrf

from ._validation import check_array2d, check_vector
from .exceptions import DimensionError, DuplicatePointError, NotPositiveDefiniteError, NumericalError

__all__ = [
    "PointSet",
    "GramMatrix",
    "RieszBounds",
    "assemble_gram",
    "cholesky",
    "riesz_constants",
    "native_norm_sq",
    "native_inner",
    "solve_spd",
    "pd_threshold",
    "UNIT_ROUNDOFF",
]

UNIT_ROUNDOFF = np.finfo(np.float64).eps / 2


def find_duplicates(coords):
    """Return pairs ``(i, j)``, ``i < j``, of exactly coinciding rows."""
    if len(coords) < 2:
        return []
    order = np.lexsort(coords.T[::-1])
    srt = coords[order]
    same = np.all(srt[1:] == srt[:-1], axis=1)
    pairs = []
    first = None
    for pos in range(1, len(srt)):
        if same[pos - 1]:
            if first is None:
                first = order[pos - 1]
            pairs.append(tuple(sorted((int(first), int(order[pos])))))
        else:
            first = None
    return sorted(pairs)


class PointSet:
    """An ordered, non-empty set of pairwise distinct points in R^d.

    Parameters
    ----------
    points : array-like, shape (n, d)
        Point coordinates. A 1-D array is read as ``n`` points in R^1.
    dim : int, optional
        Expected dimension.
    """

    def __init__(self, points, dim=None):
        coords = check_array2d(points, dim, "points").copy()
        if coords.shape[0] == 0:
            raise ValueError("a point set must be non-empty")
        dups = find_duplicates(coords)
        if dups:
            listed = ", ".join(f"{i}/{j}" for i, j in dups[:10])
            raise DuplicatePointError(f"duplicate points at indices {listed}", dups)
        coords.setflags(write=False)
        self.coords = coords

    @property
    def dim(self):
        return self.coords.shape[1]

    def __len__(self):
        return self.coords.shape[0]

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def prefix(self, n):
        """The first ``n`` points as a new PointSet."""
        if not 1 <= n <= len(self):
            raise IndexError(f"prefix size {n} out of range 1..{len(self)}")
        out = PointSet.__new__(PointSet)
        out.coords = self.coords[:n]
        return out

    def min_separation(self):
        """Smallest pairwise Euclidean distance (``inf`` for one point)."""
        if len(self) < 2:
            return np.inf
        from .kernels import squared_distances

        D = squared_distances(self.coords, self.coords)
        np.fill_diagonal(D, np.inf)
        return float(np.sqrt(D.min()))

    def __repr__(self):
        return f"PointSet(n={len(self)}, dim={self.dim})"


def as_pointset(X, dim=None):
    if isinstance(X, PointSet):
        if dim is not None and X.dim != dim:
            raise DimensionError(f"point set has dimension {X.dim}, expected {dim}")
        return X
    return PointSet(X, dim)


@dataclass(frozen=True)
class RieszBounds:
    """Extreme eigenvalues of a kernel matrix (the Riesz constants)."""

    lambda_min: float
    lambda_max: float

    @property
    def condition(self):
        return self.lambda_max / self.lambda_min

    def to_dict(self):
        return {
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "condition": self.condition,
        }


def pd_threshold(n, max_diag):
    """Numerical positive definiteness threshold ``n * u * max_diag`` for Cholesky pivots."""
    return n * UNIT_ROUNDOFF * max_diag


class GramMatrix:
    """Symmetric kernel matrix with lazily cached Cholesky factor and spectrum.

    Use :func:`assemble_gram` to build one from a kernel and a point set.
    Calling ``GramMatrix(A)`` directly wraps an existing symmetric matrix;
    such a matrix has no kernel or points and cannot be evaluated.
    """

    def __init__(self, entries, kernel=None, points=None):
        entries = np.array(entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionError(f"Gram matrix must be square, got shape {entries.shape}")
        entries.setflags(write=False)
        self.entries = entries
        self.kernel = kernel
        self.points = points
        self._lock = threading.Lock()
        self._chol = None
        self._eig = None

    @property
    def n(self):
        return self.entries.shape[0]

    def __len__(self):
        return self.n

    @property
    def chol(self):
        """Lower Cholesky factor, computed on first access."""
        if self._chol is None:
            with self._lock:
                if self._chol is None:
                    self._chol = _checked_cholesky(self.entries)
        return self._chol

    @property
    def has_chol(self):
        return self._chol is not None

    def eigh(self):
        """Ascending eigenvalues and orthonormal eigenvectors (cached)."""
        if self._eig is None:
            with self._lock:
                if self._eig is None:
                    try:
                        w, V = eigh(self.entries)
                    except LinAlgError as exc:
                        raise NumericalError(f"symmetric eigensolver failed: {exc}") from exc
                    w.setflags(write=False)
                    V.setflags(write=False)
                    self._eig = (w, V)
        return self._eig

    @property
    def spectrum(self):
        return self.eigh()[0]

    def solve(self, b):
        """Solve ``A x = b`` for a vector or a matrix of right-hand sides."""
        return cho_solve((self.chol, True), b, check_finite=False)

    def matvec(self, c):
        return self.entries @ c

    def __repr__(self):
        return f"GramMatrix(n={self.n}, kernel={self.kernel!r})"


def _checked_cholesky(A):
    n = A.shape[0]
    if not np.array_equal(A, A.T):
        raise ValueError("Cholesky requires a symmetric matrix")
    threshold = pd_threshold(n, float(np.max(np.abs(np.diag(A)))) if n else 0.0)
    L, info = dpotrf(A, lower=1, clean=1, overwrite_a=0)
    if info < 0:
        raise NumericalError(f"dpotrf: illegal argument {-info}")
    if info > 0:
        # LAPACK stops at the first non-positive pivot (1-based info).
        raise NotPositiveDefiniteError(info - 1, float("nan"), threshold)
    pivots = np.diag(L) ** 2
    bad = np.flatnonzero(pivots <= threshold)
    if bad.size:
        raise NotPositiveDefiniteError(int(bad[0]), float(pivots[bad[0]]), threshold)
    L.setflags(write=False)
    return L


def assemble_gram(k, X):
    """Assemble ``A[j, k] = K(x_j, x_k)`` on a pairwise distinct point set.

    The upper triangle is computed once and mirrored so that the result is
    symmetric bit for bit.
    """
    X = as_pointset(X)
    if X.dim != k.dim:
        raise DimensionError(f"kernel dimension {k.dim} does not match point dimension {X.dim}")
    A = k._matrix(X.coords, X.coords)
    upper = np.triu(A)
    A = upper + np.triu(A, 1).T
    return GramMatrix(A, kernel=k, points=X)


def cholesky(G):
    """Populate and return ``G`` with its Cholesky factor.

    Raises :class:`NotPositiveDefiniteError` carrying the failing pivot when
    a pivot does not exceed ``n * u * max(diag(A))``.
    """
    G.chol
    return G


def riesz_constants(G):
    """Smallest and largest eigenvalue of ``G`` via a full symmetric eigendecomposition."""
    w = G.spectrum
    lo, hi = float(w[0]), float(w[-1])
    if not lo > 0:
        raise NumericalError(f"smallest eigenvalue {lo:.3e} is not positive")
    return RieszBounds(lo, hi)


def native_norm_sq(G, c):
    """Squared native norm ``c^T A c`` of ``sum_j c_j K(., x_j)``."""
    c = check_vector(c, G.n, "coefficients")
    return float(c @ (G.entries @ c))


def native_inner(G, c_f, c_g):
    """Native inner product ``c_f^T A c_g`` of two span elements."""
    c_f = check_vector(c_f, G.n, "c_f")
    c_g = check_vector(c_g, G.n, "c_g")
    return float(c_f @ (G.entries @ c_g))


def solve_spd(G, b):
    """Solve ``A x = b`` through the (cached) Cholesky factor."""
    b = check_vector(b, G.n, "right-hand side")
    return G.solve(b)

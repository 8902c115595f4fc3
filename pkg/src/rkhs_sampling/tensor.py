"""Tensor-product kernels on product grids with Kronecker-structured solves.

On a grid ``X x Y`` the Gram matrix of ``K1 (x) K2`` is ``A1 (x) A2``. The
grid is linearized row-major with the second factor fastest:
``(j, k) -> j * m + k`` and ``point(j, k) = (x_j, y_k)``. Under this
convention ``(A1 (x) A2) vec(C) = vec(A1 C A2)`` with ``vec = C.ravel()``,
so interpolation on the grid only needs the two factor factorizations.
"""

import csv
import io
import statistics
import time
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .exceptions import DimensionError
from .kernels import Gaussian, TensorProduct
from .linalg import PointSet, RieszBounds, as_pointset, assemble_gram, riesz_constants
from .sampling import DualBasisVector, SamplingModel

__all__ = [
    "TensorGrid",
    "KroneckerGram",
    "BenchRow",
    "product_kernel",
    "kron_solve",
    "tensor_fit",
    "tensor_dual",
    "tensor_riesz_constants",
    "tensor_gram",
    "bench_tensor_vs_dense",
    "DENSE_BUDGET",
]

DENSE_BUDGET = 4096


def product_kernel(k1, k2):
    """The tensor-product kernel ``K((x, y), (x', y')) = K1(x, x') * K2(y, y')``."""
    return TensorProduct(k1, k2)


class TensorGrid:
    """Product grid ``X x Y`` of two point sets."""

    def __init__(self, factor_x, factor_y):
        self.factor_x = as_pointset(factor_x)
        self.factor_y = as_pointset(factor_y)

    @property
    def shape(self):
        return len(self.factor_x), len(self.factor_y)

    @property
    def dim(self):
        return self.factor_x.dim + self.factor_y.dim

    def __len__(self):
        n, m = self.shape
        return n * m

    def linear_index(self, j, k):
        return j * len(self.factor_y) + k

    def points(self):
        """The linearized grid as a PointSet of ``n * m`` points."""
        n, m = self.shape
        coords = np.hstack(
            [np.repeat(self.factor_x.coords, m, axis=0), np.tile(self.factor_y.coords, (n, 1))]
        )
        # Distinct factors give distinct grid points; skip the duplicate scan.
        out = PointSet.__new__(PointSet)
        coords.setflags(write=False)
        out.coords = coords
        return out


class KroneckerGram:
    """The Gram matrix ``A1 (x) A2`` of a product kernel on a grid, kept factored."""

    def __init__(self, gram_x, gram_y, grid=None):
        self.gram_x = gram_x
        self.gram_y = gram_y
        self.grid = grid
        self._points = None

    @classmethod
    def assemble(cls, k1, k2, grid):
        return cls(assemble_gram(k1, grid.factor_x), assemble_gram(k2, grid.factor_y), grid)

    @property
    def shape(self):
        return self.gram_x.n, self.gram_y.n

    @property
    def n(self):
        return self.gram_x.n * self.gram_y.n

    @property
    def kernel(self):
        return product_kernel(self.gram_x.kernel, self.gram_y.kernel)

    @property
    def points(self):
        if self._points is None:
            grid = self.grid or TensorGrid(self.gram_x.points, self.gram_y.points)
            self._points = grid.points()
        return self._points

    def matmat(self, B):
        """``(A1 (x) A2) @ B`` for ``B`` of shape ``(n*m,)`` or ``(n*m, r)``."""
        n, m = self.shape
        B = np.asarray(B, dtype=np.float64)
        r = 1 if B.ndim == 1 else B.shape[1]
        W = _matmat(self.gram_x, B.reshape(n, m * r)).reshape(n, m, r)
        W = W.transpose(1, 0, 2).reshape(m, n * r)
        W = _matmat(self.gram_y, W).reshape(m, n, r).transpose(1, 0, 2)
        return W.reshape(B.shape)

    matvec = matmat

    def solve(self, B):
        """Solve ``(A1 (x) A2) X = B`` by factor solves; ``B`` is a vector or a matrix."""
        n, m = self.shape
        B = np.asarray(B, dtype=np.float64)
        r = 1 if B.ndim == 1 else B.shape[1]
        W = self.gram_x.solve(B.reshape(n, m * r)).reshape(n, m, r)
        W = W.transpose(1, 0, 2).reshape(m, n * r)
        W = self.gram_y.solve(W).reshape(m, n, r).transpose(1, 0, 2)
        return W.reshape(B.shape)

    def materialize(self, budget=DENSE_BUDGET):
        """Dense ``A1 (x) A2``; refused above ``budget`` rows. Meant for checks."""
        if self.n > budget:
            raise MemoryError(f"refusing to materialize a {self.n} x {self.n} Kronecker matrix")
        return np.kron(_dense(self.gram_x), _dense(self.gram_y))


def _dense(G):
    return G.materialize() if isinstance(G, KroneckerGram) else G.entries


def _matmat(G, B):
    return G.matmat(B) if isinstance(G, KroneckerGram) else G.entries @ B


def tensor_gram(kernels, factors):
    """Nested Kronecker Gram ``((A1 (x) A2) (x) A3) ...`` for d factor kernels and point sets.

    The first factor varies slowest in the linearization.
    """
    kernels = list(kernels)
    factors = list(factors)
    if len(kernels) != len(factors) or len(kernels) < 2:
        raise ValueError("need matching lists of at least two kernels and factor point sets")
    G = assemble_gram(kernels[0], factors[0])
    for k, X in zip(kernels[1:], factors[1:]):
        G = KroneckerGram(G, assemble_gram(k, X))
    return G


def kron_solve(KG, F):
    """Solve ``(A1 (x) A2) vec(C) = vec(F)`` for an ``n x m`` right-hand side.

    Computes ``C = A1^{-1} F A2^{-1}`` with the factor Cholesky factors at
    cost ``O(n^3 + m^3 + nm(n + m))``.
    """
    n, m = KG.shape
    F = np.asarray(F, dtype=np.float64)
    if F.shape != (n, m):
        raise DimensionError(f"right-hand side has shape {F.shape}, expected {(n, m)}")
    W = KG.gram_x.solve(F)
    return KG.gram_y.solve(W.T).T


def tensor_fit(k1, k2, grid, samples):
    """Interpolate grid samples ``F[j, k] = f(x_j, y_k)`` with the product kernel."""
    KG = KroneckerGram.assemble(k1, k2, grid)
    C = kron_solve(KG, samples)
    F = np.asarray(samples, dtype=np.float64)
    return SamplingModel(KG.kernel, KG.points, F.ravel().copy(), C.ravel(), KG)


def tensor_dual(KG, j, k):
    """Product dual function ``L_{1,j} * L_{2,k}``; coefficients ``vec((A1^-1 e_j)(A2^-1 e_k)^T)``."""
    n, m = KG.shape
    if not (0 <= j < n and 0 <= k < m):
        raise IndexError(f"grid index ({j}, {k}) out of range for shape {(n, m)}")
    ej = np.zeros(n)
    ej[j] = 1.0
    ek = np.zeros(m)
    ek[k] = 1.0
    coeffs = np.outer(KG.gram_x.solve(ej), KG.gram_y.solve(ek)).ravel()
    return DualBasisVector(j * m + k, coeffs, KG)


def tensor_riesz_constants(KG):
    """Riesz constants of ``A1 (x) A2`` as products of the factor constants."""
    bx, by = (
        tensor_riesz_constants(G) if isinstance(G, KroneckerGram) else riesz_constants(G)
        for G in (KG.gram_x, KG.gram_y)
    )
    return RieszBounds(bx.lambda_min * by.lambda_min, bx.lambda_max * by.lambda_max)


@dataclass
class BenchRow:
    n: int
    m: int
    t_tensor_ms: float
    t_dense_ms: float
    dense_skipped: bool

    @property
    def speedup(self):
        if self.dense_skipped or self.t_tensor_ms <= 0:
            return float("nan")
        return self.t_dense_ms / self.t_tensor_ms


def _bench_grid(n, m, rng):
    # Unit-spaced nodes with small jitter keep both factors well conditioned.
    gx = np.arange(n, dtype=np.float64) + rng.uniform(-0.2, 0.2, n)
    gy = np.arange(m, dtype=np.float64) + rng.uniform(-0.2, 0.2, m)
    return TensorGrid(gx, gy)


def bench_tensor_vs_dense(sizes, trials=3, k1=None, k2=None, dense_budget=DENSE_BUDGET, seed=0xC0FFEE):
    """Time the Kronecker path against dense assemble + factor + solve.

    Parameters
    ----------
    sizes : list of (n, m)
        Factor grid sizes.
    trials : int
        Repetitions per size; the median wall time is reported.
    k1, k2 : KernelSpec, optional
        One-dimensional factor kernels, Gaussian by default.
    dense_budget : int
        The dense path is skipped when ``n * m`` exceeds this.

    Returns
    -------
    list of BenchRow
    """
    k1 = k1 or Gaussian()
    k2 = k2 or Gaussian()
    kernel = product_kernel(k1, k2)
    rng = np.random.default_rng(seed)
    rows = []
    with threadpool_limits(limits=1):
        for n, m in sizes:
            grid = _bench_grid(n, m, rng)
            F = rng.standard_normal((n, m))
            t_tensor = []
            t_dense = []
            for _ in range(trials):
                t0 = time.perf_counter()
                KG = KroneckerGram.assemble(k1, k2, grid)
                kron_solve(KG, F)
                t_tensor.append(time.perf_counter() - t0)
                if n * m <= dense_budget:
                    t0 = time.perf_counter()
                    G = assemble_gram(kernel, grid.points())
                    G.solve(F.ravel())
                    t_dense.append(time.perf_counter() - t0)
            skipped = not t_dense
            rows.append(
                BenchRow(
                    int(n),
                    int(m),
                    1e3 * statistics.median(t_tensor),
                    float("nan") if skipped else 1e3 * statistics.median(t_dense),
                    skipped,
                )
            )
    return rows


def bench_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "m", "t_tensor_ms", "t_dense_ms", "speedup", "dense_skipped"])
    for r in rows:
        writer.writerow(
            [
                r.n,
                r.m,
                f"{r.t_tensor_ms:.6g}",
                "" if r.dense_skipped else f"{r.t_dense_ms:.6g}",
                "" if r.dense_skipped else f"{r.speedup:.6g}",
                str(r.dense_skipped).lower(),
            ]
        )
    return buf.getvalue()

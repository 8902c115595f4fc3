"""scikit-learn compatible estimators wrapping the sampling machinery."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .kernels import Gaussian, InverseMultiquadric, KernelSpec
from .linalg import PointSet, assemble_gram, riesz_constants
from .sampling import biorthogonality_residual, fit_gram, lagrange_basis
from .tensor import KroneckerGram, TensorGrid, kron_solve, tensor_riesz_constants

__all__ = ["KernelInterpolator", "TensorGridInterpolator"]

_FAMILIES = {"gaussian": Gaussian, "imq": InverseMultiquadric}


def _make_kernel(kernel, shape, dim):
    if isinstance(kernel, KernelSpec):
        if kernel.dim != dim:
            raise ValueError(f"kernel dimension {kernel.dim} does not match data dimension {dim}")
        return kernel
    try:
        family = _FAMILIES[kernel]
    except KeyError:
        raise ValueError(f"kernel must be 'gaussian', 'imq' or a KernelSpec, got {kernel!r}") from None
    return family(shape=shape, dim=dim)


class KernelInterpolator(RegressorMixin, BaseEstimator):
    """Exact kernel interpolation on scattered, pairwise distinct points.

    The fitted function is ``s(x) = sum_j dual_coef_[j] K(x, X[j])`` with
    ``s(X[j]) = y[j]``. There is no regularization, so duplicate training
    points are rejected.

    Parameters
    ----------
    kernel : {'gaussian', 'imq'} or KernelSpec, default='gaussian'
        Kernel family, or a fully specified kernel of the data dimension.
    shape : float, default=1.0
        Shape parameter for a named kernel family.

    Attributes
    ----------
    model_ : SamplingModel
    dual_coef_ : ndarray of shape (n_samples,)
    X_fit_ : ndarray of shape (n_samples, n_features)
    kernel_ : KernelSpec
    """

    def __init__(self, kernel="gaussian", shape=1.0):
        self.kernel = kernel
        self.shape = shape

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        self.kernel_ = _make_kernel(self.kernel, self.shape, X.shape[1])
        self.gram_ = assemble_gram(self.kernel_, PointSet(X))
        self.model_ = fit_gram(self.gram_, y.astype(np.float64))
        self.dual_coef_ = self.model_.coeffs
        self.X_fit_ = self.gram_.points.coords
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return self.kernel_._matrix(X, self.X_fit_) @ self.dual_coef_

    def lagrange_basis(self, k):
        """Lagrange (dual) basis function for training node ``k``."""
        check_is_fitted(self, "model_")
        return lagrange_basis(self.gram_, k)

    def riesz_bounds(self):
        check_is_fitted(self, "model_")
        return riesz_constants(self.gram_)

    def biorthogonality_residual(self):
        check_is_fitted(self, "model_")
        return biorthogonality_residual(self.gram_)


class TensorGridInterpolator(BaseEstimator):
    """Interpolation on a product grid through the Kronecker-factored solve.

    ``fit`` takes the two factor point sets and the ``n x m`` sample matrix
    ``F[j, k] = f(x_j, y_k)``; ``predict`` takes points in the product
    space, with the first ``d1`` coordinates belonging to the first factor.

    Parameters
    ----------
    kernel_x, kernel_y : {'gaussian', 'imq'} or KernelSpec
    shape_x, shape_y : float
    """

    def __init__(self, kernel_x="gaussian", kernel_y="gaussian", shape_x=1.0, shape_y=1.0):
        self.kernel_x = kernel_x
        self.kernel_y = kernel_y
        self.shape_x = shape_x
        self.shape_y = shape_y

    def fit(self, grid, F):
        if not isinstance(grid, TensorGrid):
            grid = TensorGrid(*grid)
        F = check_array(F)
        self.grid_ = grid
        self.kernel_x_ = _make_kernel(self.kernel_x, self.shape_x, grid.factor_x.dim)
        self.kernel_y_ = _make_kernel(self.kernel_y, self.shape_y, grid.factor_y.dim)
        self.gram_ = KroneckerGram.assemble(self.kernel_x_, self.kernel_y_, grid)
        self.coef_ = kron_solve(self.gram_, F)
        self.n_features_in_ = grid.dim
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        d1 = self.grid_.factor_x.dim
        Rx = self.kernel_x_._matrix(X[:, :d1], self.grid_.factor_x.coords)
        Ry = self.kernel_y_._matrix(X[:, d1:], self.grid_.factor_y.coords)
        # s(x, y) = R_X(x)^T C R_Y(y), without forming the n*m sections.
        return np.einsum("qj,jk,qk->q", Rx, self.coef_, Ry)

    def riesz_bounds(self):
        check_is_fitted(self, "coef_")
        return tensor_riesz_constants(self.gram_)

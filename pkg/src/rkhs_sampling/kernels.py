"""Positive definite kernels on R^d and their pointwise evaluation.

Three kernel families are available:

* :class:`Gaussian` -- ``exp(-eps^2 |x - y|^2)``
* :class:`InverseMultiquadric` -- ``(1 + eps^2 |x - y|^2)^(-1/2)``
* :class:`TensorProduct` -- ``K1(x', y') * K2(x'', y'')`` where the first
  ``left.dim`` coordinates go to the left factor and the rest to the right.

Tensor products nest, so d-fold products are built pairwise. All kernel
objects are frozen dataclasses and can be shared between threads.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_array2d, check_point
from .exceptions import DimensionError

__all__ = [
    "KernelSpec",
    "Gaussian",
    "InverseMultiquadric",
    "TensorProduct",
    "eval_kernel",
    "kernel_section",
    "kernel_from_dict",
    "kernel_to_dict",
    "squared_distances",
]


def squared_distances(X, Y):
    """Pairwise squared Euclidean distances between the rows of X and Y.

    Coordinates are accumulated one axis at a time in a fixed order, so the
    result for ``(x, y)`` is bit-identical to the result for ``(y, x)``.
    """
    D = np.zeros((X.shape[0], Y.shape[0]), dtype=np.float64)
    for axis in range(X.shape[1]):
        diff = X[:, axis, None] - Y[None, :, axis]
        D += diff * diff
    return D


class KernelSpec:
    """Base class for kernels. Subclasses implement :meth:`_matrix`."""

    dim: int

    def matrix(self, X, Y=None):
        """Cross kernel matrix ``K(X[i], Y[j])`` of shape ``(len(X), len(Y))``."""
        X = check_array2d(X, self.dim, "X")
        Y = X if Y is None else check_array2d(Y, self.dim, "Y")
        return self._matrix(X, Y)

    def __call__(self, x, y):
        return eval_kernel(self, x, y)

    def _matrix(self, X, Y):
        raise NotImplementedError


def _check_shape(shape):
    shape = float(shape)
    if not np.isfinite(shape) or shape <= 0:
        raise ValueError(f"shape parameter must be a positive finite number, got {shape}")
    return shape


def _check_dim(dim):
    if int(dim) != dim or dim < 1:
        raise ValueError(f"dim must be a positive integer, got {dim}")
    return int(dim)


@dataclass(frozen=True)
class Gaussian(KernelSpec):
    shape: float = 1.0
    dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "shape", _check_shape(self.shape))
        object.__setattr__(self, "dim", _check_dim(self.dim))

    def _matrix(self, X, Y):
        return np.exp(-(self.shape * self.shape) * squared_distances(X, Y))


@dataclass(frozen=True)
class InverseMultiquadric(KernelSpec):
    shape: float = 1.0
    dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "shape", _check_shape(self.shape))
        object.__setattr__(self, "dim", _check_dim(self.dim))

    def _matrix(self, X, Y):
        return 1.0 / np.sqrt(1.0 + (self.shape * self.shape) * squared_distances(X, Y))


@dataclass(frozen=True)
class TensorProduct(KernelSpec):
    left: KernelSpec
    right: KernelSpec

    def __post_init__(self):
        for factor in (self.left, self.right):
            if not isinstance(factor, KernelSpec):
                raise TypeError(f"tensor factors must be KernelSpec, got {type(factor).__name__}")

    @property
    def dim(self):
        return self.left.dim + self.right.dim

    def _matrix(self, X, Y):
        d1 = self.left.dim
        # Factors are evaluated separately and multiplied, so the Gram matrix
        # on a product grid is exactly the Kronecker product of factor Grams.
        return self.left._matrix(X[:, :d1], Y[:, :d1]) * self.right._matrix(X[:, d1:], Y[:, d1:])


def eval_kernel(k, x, y):
    """Evaluate ``K(x, y)`` for two points of dimension ``k.dim``."""
    x = check_point(x)
    y = check_point(y)
    if x.size != k.dim or y.size != k.dim:
        raise DimensionError(
            f"kernel expects dimension {k.dim}, got points of dimension {x.size} and {y.size}"
        )
    return float(k._matrix(x[None, :], y[None, :])[0, 0])


def kernel_section(k, x, X):
    """Return ``R_X(x) = (K(x_1, x), ..., K(x_n, x))``.

    ``X`` may be a :class:`~rkhs_sampling.linalg.PointSet` or an ``(n, d)`` array.
    """
    x = check_point(x, k.dim)
    X = check_array2d(getattr(X, "coords", X), k.dim, "X")
    return k._matrix(X, x[None, :])[:, 0]


_NAMES = {Gaussian: "gaussian", InverseMultiquadric: "imq"}
_CLASSES = {"gaussian": Gaussian, "imq": InverseMultiquadric}


def kernel_to_dict(k):
    """Serialize a kernel to its JSON object form."""
    if isinstance(k, TensorProduct):
        return {
            "type": "tensor",
            "dim": k.dim,
            "left": kernel_to_dict(k.left),
            "right": kernel_to_dict(k.right),
        }
    return {"type": _NAMES[type(k)], "shape": k.shape, "dim": k.dim}


def kernel_from_dict(data):
    """Build a kernel from its JSON object form, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ValueError("kernel spec must be a JSON object")
    kind = data.get("type")
    if kind == "tensor":
        allowed = {"type", "dim", "left", "right", "shape"}
        _reject_unknown(data, allowed)
        if "left" not in data or "right" not in data:
            raise ValueError("tensor kernel needs 'left' and 'right'")
        k = TensorProduct(kernel_from_dict(data["left"]), kernel_from_dict(data["right"]))
        if "dim" in data and data["dim"] != k.dim:
            raise ValueError(f"tensor kernel dim {data['dim']} != left.dim + right.dim = {k.dim}")
        return k
    if kind in _CLASSES:
        _reject_unknown(data, {"type", "shape", "dim"})
        return _CLASSES[kind](shape=data.get("shape", 1.0), dim=data.get("dim", 1))
    raise ValueError(f"unknown kernel type {kind!r}; expected 'gaussian', 'imq' or 'tensor'")


def _reject_unknown(data, allowed):
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ValueError(f"unknown kernel keys: {', '.join(unknown)}")

"""Input validation helpers shared by the numerical modules."""

import numpy as np

from .exceptions import DimensionError


def check_point(x, dim=None):
    """Return ``x`` as a finite 1-D float64 array, optionally of length ``dim``."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"a point must be a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    if dim is not None and arr.size != dim:
        raise DimensionError(f"expected a point of dimension {dim}, got {arr.size}")
    return arr


def check_array2d(X, dim=None, name="X"):
    """Return ``X`` as a finite ``(n, d)`` float64 array.

    A 1-D input is read as ``n`` one-dimensional points when ``dim`` is 1 or
    unknown, and as a single point when ``dim`` equals its length.
    """
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        if dim is not None and dim > 1 and arr.size == dim:
            arr = arr.reshape(1, dim)
        else:
            arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D (n, d), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionError(f"{name} has dimension {arr.shape[1]}, expected {dim}")
    return arr


def check_vector(v, n, name="vector"):
    """Return ``v`` as a finite float64 vector of length ``n``."""
    arr = np.asarray(v, dtype=np.float64).reshape(-1) if np.ndim(v) <= 1 else None
    if arr is None:
        raise DimensionError(f"{name} must be 1-D, got shape {np.shape(v)}")
    if arr.size != n:
        raise DimensionError(f"{name} has length {arr.size}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr

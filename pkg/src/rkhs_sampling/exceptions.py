"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Input dimension or length does not match what the operation expects."""


class DuplicatePointError(ValueError):
    """A point set contains the same point more than once.

    ``rows`` holds the (0-based) indices of every pair of coinciding points.
    """

    def __init__(self, message, rows=()):
        super().__init__(message)
        self.rows = tuple(rows)


class NotPositiveDefiniteError(ValueError):
    """Cholesky factorization hit a pivot at or below the numerical PD threshold.

    Attributes
    ----------
    pivot : int
        0-based index of the first failing pivot.
    value : float
        The offending pivot value (``nan`` when LAPACK aborted before it).
    threshold : float
        The threshold the pivot had to exceed.
    """

    def __init__(self, pivot, value=float("nan"), threshold=float("nan")):
        self.pivot = int(pivot)
        self.value = float(value)
        self.threshold = float(threshold)
        super().__init__(
            f"matrix is not numerically positive definite: pivot {self.pivot} "
            f"= {self.value:.3e} does not exceed threshold {self.threshold:.3e}"
        )


class NumericalError(ArithmeticError):
    """A numerical routine (eigensolver) failed to produce a usable result."""

"""Sampling formulas in reproducing kernel Hilbert spaces.

Reconstruct functions from irregular samples through the Lagrange basis,
the dual Riesz basis of the kernel sections, on finite point sets, on
finite sections of infinite sequences, and on tensor-product grids.
"""

from .determining import (
    PointSequence,
    TruncationReport,
    determining_diagnostic,
    truncated_dual,
    truncated_reconstruct,
)
from .estimators import KernelInterpolator, TensorGridInterpolator
from .exceptions import DimensionError, DuplicatePointError, NotPositiveDefiniteError, NumericalError
from .kernels import (
    Gaussian,
    InverseMultiquadric,
    KernelSpec,
    TensorProduct,
    eval_kernel,
    kernel_from_dict,
    kernel_section,
    kernel_to_dict,
)
from .linalg import (
    GramMatrix,
    PointSet,
    RieszBounds,
    assemble_gram,
    cholesky,
    native_inner,
    native_norm_sq,
    riesz_constants,
    solve_spd,
)
from .sampling import (
    DualBasisVector,
    SamplingModel,
    biorthogonality_residual,
    dual_representations,
    eval_dual,
    evaluate,
    fit,
    lagrange_basis,
    lagrange_values,
    stability_check_dual,
    stability_check_primal,
)
from .tensor import (
    KroneckerGram,
    TensorGrid,
    bench_tensor_vs_dense,
    kron_solve,
    product_kernel,
    tensor_dual,
    tensor_fit,
    tensor_gram,
    tensor_riesz_constants,
)

__version__ = "0.1.0"

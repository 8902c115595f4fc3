import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import A
from rkhs_sampling import (
    DimensionError,
    Gaussian,
    InverseMultiquadric,
    TensorProduct,
    assemble_gram,
    eval_kernel,
    kernel_from_dict,
    kernel_section,
    kernel_to_dict,
)


def brute_force(k, x, y):
    """Scalar re-implementation of the kernel formulas, used as an oracle."""
    if isinstance(k, TensorProduct):
        d1 = k.left.dim
        return brute_force(k.left, x[:d1], y[:d1]) * brute_force(k.right, x[d1:], y[d1:])
    r2 = math.fsum((a - b) ** 2 for a, b in zip(x, y))
    if isinstance(k, Gaussian):
        return math.exp(-(k.shape**2) * r2)
    return 1.0 / math.sqrt(1.0 + k.shape**2 * r2)


def test_gaussian_zero_distance():
    assert eval_kernel(Gaussian(dim=2), (0.3, -2), (0.3, -2)) == 1.0


def test_gaussian_unit_distance():
    assert eval_kernel(Gaussian(), [0.0], [1.0]) == pytest.approx(A, rel=1e-15)


def test_imq_unit_distance():
    assert eval_kernel(InverseMultiquadric(dim=2), (0, 0), (1, 0)) == pytest.approx(
        0.70710678118654752440, rel=1e-15
    )


def test_tensor_product_evaluation():
    k = TensorProduct(Gaussian(), Gaussian())
    assert k.dim == 2
    assert eval_kernel(k, (0, 0), (1, 0)) == pytest.approx(A, rel=1e-15)


def test_shape_parameter_scales_distance():
    assert eval_kernel(Gaussian(shape=2.0), [0.0], [0.5]) == pytest.approx(A, rel=1e-15)
    assert eval_kernel(InverseMultiquadric(shape=0.5), [0.0], [2.0]) == pytest.approx(
        2**-0.5, rel=1e-15
    )


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_rejects_bad_shape(bad):
    with pytest.raises(ValueError):
        Gaussian(shape=bad)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        eval_kernel(Gaussian(dim=2), [0.0], [1.0])
    with pytest.raises(DimensionError):
        kernel_section(Gaussian(dim=2), [0.0, 0.0], np.zeros((3, 1)))


def test_kernel_section_examples():
    R = kernel_section(Gaussian(), [0.0], np.array([[0.0], [1.0]]))
    np.testing.assert_allclose(R, [1.0, A], rtol=1e-15)
    R1 = kernel_section(InverseMultiquadric(), [2.5], np.array([[2.5]]))
    assert R1.tolist() == [1.0]


@pytest.mark.parametrize(
    "k", [Gaussian(0.7, 3), InverseMultiquadric(1.3, 3), TensorProduct(Gaussian(dim=2), InverseMultiquadric())]
)
def test_kernel_section_at_node_is_gram_row(k):
    X = np.random.default_rng(3).uniform(-2, 2, (12, 3))
    G = assemble_gram(k, X)
    for j in range(len(X)):
        np.testing.assert_array_equal(kernel_section(k, X[j], X), G.entries[j])


KERNELS = [
    Gaussian(1.0, 3),
    InverseMultiquadric(1.0, 3),
    Gaussian(0.3, 3),
    TensorProduct(Gaussian(1.0, 1), InverseMultiquadric(2.0, 2)),
    TensorProduct(TensorProduct(Gaussian(), Gaussian()), Gaussian()),
]

point3 = arrays(np.float64, 3, elements=st.floats(-50, 50, allow_nan=False, width=64))


@settings(max_examples=200, deadline=None)
@given(x=point3, y=point3, which=st.integers(0, len(KERNELS) - 1))
def test_symmetry_and_bounds(x, y, which):
    k = KERNELS[which]
    kxy = eval_kernel(k, x, y)
    assert kxy == eval_kernel(k, y, x)
    assert 0.0 <= kxy <= 1.0
    assert eval_kernel(k, x, x) == 1.0
    # exp amplifies rounding of the squared distance by a factor ~r^2.
    assert kxy == pytest.approx(brute_force(k, x, y), rel=1e-12, abs=1e-300)


def test_symmetry_bitwise_many_pairs(rng):
    # 1000 random pairs per variant, evaluated in bulk.
    X = rng.normal(size=(1000, 3)) * 1.5
    Y = rng.normal(size=(1000, 3)) * 1.5
    for k in KERNELS:
        kxy = np.array([eval_kernel(k, x, y) for x, y in zip(X, Y)])
        kyx = np.array([eval_kernel(k, y, x) for x, y in zip(X, Y)])
        np.testing.assert_array_equal(kxy, kyx)
        if not isinstance(k, TensorProduct):
            assert np.all(kxy > 0)


def test_tensor_factorization(rng):
    k1, k2 = Gaussian(1.0, 2), InverseMultiquadric(0.5, 1)
    k = TensorProduct(k1, k2)
    for _ in range(200):
        x, y = rng.normal(size=3), rng.normal(size=3)
        expected = eval_kernel(k1, x[:2], y[:2]) * eval_kernel(k2, x[2:], y[2:])
        assert abs(eval_kernel(k, x, y) - expected) <= 1e-15 * expected


def test_tensor_associativity(rng):
    k1, k2, k3 = Gaussian(), InverseMultiquadric(), Gaussian(0.5)
    left = TensorProduct(TensorProduct(k1, k2), k3)
    right = TensorProduct(k1, TensorProduct(k2, k3))
    for _ in range(200):
        x, y = rng.normal(size=3), rng.normal(size=3)
        a, b = eval_kernel(left, x, y), eval_kernel(right, x, y)
        assert abs(a - b) <= 1e-15 * abs(a)


@pytest.mark.parametrize("k", KERNELS)
def test_json_round_trip(k):
    data = kernel_to_dict(k)
    assert kernel_from_dict(data) == k


def test_json_field_names():
    assert kernel_to_dict(Gaussian(2.0, 3)) == {"type": "gaussian", "shape": 2.0, "dim": 3}
    d = kernel_to_dict(TensorProduct(InverseMultiquadric(), Gaussian(dim=2)))
    assert d["type"] == "tensor" and d["dim"] == 3
    assert d["left"] == {"type": "imq", "shape": 1.0, "dim": 1}


@pytest.mark.parametrize(
    "data",
    [
        {"type": "cubic"},
        {"type": "gaussian", "width": 1},
        {"type": "tensor", "left": {"type": "gaussian"}},
        {"type": "tensor", "dim": 5, "left": {"type": "gaussian"}, "right": {"type": "imq"}},
        {"type": "gaussian", "shape": -1},
    ],
)
def test_json_rejects_invalid(data):
    with pytest.raises(ValueError):
        kernel_from_dict(data)


def test_kernels_are_immutable():
    k = Gaussian()
    with pytest.raises(AttributeError):
        k.shape = 2.0

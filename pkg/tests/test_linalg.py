import threading

import numpy as np
import pytest

from conftest import CHOL_22, EIG_2X2, INV_E1, NORM_11, A, REFERENCE, kernels_for
from rkhs_sampling import (
    DimensionError,
    DuplicatePointError,
    Gaussian,
    GramMatrix,
    InverseMultiquadric,
    NotPositiveDefiniteError,
    PointSet,
    assemble_gram,
    cholesky,
    native_inner,
    native_norm_sq,
    riesz_constants,
    solve_spd,
)
from rkhs_sampling.linalg import pd_threshold


class TestPointSet:
    def test_rejects_duplicates_with_indices(self):
        with pytest.raises(DuplicatePointError) as info:
            PointSet([[0.0, 1.0], [2.0, 3.0], [0.0, 1.0]])
        assert info.value.rows == ((0, 2),)

    def test_near_duplicates_allowed(self):
        X = PointSet([[0.0], [1e-12]])
        assert X.min_separation() == pytest.approx(1e-12)

    @pytest.mark.parametrize("bad", [[], [[np.nan]], [[np.inf, 0.0]]])
    def test_rejects_empty_and_nonfinite(self, bad):
        with pytest.raises(ValueError):
            PointSet(bad)

    def test_one_dimensional_input(self):
        X = PointSet([0.0, 1.0, 2.0])
        assert (len(X), X.dim) == (3, 1)

    def test_immutable(self):
        X = PointSet([[0.0], [1.0]])
        with pytest.raises(ValueError):
            X.coords[0, 0] = 5.0


class TestAssemble:
    def test_single_point(self):
        G = assemble_gram(Gaussian(dim=2), [[0.3, 0.4]])
        assert G.entries.tolist() == [[1.0]]

    def test_two_points(self, two_point_gram):
        np.testing.assert_allclose(two_point_gram.entries, [[1, A], [A, 1]], rtol=1e-15)

    def test_exact_symmetry_and_unit_diagonal(self, rng):
        X = rng.uniform(0, 5, (60, 3))
        for k in kernels_for(3):
            G = assemble_gram(k, X)
            assert np.array_equal(G.entries, G.entries.T)
            assert np.all(np.diag(G.entries) == 1.0)

    def test_errors(self):
        with pytest.raises(DuplicatePointError):
            assemble_gram(Gaussian(), [[0.0], [0.0]])
        with pytest.raises(DimensionError):
            assemble_gram(Gaussian(dim=2), [[0.0], [1.0]])


class TestCholesky:
    def test_identity(self):
        G = cholesky(GramMatrix(np.eye(4)))
        np.testing.assert_array_equal(G.chol, np.eye(4))

    def test_two_by_two(self, two_point_gram):
        L = cholesky(two_point_gram).chol
        np.testing.assert_allclose(L, [[1, 0], [A, CHOL_22]], rtol=1e-15, atol=0)

    def test_duplicate_rows_raise_with_pivot(self):
        M = np.array([[1.0, 1.0, A], [1.0, 1.0, A], [A, A, 1.0]])
        with pytest.raises(NotPositiveDefiniteError) as info:
            GramMatrix(M).chol
        assert info.value.pivot == 1

    def test_threshold_rejects_tiny_pivot(self):
        # Pivot 2 equals 1e-20, far below n * u * max_diag.
        M = np.diag([1.0, 1.0, 1e-20])
        with pytest.raises(NotPositiveDefiniteError) as info:
            GramMatrix(M).chol
        assert info.value.pivot == 2
        assert info.value.threshold == pytest.approx(pd_threshold(3, 1.0))

    def test_reconstruction(self):
        for _, d, n, X in REFERENCE:
            for k in kernels_for(d):
                G = assemble_gram(k, X)
                L = G.chol
                err = np.linalg.norm(L @ L.T - G.entries) / np.linalg.norm(G.entries)
                assert err <= 1e-12

    def test_compute_once_under_threads(self, rng):
        G = assemble_gram(Gaussian(dim=2), rng.uniform(0, 10, (150, 2)))
        seen = []
        threads = [threading.Thread(target=lambda: seen.append(G.chol)) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(s is seen[0] for s in seen)


class TestRiesz:
    def test_identity(self):
        b = riesz_constants(GramMatrix(np.eye(3)))
        assert (b.lambda_min, b.lambda_max, b.condition) == (1.0, 1.0, 1.0)

    def test_two_by_two(self, two_point_gram):
        b = riesz_constants(two_point_gram)
        assert b.lambda_min == pytest.approx(EIG_2X2[0], rel=1e-14)
        assert b.lambda_max == pytest.approx(EIG_2X2[1], rel=1e-14)

    def test_kronecker_eigenvalues_are_products(self, rng):
        # Brute force over all eigenvalue pairs of the factors.
        for n, m in [(2, 3), (4, 4), (6, 5)]:
            A1 = assemble_gram(Gaussian(), np.sort(rng.uniform(0, n, n))).entries
            A2 = assemble_gram(InverseMultiquadric(), np.sort(rng.uniform(0, m, m))).entries
            b = riesz_constants(GramMatrix(np.kron(A1, A2)))
            pairs = np.outer(np.linalg.eigvalsh(A1), np.linalg.eigvalsh(A2)).ravel()
            assert b.lambda_min == pytest.approx(pairs.min(), rel=1e-10)
            assert b.lambda_max == pytest.approx(pairs.max(), rel=1e-10)

    def test_trace_equals_n(self):
        for _, d, n, X in REFERENCE:
            for k in kernels_for(d):
                w = assemble_gram(k, X).spectrum
                assert abs(w.sum() - n) <= 1e-12 * n

    def test_rayleigh_sandwich(self, rng):
        for _, d, n, X in REFERENCE[:8]:
            for k in kernels_for(d):
                G = assemble_gram(k, X)
                b = riesz_constants(G)
                for _ in range(100):
                    c = rng.standard_normal(n)
                    q, c2 = native_norm_sq(G, c), c @ c
                    assert b.lambda_min * c2 <= q * (1 + 1e-10)
                    assert q <= b.lambda_max * c2 * (1 + 1e-10)


class TestNativeNorm:
    def test_examples(self, two_point_gram):
        G = two_point_gram
        assert native_norm_sq(G, [1.0, 0.0]) == 1.0
        assert native_norm_sq(G, [0.0, 0.0]) == 0.0
        assert native_norm_sq(G, [1.0, 1.0]) == pytest.approx(NORM_11, rel=1e-15)

    def test_inner_reproduces_gram_entries(self, rng):
        G = assemble_gram(Gaussian(dim=2), rng.uniform(0, 4, (7, 2)))
        I = np.eye(7)
        for j in range(7):
            assert native_inner(G, I[j], np.zeros(7)) == 0.0
            for k in range(7):
                assert native_inner(G, I[j], I[k]) == G.entries[j, k]

    def test_polarization(self, rng):
        G = assemble_gram(InverseMultiquadric(dim=2), rng.uniform(0, 6, (30, 2)))
        for _ in range(50):
            f, g = rng.standard_normal(30), rng.standard_normal(30)
            polar = 0.25 * (native_norm_sq(G, f + g) - native_norm_sq(G, f - g))
            assert native_inner(G, f, g) == pytest.approx(polar, rel=1e-12, abs=1e-12)
            assert native_inner(G, f, g) == pytest.approx(native_inner(G, g, f), rel=1e-14)

    def test_length_mismatch(self, two_point_gram):
        with pytest.raises(DimensionError):
            native_norm_sq(two_point_gram, [1.0, 2.0, 3.0])
        with pytest.raises(DimensionError):
            native_inner(two_point_gram, [1.0, 2.0], [1.0])


class TestSolve:
    def test_two_by_two(self, two_point_gram):
        np.testing.assert_allclose(solve_spd(two_point_gram, [1.0, 0.0]), INV_E1, rtol=1e-14)

    def test_identity(self, rng):
        b = rng.standard_normal(5)
        np.testing.assert_array_equal(solve_spd(GramMatrix(np.eye(5)), b), b)

    def test_columns_give_unit_vectors(self):
        _, d, n, X = REFERENCE[5]
        G = assemble_gram(Gaussian(dim=d), X)
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1
            np.testing.assert_allclose(solve_spd(G, G.entries[:, j]), e, atol=1e-10)

    def test_round_trip_residual(self, rng):
        for _, d, n, X in REFERENCE:
            for k in kernels_for(d):
                G = assemble_gram(k, X)
                b = rng.standard_normal(n)
                x = solve_spd(G, b)
                kappa = riesz_constants(G).condition
                assert np.linalg.norm(G.entries @ x - b) <= 1e-10 * kappa * np.linalg.norm(b)

    def test_not_pd_propagates(self):
        with pytest.raises(NotPositiveDefiniteError):
            solve_spd(GramMatrix(np.ones((2, 2))), [1.0, 1.0])

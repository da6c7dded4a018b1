"""Triangular solves and the iterative smallest-singular-value solver.

The cross-check oracle is the hand-rolled one-sided Jacobi SVD
(``dense_svd_oracle``), which is itself validated here against plain
``numpy.linalg.svd`` — two fully distinct routes to every sigma.
"""

from __future__ import annotations

import numpy as np
import pytest

import pseudospec as ps

from .helpers import random_triangular_band, triangular_dense


def factor_of(band: np.ndarray) -> ps.TriangularFactor:
    return ps.TriangularFactor(np.ascontiguousarray(band.astype(np.complex128)))


class TestBackSubstitute:
    def test_identity(self):
        band = np.ones((4, 1), dtype=np.complex128)
        rhs = np.arange(1.0, 5.0) + 0j
        x = ps.back_substitute(factor_of(band), rhs)
        assert np.allclose(x, rhs, rtol=0, atol=0)

    def test_scaled_identity(self):
        band = 2.0 * np.ones((3, 1), dtype=np.complex128)
        x = ps.back_substitute(factor_of(band), np.ones(3, dtype=complex))
        assert np.allclose(x, 0.5 * np.ones(3))

    def test_construct_then_solve(self, rng):
        band = random_triangular_band(rng, 30, 3)
        R = triangular_dense(band)
        x_true = rng.standard_normal(30) + 1j * rng.standard_normal(30)
        x = ps.back_substitute(factor_of(band), R @ x_true)
        err = np.linalg.norm(x - x_true) / np.linalg.norm(x_true)
        assert err < 1e-12

    def test_near_singular_diagnostic(self, rng):
        band = random_triangular_band(rng, 6, 1)
        band[3, 0] = 1e-305
        with pytest.raises(ps.NearSingular) as info:
            ps.back_substitute(factor_of(band), np.ones(6, dtype=complex))
        assert info.value.index == 3
        assert info.value.magnitude == pytest.approx(1e-305)


class TestSmallestSingularValue:
    def test_identity(self):
        res = ps.smallest_singular_value(
            factor_of(np.ones((5, 1), dtype=complex)))
        assert res.sigma == pytest.approx(1.0)
        assert res.converged

    def test_diagonal(self):
        band = np.array([[3.0], [2.0], [0.5]], dtype=complex)
        res = ps.smallest_singular_value(factor_of(band))
        assert res.sigma == pytest.approx(0.5, rel=1e-10)

    def test_matches_oracle_n50_d5(self, rng):
        band = random_triangular_band(rng, 50, 5)
        res = ps.smallest_singular_value(factor_of(band), tol=1e-10)
        want = ps.dense_svd_oracle(triangular_dense(band))[-1]
        assert res.converged
        assert abs(res.sigma - want) <= 1e-8 * want

    def test_tiny_sigma_resolved(self, rng):
        band = random_triangular_band(rng, 40, 4, tiny_last=1e-10)
        res = ps.smallest_singular_value(factor_of(band), tol=1e-10)
        want = ps.dense_svd_oracle(triangular_dense(band))[-1]
        assert want <= 2e-10  # the construction really is near-singular
        assert abs(res.sigma - want) <= 1e-8 * want

    def test_unit_scalar_invariance(self, rng):
        band = random_triangular_band(rng, 25, 2)
        phase = np.exp(0.7j)
        a = ps.smallest_singular_value(factor_of(band), tol=1e-10)
        b = ps.smallest_singular_value(factor_of(phase * band), tol=1e-10)
        assert abs(a.sigma - b.sigma) <= 1e-8 * a.sigma

    def test_converged_implies_residual_within_tol(self, rng):
        band = random_triangular_band(rng, 30, 3)
        res = ps.smallest_singular_value(factor_of(band), tol=1e-9)
        assert res.converged
        assert res.residual <= 1e-9

    def test_deterministic_given_seed(self, rng):
        band = random_triangular_band(rng, 20, 2)
        a = ps.smallest_singular_value(factor_of(band), seed=7)
        b = ps.smallest_singular_value(factor_of(band), seed=7)
        assert a.sigma == b.sigma and a.iterations == b.iterations

    def test_warm_vector_is_singular_direction(self, rng):
        band = random_triangular_band(rng, 30, 3)
        res, v = ps.smallest_singular_value_with_vector(
            factor_of(band), tol=1e-12)
        assert np.linalg.norm(v) == pytest.approx(1.0, rel=1e-10)
        # v approximates the right singular direction of R^{-1}, i.e. the
        # left singular direction of R: ||R^H v|| is the smallest sigma.
        image = triangular_dense(band).conj().T @ v
        assert np.linalg.norm(image) == pytest.approx(res.sigma, rel=1e-6)

    def test_warm_start_accepted(self, rng):
        band = random_triangular_band(rng, 30, 3)
        _, v = ps.smallest_singular_value_with_vector(factor_of(band))
        res = ps.smallest_singular_value(factor_of(band), v0=v)
        want = ps.dense_svd_oracle(triangular_dense(band))[-1]
        assert abs(res.sigma - want) <= 1e-6 * want

    def test_numerically_singular_returns_floor(self, rng):
        band = random_triangular_band(rng, 8, 1)
        band[5, 0] = 1e-310  # below the solve guard
        res = ps.smallest_singular_value(factor_of(band))
        assert not res.converged
        assert res.sigma <= 1e-309

    def test_non_finite_raises(self, rng):
        band = random_triangular_band(rng, 6, 1)
        band[2, 1] = np.nan
        with pytest.raises(FloatingPointError):
            ps.smallest_singular_value(factor_of(band))

    def test_iteration_cap_reports_unconverged(self, rng):
        band = random_triangular_band(rng, 40, 4)
        res = ps.smallest_singular_value(factor_of(band), tol=1e-15,
                                         max_iter=2)
        assert not res.converged
        assert res.sigma > 0
        assert res.iterations <= 2

    def test_backoff_constant_exported(self):
        assert ps.SOLVER_BACKOFF == 10.0


class TestDenseSvdOracle:
    def test_diagonal_sorted(self):
        vals = ps.dense_svd_oracle(np.array([[3.0, 0.0], [0.0, 4.0]]))
        assert np.allclose(vals, [4.0, 3.0])

    def test_single_column(self):
        vals = ps.dense_svd_oracle(np.array([[3.0], [4.0]]))
        assert vals.shape == (1,)
        assert vals[0] == pytest.approx(5.0)

    def test_reconstruction(self, rng):
        M = rng.standard_normal((20, 12)) + 1j * rng.standard_normal((20, 12))
        U, s, Vh = ps.dense_svd_factors(M)
        assert np.max(np.abs(U @ np.diag(s) @ Vh - M)) <= 1e-12 * s[0]
        assert np.max(np.abs(U.conj().T @ U - np.eye(12))) <= 1e-12
        assert np.max(np.abs(Vh @ Vh.conj().T - np.eye(12))) <= 1e-12
        assert np.all(np.diff(s) <= 0)

    def test_matches_lapack_route(self, rng):
        M = rng.standard_normal((15, 10)) + 1j * rng.standard_normal((15, 10))
        mine = ps.dense_svd_oracle(M)
        ref = np.linalg.svd(M, compute_uv=False)
        assert np.max(np.abs(mine - ref)) <= 1e-11 * ref[0]

    def test_rank_deficient(self, rng):
        col = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        M = np.outer(col, np.ones(4))
        vals = ps.dense_svd_oracle(M)
        assert vals[0] > 0
        assert np.all(vals[1:] <= 1e-12 * vals[0])

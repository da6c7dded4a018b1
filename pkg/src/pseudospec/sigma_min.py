"""Smallest singular values of banded upper-triangular factors.

The workhorse is inverse-mode Golub–Kahan–Lanczos bidiagonalization: the
largest singular value of ``R^{-1}`` (reciprocal of the wanted smallest
singular value of ``R``) is projected onto a short Krylov basis built from
one back substitution and one adjoint forward substitution per iteration,
with full reorthogonalization.  The projected estimate converges to the
smallest singular value *from above*.

A hand-written one-sided Jacobi SVD (:func:`dense_svd_oracle`) provides an
algorithmically independent cross-check route; the two are never merged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .qh_engine import TriangularFactor

__all__ = [
    "NearSingular",
    "SigmaResult",
    "SOLVER_BACKOFF",
    "back_substitute",
    "smallest_singular_value",
    "dense_svd_oracle",
    "dense_svd_factors",
]

# multiplies the solver tolerance in safety margins around set-membership
# comparisons: estimates are trusted only up to (1 + SOLVER_BACKOFF * tol)
# relative error
SOLVER_BACKOFF = 10.0


class NearSingular(RuntimeError):
    """A triangular solve met a numerically vanishing diagonal entry."""

    def __init__(self, index: int, magnitude: float) -> None:
        super().__init__(
            f"diagonal entry {index} has magnitude {magnitude:.3e}; the "
            f"factor is numerically singular")
        self.index = index
        self.magnitude = magnitude


@dataclass(frozen=True)
class SigmaResult:
    """Smallest-singular-value estimate with convergence evidence.

    ``residual`` is the relative backward residual of the dominant
    singular triplet of the inverse problem; ``converged`` implies
    ``residual <= tol``.
    """

    sigma: float
    iterations: int
    converged: bool
    residual: float


def _band_of(R) -> np.ndarray:
    if isinstance(R, TriangularFactor):
        band = R.band
    else:
        band = np.asarray(R, dtype=np.complex128)
    if band.ndim != 2:
        raise ValueError(f"expected banded (n, w+1) storage, got {band.shape}")
    return np.ascontiguousarray(band, dtype=np.complex128)


def back_substitute(R, rhs: np.ndarray) -> np.ndarray:
    """Solve ``R x = rhs`` for a banded upper-triangular factor.

    Raises
    ------
    NearSingular
        When a diagonal entry is below the underflow guard.
    """
    band = _band_of(R)
    b = np.ascontiguousarray(np.asarray(rhs, dtype=np.complex128))
    if b.shape != (band.shape[0],):
        raise ValueError(
            f"rhs must have shape ({band.shape[0]},), got {b.shape}")
    out = np.empty_like(b)
    st = _kernels.back_substitute_band(band, out, b)
    if st != 0:
        i = -int(st) - 1
        raise NearSingular(i, float(abs(band[i, 0])))
    return out


def _solve_adjoint(R, rhs: np.ndarray) -> np.ndarray:
    """Solve ``R^H y = rhs`` (internal; same error contract)."""
    band = _band_of(R)
    b = np.ascontiguousarray(np.asarray(rhs, dtype=np.complex128))
    out = np.empty_like(b)
    st = _kernels.forward_substitute_adjoint_band(band, out, b)
    if st != 0:
        i = -int(st) - 1
        raise NearSingular(i, float(abs(band[i, 0])))
    return out


def _start_vector(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def smallest_singular_value_with_vector(
        R, tol: float = 1e-8, max_iter: int | None = None, seed: int = 0,
        v0: np.ndarray | None = None) -> tuple[SigmaResult, np.ndarray]:
    """Like :func:`smallest_singular_value`, also returning the approximate
    right singular vector of ``R^{-1}`` (a warm start for nearby factors)."""
    band = _band_of(R)
    n = band.shape[0]
    if max_iter is None:
        max_iter = 4 * n
    if v0 is None:
        start = _start_vector(n, seed)
    else:
        start = np.ascontiguousarray(np.asarray(v0, dtype=np.complex128))
        if start.shape != (n,):
            raise ValueError(
                f"start vector must have shape ({n},), got {start.shape}")
    sigma, iters, conv, resid, warm, status = _kernels.gklb_smallest(
        band, start, float(tol), int(max_iter))
    if status == 2:
        raise FloatingPointError(
            "non-finite values encountered while estimating the smallest "
            "singular value")
    return SigmaResult(float(sigma), int(iters), bool(conv),
                       float(resid)), warm


def smallest_singular_value(R, tol: float = 1e-8,
                            max_iter: int | None = None, seed: int = 0,
                            v0: np.ndarray | None = None) -> SigmaResult:
    """Estimate the smallest singular value of a banded triangular factor.

    Parameters
    ----------
    R : TriangularFactor or ndarray
        Banded storage with slot ``v`` of row ``i`` holding entry
        ``(i, i+v)``.
    tol : float
        Relative accuracy target; convergence requires two consecutive
        stable estimates and a backward residual below ``tol``.
    max_iter : int, optional
        Iteration cap (default ``4n``, additionally capped at ``min(n, 512)``).
    seed : int
        Seeds the deterministic start vector.
    v0 : ndarray, optional
        Explicit start vector; overrides ``seed``.  Passing the returned
        vector of a neighboring window's solve typically cuts the
        iteration count severalfold.

    Notes
    -----
    A numerically singular factor is reported, not raised: the result then
    carries the smallest diagonal magnitude with ``converged=False`` and an
    infinite residual.
    """
    result, _ = smallest_singular_value_with_vector(
        R, tol=tol, max_iter=max_iter, seed=seed, v0=v0)
    return result


def dense_svd_oracle(M: np.ndarray) -> np.ndarray:
    """All singular values of a dense matrix, descending (Jacobi route).

    Independent of the Lanczos path end to end: one-sided Jacobi column
    rotations, no triangular solves, no projected eigenproblem.
    """
    A = np.ascontiguousarray(np.asarray(M, dtype=np.complex128))
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    _, s, _ = _kernels.jacobi_svd(A)
    return s


def dense_svd_factors(M: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full Jacobi SVD ``(U, s, Vh)`` with ``M = U @ diag(s) @ Vh``."""
    A = np.ascontiguousarray(np.asarray(M, dtype=np.complex128))
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    U, s, V = _kernels.jacobi_svd(A)
    return U, s, np.conj(V.T)

"""Independent oracles used across the test suite.

Everything here is deliberately naive: dense matrices, entrywise loops,
and textbook formulas.  The point is that none of it shares code paths
with the banded/recycled implementations under test.
"""

from __future__ import annotations

import numpy as np

import pseudospec as ps


def rot_dense(g: ps.GivensRotation, size: int) -> np.ndarray:
    """Embed a rotation in an identity matrix by direct index writes."""
    M = np.eye(size, dtype=np.complex128)
    i = g.row - 1
    M[i, i] = g.c
    M[i, i + 1] = g.s
    M[i + 1, i] = -np.conj(g.s)
    M[i + 1, i + 1] = np.conj(g.c)
    return M


def seq_dense(seq: ps.RotationSequence, size: int) -> np.ndarray:
    """Dense product of a sequence, multiplying in application order."""
    M = np.eye(size, dtype=np.complex128)
    for g in seq.rotations:
        M = rot_dense(g, size) @ M
    return M


def pattern_dense(pat: ps.RotationPattern, size: int) -> np.ndarray:
    M = np.eye(size, dtype=np.complex128)
    for seq in pat.sequences:
        M = seq_dense(seq, size) @ M
    return M


def random_rotation(rng: np.random.Generator, row: int) -> ps.GivensRotation:
    v = rng.standard_normal(4)
    c = complex(v[0], v[1])
    s = complex(v[2], v[3])
    nrm = np.sqrt(abs(c) ** 2 + abs(s) ** 2)
    if nrm == 0:
        return ps.GivensRotation(row, 1.0, 0.0)
    return ps.GivensRotation(row, c / nrm, s / nrm)


def random_descending(rng: np.random.Generator, first_row: int,
                      length: int) -> ps.RotationSequence:
    """A descending sequence whose rows run first_row+length-1 .. first_row
    in the written product, i.e. ascending in application order."""
    rots = tuple(random_rotation(rng, first_row + j) for j in range(length))
    return ps.RotationSequence("descending", rots)


def dense_window(op, lam: complex, k: int, n: int) -> np.ndarray:
    """Window built entry-by-entry from the operator, nothing banded."""
    d = op.bandwidth
    M = np.zeros((n + 2 * d, n), dtype=np.complex128)
    for r in range(n + 2 * d):
        for c in range(n):
            val = op.entry(k - d + r, k + c)
            if k - d + r == k + c:
                val = val - lam
            M[r, c] = val
    return M


def random_periodic_operator(rng: np.random.Generator, d: int, period: int,
                             scale: float = 1.0) -> ps.DiagonalBandOperator:
    diags = {}
    for q in range(-d, d + 1):
        vals = scale * (rng.standard_normal(period)
                        + 1j * rng.standard_normal(period))
        diags[q] = tuple(complex(v) for v in vals)
    return ps.DiagonalBandOperator(diags, d)


def random_triangular_band(rng: np.random.Generator, n: int, d: int,
                           tiny_last: float | None = None) -> np.ndarray:
    """Banded upper-triangular storage (n, 2d+1) with unit-ish diagonal.

    ``tiny_last`` forces the final diagonal entry to that magnitude; the
    last row of a triangular matrix holds only its diagonal entry, so
    sigma_min <= tiny_last by the row-norm bound.
    """
    w = 2 * d + 1
    band = rng.standard_normal((n, w)) + 1j * rng.standard_normal((n, w))
    band[:, 0] += 3.0 + float(d)
    for v in range(1, w):
        band[n - v:, v] = 0.0
    if tiny_last is not None:
        band[n - 1, 0] = tiny_last * band[n - 1, 0] / abs(band[n - 1, 0])
    return np.ascontiguousarray(band)


def triangular_dense(band: np.ndarray) -> np.ndarray:
    n, w = band.shape
    M = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for v in range(w):
            if i + v < n:
                M[i, i + v] = band[i, v]
    return M

"""Givens rotations on adjacent rows and the sequence-level rewrite rules.

A rotation acts on rows ``(row, row + 1)`` (1-based) as the unitary block
``[[c, s], [-conj(s), conj(c)]]``.  Sequences of rotations on consecutive
row pairs are stored in *application order*: ``rotations[0]`` is applied
first.  Written as a matrix product (leftmost factor applied last) a
``descending`` sequence therefore reads ``G_{i+l-1} ... G_{i+1} G_i`` with
row indices descending left to right while the list itself ascends.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import (
    fuse_same_pair,
    renorm_pair,
    rot_compute,
    turnover_121_to_212,
)

__all__ = [
    "GivensRotation",
    "RotationSequence",
    "RotationPattern",
    "compute_rotation",
    "apply_rotation_left",
    "shift_through",
    "shift_through_higher",
    "reorder_first_row",
]

_UNIT_TOL = 1e-8


@dataclass(frozen=True)
class GivensRotation:
    """A plane rotation acting on rows ``(row, row + 1)``, 1-based.

    Parameters
    ----------
    row : int
        First of the two affected rows (``>= 1``).
    c, s : complex
        Rotation parameters with ``|c|^2 + |s|^2 = 1``; the dense action on
        the two rows is ``[[c, s], [-conj(s), conj(c)]]``.
    """

    row: int
    c: complex
    s: complex

    def __post_init__(self) -> None:
        if self.row < 1:
            raise ValueError(f"rotation row must be >= 1, got {self.row}")
        c = complex(self.c)
        s = complex(self.s)
        n2 = c.real * c.real + c.imag * c.imag + s.real * s.real + s.imag * s.imag
        if abs(n2 - 1.0) > _UNIT_TOL:
            raise ValueError(
                f"rotation parameters are not unit length: |c|^2+|s|^2 = {n2!r}")
        if abs(n2 - 1.0) > 1e-14:
            c, s = renorm_pair(c, s)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", s)

    @property
    def is_identity(self) -> bool:
        """True when the rotation acts as the identity."""
        return self.c == 1.0 + 0.0j and self.s == 0.0 + 0.0j

    def inverse(self) -> "GivensRotation":
        """The inverse rotation on the same row pair: ``(conj(c), -s)``."""
        return GivensRotation(self.row, np.conj(self.c), -self.s)

    def dense(self, size: int) -> np.ndarray:
        """Embed into a ``size x size`` identity (rows are 1-based)."""
        if self.row + 1 > size:
            raise ValueError(
                f"rotation on rows ({self.row}, {self.row + 1}) does not fit "
                f"into size {size}")
        G = np.eye(size, dtype=np.complex128)
        i = self.row - 1
        G[i, i] = self.c
        G[i, i + 1] = self.s
        G[i + 1, i] = -np.conj(self.s)
        G[i + 1, i + 1] = np.conj(self.c)
        return G


def compute_rotation(x: complex, y: complex) -> tuple[complex, complex]:
    """Rotation ``(c, s)`` mapping ``(x, y)^T`` to ``(r, 0)^T``.

    ``r`` is real nonnegative except in the exact shortcut ``y == 0``,
    which returns ``(1, 0)`` so that aligned inputs are untouched
    bit-for-bit.  ``x = y = 0`` also yields ``(1, 0)``.
    """
    c, s, _ = rot_compute(complex(x), complex(y))
    return c, s


def apply_rotation_left(M: np.ndarray, g: GivensRotation) -> None:
    """Apply ``g`` to matrix ``M`` from the left, in place.

    Only rows ``g.row - 1`` and ``g.row`` (0-based) change; every other row
    is untouched bit-for-bit.  ``M`` must be a dense 2-D complex array;
    banded window storage is rotated inside the factorization engine, which
    owns the wide scratch layout needed for fill.
    """
    if not isinstance(M, np.ndarray) or M.ndim != 2:
        raise TypeError(
            "apply_rotation_left expects a dense 2-D ndarray; banded windows "
            "are rotated inside the factorization engine")
    i = g.row - 1
    if i + 1 >= M.shape[0]:
        raise ValueError(
            f"rotation on rows ({g.row}, {g.row + 1}) does not fit a matrix "
            f"with {M.shape[0]} rows")
    top = g.c * M[i, :] + g.s * M[i + 1, :]
    bot = -np.conj(g.s) * M[i, :] + np.conj(g.c) * M[i + 1, :]
    M[i, :] = top
    M[i + 1, :] = bot


def _check_sequence(direction: str,
                    rotations: tuple[GivensRotation, ...]) -> None:
    if direction not in ("descending", "ascending"):
        raise ValueError(f"unknown sequence direction: {direction!r}")
    step = 1 if direction == "descending" else -1
    for a, b in zip(rotations, rotations[1:]):
        if b.row - a.row != step:
            raise ValueError(
                f"rows must change by {step} along application order, got "
                f"{a.row} -> {b.row}")


@dataclass(frozen=True)
class RotationSequence:
    """Rotations on consecutive row pairs, stored in application order.

    ``direction`` names the row trend of the *written product* (leftmost
    factor applied last): a ``descending`` sequence has rows descending in
    product order, hence ascending along ``rotations``.  Empty and
    single-rotation sequences are valid with either direction.
    """

    direction: str
    rotations: tuple[GivensRotation, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rotations", tuple(self.rotations))
        _check_sequence(self.direction, self.rotations)

    def __len__(self) -> int:
        return len(self.rotations)

    @property
    def first_row(self) -> int | None:
        """Row of the first-applied rotation (None when empty)."""
        return self.rotations[0].row if self.rotations else None

    @property
    def max_row(self) -> int:
        return max((g.row for g in self.rotations), default=0)

    def dense(self, size: int) -> np.ndarray:
        """Dense product; the last-applied rotation is the leftmost factor."""
        P = np.eye(size, dtype=np.complex128)
        for g in self.rotations:
            apply_rotation_left(P, g)
        return P


@dataclass(frozen=True)
class RotationPattern:
    """A bundle of rotation sequences, stored in application order.

    ``sequences[0]`` is applied first; rendering the pattern as arrow
    diagram columns therefore lists the last-applied sequence leftmost,
    matching the written product.
    """

    sequences: tuple[RotationSequence, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "sequences", tuple(self.sequences))

    def __len__(self) -> int:
        return len(self.sequences)

    @property
    def rotation_count(self) -> int:
        return sum(len(s) for s in self.sequences)

    def dense(self, size: int) -> np.ndarray:
        P = np.eye(size, dtype=np.complex128)
        for seq in self.sequences:
            for g in seq.rotations:
                apply_rotation_left(P, g)
        return P

    def diagram(self, max_row: int | None = None) -> str:
        """Texture dump: one line per row, one column per sequence.

        Columns appear in product order (last-applied sequence leftmost).
        ``⌒`` marks a rotation whose upper row is that line's row, ``·``
        marks absence.
        """
        if max_row is None:
            max_row = max((s.max_row for s in self.sequences), default=0)
        cols = list(reversed(self.sequences))
        present = [{g.row for g in s.rotations} for s in cols]
        lines = []
        for row in range(1, max_row + 1):
            glyphs = ["⌒" if row in p else "·" for p in present]
            lines.append(f"{row:4d}  " + " ".join(glyphs))
        return "\n".join(lines)


def _flip(c: complex, s: complex) -> tuple[complex, complex]:
    # conjugating a pair-0 rotation by the reversal permutation of three
    # rows yields a pair-1 rotation with parameters (conj(c), -conj(s))
    return np.conj(c), -np.conj(s)


def shift_through(gA: GivensRotation, gB: GivensRotation,
                  gC: GivensRotation) -> tuple[GivensRotation, GivensRotation,
                                               GivensRotation]:
    """Rewrite ``gA @ gB @ gC`` (rows ``i+1, i, i+1``) as rows ``i, i+1, i``.

    Inputs and outputs are in written-product order (leftmost applied
    last).  The returned triple has the same dense 3x3 product as the
    input triple up to rounding.

    Raises
    ------
    ValueError
        If the rows are not in the required ``(i+1, i, i+1)`` arrangement.
    """
    if not (gA.row == gC.row == gB.row + 1):
        raise ValueError(
            f"shift_through needs rows (i+1, i, i+1), got "
            f"({gA.row}, {gB.row}, {gC.row})")
    ca, sa = _flip(gA.c, gA.s)
    cb, sb = _flip(gB.c, gB.s)
    cc, sc = _flip(gC.c, gC.s)
    cf, sf, cm, sm, ct, st = turnover_121_to_212(ca, sa, cb, sb, cc, sc)
    lo = gB.row
    hi = gA.row
    return (
        GivensRotation(lo, *_flip(cf, sf)),
        GivensRotation(hi, *_flip(cm, sm)),
        GivensRotation(lo, *_flip(ct, st)),
    )


def _pairs(seq: RotationSequence) -> list[tuple[complex, complex]]:
    return [(g.c, g.s) for g in seq.rotations]


def _require_first_row(seq: RotationSequence, name: str) -> None:
    if seq.direction != "descending":
        raise ValueError(f"{name} must be a descending sequence")
    if len(seq) and seq.first_row != 1:
        raise ValueError(
            f"{name} must start at row 1, got row {seq.first_row}")


def shift_through_higher(
        left: RotationSequence,
        right: RotationSequence) -> tuple[RotationSequence, RotationSequence]:
    """Pass a row-1 sequence through a longer (or equal) row-1 sequence.

    Both inputs are descending sequences starting at row 1, ``left``
    applied after ``right``, with ``len(right) >= len(left)``.  Returns
    ``(new_left, new_right)`` where ``new_left`` starts at row 1 with
    ``len(right)`` rotations, ``new_right`` starts at row 2 with
    ``len(left)`` rotations, and
    ``new_left . new_right`` (``new_right`` applied first) has the same
    dense product as ``left . right``.

    When the lengths are equal the final step fuses two rotations on one
    row pair; the returned ``new_right`` is padded with an identity
    rotation to keep its contractual length.
    """
    _require_first_row(left, "left")
    _require_first_row(right, "right")
    l = len(left)
    lr = len(right)
    if lr < l:
        raise ValueError(
            f"right must be at least as long as left, got {lr} < {l}")
    if l == 0:
        return right, RotationSequence("descending", ())
    t = lr - l
    A = _pairs(left)
    B = _pairs(right)
    N: list[tuple[complex, complex]] = [(1.0 + 0.0j, 0.0 + 0.0j)] * lr
    Rout: list[tuple[complex, complex]] = [(1.0 + 0.0j, 0.0 + 0.0j)] * l
    carry = B[0]
    steps = l if t >= 1 else l - 1
    for i0 in range(steps):
        cf, sf, cm, sm, ct, st = turnover_121_to_212(
            A[i0][0], A[i0][1], B[i0 + 1][0], B[i0 + 1][1],
            carry[0], carry[1])
        N[i0] = (cm, sm)
        Rout[i0] = (ct, st)  # acts on pair i0 + 1
        carry = (cf, sf)
    if t >= 1:
        N[l] = carry
        for i0 in range(l + 1, lr):
            N[i0] = B[i0]
    else:
        N[l - 1] = fuse_same_pair(A[l - 1][0], A[l - 1][1], carry[0], carry[1])
        # Rout[l - 1] stays the identity pad on pair l
    new_left = RotationSequence(
        "descending",
        tuple(GivensRotation(i0 + 1, c, s) for i0, (c, s) in enumerate(N)))
    new_right = RotationSequence(
        "descending",
        tuple(GivensRotation(i0 + 2, c, s) for i0, (c, s) in enumerate(Rout)))
    return new_left, new_right


def reorder_first_row(pattern: RotationPattern) -> RotationPattern:
    """Funnel all row-1 rotations of a staircase pattern into one sequence.

    The input pattern must hold descending sequences starting at row 1
    whose lengths decrease by exactly one along application order (the
    first-applied sequence is the longest).  The result has the same dense
    product and consists of sequences starting at row 2 followed by a
    single final sequence starting at row 1.

    A pattern with at most one sequence is returned unchanged.
    """
    seqs = pattern.sequences
    if len(seqs) <= 1:
        return pattern
    for idx, seq in enumerate(seqs):
        _require_first_row(seq, f"sequences[{idx}]")
        if len(seq) == 0:
            raise ValueError(f"sequences[{idx}] must be nonempty")
    for idx, (a, b) in enumerate(zip(seqs, seqs[1:])):
        if len(b) != len(a) - 1:
            raise ValueError(
                f"sequence lengths must decrease by exactly 1 in application "
                f"order, got {len(a)} -> {len(b)} at sequences[{idx + 1}]")
    out: list[RotationSequence] = []
    B = seqs[0]
    for A in seqs[1:]:
        B, R = shift_through_higher(A, B)
        out.append(R)
    out.append(B)
    return RotationPattern(tuple(out))

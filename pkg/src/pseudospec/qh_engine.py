"""Shift-and-recycle triangularization of sliding band windows.

A window ``W_k`` (see :func:`pseudospec.operators.window`) is reduced in
two stages: first to banded upper-Hessenberg form ``H = Q W_k`` by ``2d-1``
sequences of adjacent-row rotations (:func:`qh_factorize`), then to
triangular form by one final rotation per column (:func:`complete_qr`),
which preserves every singular value of the window.

The point of the two-stage split is recycling: when the window slides one
position along the diagonal (``k -> k+1``), :func:`advance` updates the
Hessenberg stage in place using the stored rotation pattern — avoiding the
from-scratch cost, which grows with an extra factor of ``d`` — while
:func:`complete_qr` stays cheap.  :func:`run_sequence` drives whole
position ranges, optionally refactorizing from scratch every ``r`` steps to
cap error accumulation, with ``r`` estimated from measured step costs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .givens import GivensRotation, RotationPattern, RotationSequence
from .operators import BandOperator, WindowMatrix, window, window_column

__all__ = [
    "TriangularFactor",
    "QHState",
    "StepRecord",
    "qh_factorize",
    "complete_qr",
    "advance",
    "run_sequence",
    "estimate_restart_period",
]


@dataclass(frozen=True)
class TriangularFactor:
    """Banded upper-triangular factor with the singular values of a window.

    ``band`` has shape ``(n, w + 1)``; slot ``v`` of row ``i`` holds entry
    ``(i, i + v)``.  At most ``w = 2d`` superdiagonals are nonzero.
    """

    band: np.ndarray

    @property
    def n(self) -> int:
        return self.band.shape[0]

    @property
    def superdiagonals(self) -> int:
        return self.band.shape[1] - 1

    def entry(self, i: int, j: int) -> complex:
        v = j - i
        if 0 <= v <= self.superdiagonals and 0 <= i < self.n and j < self.n:
            return complex(self.band[i, v])
        return 0j

    def dense(self) -> np.ndarray:
        n = self.n
        M = np.zeros((n, n), dtype=np.complex128)
        for v in range(self.superdiagonals + 1):
            idx = np.arange(n - v)
            M[idx, idx + v] = self.band[: n - v, v]
        return M


class QHState:
    """Mutable Hessenberg-stage state of one window position.

    Attributes
    ----------
    origin : int
        Current window position ``k``.
    shift : complex
        The diagonal shift ``lam`` baked into the window.
    d, n, m : int
        Band half-width, window width, row count ``n + 2d``.
    step_index : int
        Completed in-place shifts since the last fresh factorization.
    rotations_computed, rotations_applied, turnovers : int
        Cumulative work counters (``applied`` counts band-wide application
        events, one per rotation actually touching the matrix).
    """

    def __init__(self, origin: int, shift: complex, d: int, n: int,
                 H: np.ndarray, cs: np.ndarray, sn: np.ndarray,
                 lo: np.ndarray, hi: np.ndarray) -> None:
        self.origin = origin
        self.shift = shift
        self.d = d
        self.n = n
        self.m = n + 2 * d
        self.H = H
        self.cs = cs
        self.sn = sn
        self.lo = lo
        self.hi = hi
        self.step_index = 0
        self.rotations_computed = 0
        self.rotations_applied = 0
        self.turnovers = 0
        self._csN = np.zeros(max(self.m - 1, 1), dtype=np.complex128)
        self._snN = np.zeros(max(self.m - 1, 1), dtype=np.complex128)

    @property
    def pattern(self) -> RotationPattern:
        """The stored rotation slots as sequences in application order."""
        seqs = []
        for p0 in range(self.cs.shape[0]):
            rots = tuple(
                GivensRotation(int(i0) + 1, complex(self.cs[p0, i0]),
                               complex(self.sn[p0, i0]))
                for i0 in range(int(self.lo[p0]), int(self.hi[p0]) + 1))
            seqs.append(RotationSequence("descending", rots))
        return RotationPattern(tuple(seqs))

    def hessenberg_dense(self) -> np.ndarray:
        """Dense realization of the banded Hessenberg storage (tests)."""
        d, n, m = self.d, self.n, self.m
        M = np.zeros((m, n), dtype=np.complex128)
        for i in range(m):
            for t in range(4 * d + 1):
                j = i - 2 * d + t
                if 0 <= j < n:
                    M[i, j] = self.H[i, t]
        return M

    def check_invariants(self) -> None:
        """Raise AssertionError when the structural invariants fail (tests)."""
        d, n, m = self.d, self.n, self.m
        assert np.all(np.isfinite(self.H.view(np.float64)))
        for i in range(m):
            for t in range(max(0, 2 * d - 1)):
                j = i - 2 * d + t
                if 0 <= j < n:
                    assert self.H[i, t] == 0, (i, t)
        for p0 in range(self.cs.shape[0]):
            if self.step_index == 0:
                want_lo = 2 * d - 1 - p0
            else:
                want_lo = max(1, 2 * d - 1 - p0 - self.step_index)
            assert self.lo[p0] == want_lo, (p0, self.lo[p0], want_lo)
            assert self.hi[p0] == m - 2 - p0, (p0, self.hi[p0])
            for i0 in range(int(self.lo[p0]), int(self.hi[p0]) + 1):
                u = abs(self.cs[p0, i0]) ** 2 + abs(self.sn[p0, i0]) ** 2
                assert abs(u - 1.0) < 1e-12, (p0, i0, u)


@dataclass
class StepRecord:
    """Cost accounting for one step of :func:`run_sequence`."""

    k: int
    step_kind: str
    rotations_applied: int
    wall_time_ns: int
    rotations_computed: int = 0
    turnovers: int = 0

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "step_kind": self.step_kind,
            "rotations_applied": self.rotations_applied,
            "wall_time_ns": self.wall_time_ns,
            "rotations_computed": self.rotations_computed,
            "turnovers": self.turnovers,
        }


def qh_factorize(w: WindowMatrix) -> QHState:
    """Reduce a window to banded upper-Hessenberg form from scratch."""
    d = w.bandwidth
    n = w.cols
    m = w.rows
    H = np.zeros((m, 4 * d + 1), dtype=np.complex128)
    H[:, : 2 * d + 1] = w.band
    nseq = max(2 * d - 1, 0)
    cs = np.zeros((nseq, max(m - 1, 1)), dtype=np.complex128)
    sn = np.zeros((nseq, max(m - 1, 1)), dtype=np.complex128)
    lo = np.zeros(max(nseq, 1), dtype=np.int64)
    hi = np.full(max(nseq, 1), -1, dtype=np.int64)
    state = QHState(w.origin, w.shift, d, n, H, cs, sn, lo, hi)
    if nseq > 0:
        ncomp, napp = _kernels.qh_factorize_band(H, d, n, cs, sn, lo, hi)
        state.rotations_computed += int(ncomp)
        state.rotations_applied += int(napp)
    return state


def complete_qr(state: QHState) -> TriangularFactor:
    """Triangularize the Hessenberg stage; ``state`` is not modified.

    Exactly ``n`` rotations are computed and applied per call (0 in the
    diagonal-only case ``d == 0``).
    """
    d, n = state.d, state.n
    if d == 0:
        return TriangularFactor(state.H[:n, :1].copy())
    R, _ = _kernels.complete_qr_band(state.H, d, n)
    return TriangularFactor(R)


def advance(state: QHState, new_column: np.ndarray) -> QHState:
    """Shift the factorization one position (``k -> k+1``) in place.

    ``new_column`` must hold the ``2d + 1`` raw band entries of the
    incoming final column (see
    :func:`pseudospec.operators.window_column`).  Returns ``state``.

    Raises
    ------
    ValueError
        On a malformed column or a window too narrow to recycle
        (``n < 2d + 2`` with ``d >= 1``).
    RuntimeError
        When a structural bookkeeping invariant fails mid-update.
    """
    d, n = state.d, state.n
    col = np.ascontiguousarray(np.asarray(new_column, dtype=np.complex128))
    if col.shape != (2 * d + 1,):
        raise ValueError(
            f"new_column must have shape ({2 * d + 1},), got {col.shape}")
    if d == 0:
        state.H[: n - 1, 0] = state.H[1:n, 0]
        state.H[n - 1, 0] = col[0]
        state.origin += 1
        state.step_index += 1
        return state
    if n < 2 * d + 2:
        raise ValueError(
            f"window width {n} is too narrow to recycle with bandwidth {d} "
            f"(need n >= {2 * d + 2}); refactorize instead")
    status, ncomp, napp, ntov = _kernels.advance_band(
        state.H, d, n, state.cs, state.sn, state.lo, state.hi, col,
        state.step_index, state._csN, state._snN)
    state.rotations_computed += int(ncomp)
    state.rotations_applied += int(napp)
    state.turnovers += int(ntov)
    if status != 0:
        raise RuntimeError(
            f"rotation bookkeeping invariant violated (code {int(status)}) "
            f"while advancing past position {state.origin}")
    state.origin += 1
    state.step_index += 1
    return state


def estimate_restart_period(initial_cost: float, step_costs: list[float],
                            k_max: int) -> int:
    """Pick the refactorization period minimizing modeled total cost.

    The model charges each cycle one fresh factorization (``initial_cost``)
    plus the measured early-step costs, extending the last measurement to
    steps beyond the measured horizon.  Evaluates every period in
    ``{2, ..., k_max}`` and returns the cheapest (ties go to the larger
    period; no usable measurements yield ``k_max``).
    """
    k_max = int(k_max)
    if k_max < 2 or not step_costs:
        return max(k_max, 1)
    costs = [float(c) for c in step_costs]
    c_sat = costs[-1]
    best_r = k_max
    best_total = np.inf
    for r in range(2, k_max + 1):
        steps = r - 1
        measured = min(steps, len(costs))
        per_cycle = float(initial_cost) + sum(costs[:measured])
        per_cycle += max(0, steps - len(costs)) * c_sat
        total = -(-k_max // r) * per_cycle
        if total <= best_total:
            best_total = total
            best_r = r
    return best_r


def run_sequence(op: BandOperator, lam: complex, k_list, n: int,
                 restart_period: int | str | None = "auto", *,
                 recorder: list[StepRecord] | None = None):
    """Yield ``(k, TriangularFactor)`` over consecutive window positions.

    ``restart_period`` controls recycling: ``1`` refactorizes every step
    (bit-for-bit identical to fresh factorization), an integer ``r >= 2``
    refactorizes every ``r`` steps, ``None`` never restarts, and
    ``"auto"`` measures the first fresh step and the early in-place shifts,
    then locks in the period minimizing the modeled total cost.  Narrow
    windows (``n < 2d + 2``) fall back to fresh factorization throughout.

    ``recorder``, when given, receives one :class:`StepRecord` per step.
    """
    ks = [int(k) for k in k_list]
    for a, b in zip(ks, ks[1:]):
        if b != a + 1:
            raise ValueError(
                f"positions must be consecutive ascending, got {a} -> {b}")
    d = op.bandwidth
    if d is None:
        raise ValueError(
            "operator has no certified bandwidth; apply truncate_to_band "
            "first")
    if not ks:
        return
    k_max = len(ks)
    can_recycle = d == 0 or n >= 2 * d + 2
    if restart_period == "auto":
        r: int | None = None if (can_recycle and d >= 1 and k_max > 1) else k_max
    elif restart_period is None:
        r = k_max
    else:
        r = int(restart_period)
        if r < 1:
            raise ValueError(f"restart period must be >= 1, got {r}")
    if not can_recycle:
        r = 1

    horizon = min(2 * d - 1, k_max - 1) if d >= 1 else 0
    initial_cost = 0.0
    step_costs: list[float] = []
    state: QHState | None = None
    steps_in_cycle = 0
    for k in ks:
        t0 = time.perf_counter_ns()
        if state is None or (r is not None and steps_in_cycle >= r):
            base_c, base_a, base_t = 0, 0, 0
            state = qh_factorize(window(op, lam, k, n))
            kind = "fresh"
            steps_in_cycle = 1
        else:
            base_c = state.rotations_computed
            base_a = state.rotations_applied
            base_t = state.turnovers
            advance(state, window_column(op, lam, k, n))
            kind = "advance"
            steps_in_cycle += 1
        factor = complete_qr(state)
        dt = time.perf_counter_ns() - t0
        if recorder is not None:
            recorder.append(StepRecord(
                k=k,
                step_kind=kind,
                rotations_applied=state.rotations_applied - base_a + state.n,
                wall_time_ns=int(dt),
                rotations_computed=state.rotations_computed - base_c + state.n,
                turnovers=state.turnovers - base_t,
            ))
        if r is None:
            if kind == "fresh":
                initial_cost = float(dt)
            else:
                step_costs.append(float(dt))
            if len(step_costs) >= horizon:
                r = estimate_restart_period(initial_cost, step_costs, k_max)
        yield k, factor

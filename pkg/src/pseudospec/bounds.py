"""Certified two-sided bounds on spectral sets of band operators.

For a shift ``lam`` the key quantity is the injection modulus of
``op - lam`` and of its adjoint, probed through finite windows: every
window's smallest singular value over-estimates the bi-infinite modulus,
and sliding windows squeeze it from above within an explicit resolution
term.  Collecting per-offset infima over representative window positions
yields two fields:

* ``F_lower`` (min over offsets) — drives the *inner* certified region:
  ``F_lower < eps - eta_d`` proves the shifted operator is within ``eps``
  of singular (union over offsets sharpens the set);
* ``F_upper`` (max over offsets) — drives the *outer* enclosure:
  ``F_upper >= eps + eta_d + delta_N`` certifies that ``lam`` is outside
  the enclosure, in particular that ``op - lam`` is invertible
  (intersection over offsets sharpens the enclosure).

``eta_d`` is the band-truncation error carried by the operator
construction and ``delta_N`` the window-resolution term from
:func:`delta_bound`.  Floating-point safety margins follow the solver
tolerance (see ``SOLVER_BACKOFF``); reports carry the raw field values so
callers can apply their own thresholds.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .operators import (
    BandOperator,
    DiagonalBandOperator,
    LaurentOperator,
    SplitBandOperator,
    adjoint,
    block_norm_sup,
    enumerate_positions,
    window,
    window_column,
)
from .qh_engine import advance, complete_qr, qh_factorize
from .sigma_min import (
    SOLVER_BACKOFF,
    dense_svd_oracle,
    smallest_singular_value_with_vector,
)

__all__ = [
    "BoundConfig",
    "BoundReport",
    "delta_bound",
    "nu_window_inf",
    "evaluate_bounds",
]


@dataclass(frozen=True)
class BoundConfig:
    """Window geometry and error budget for bound evaluation.

    ``b`` is the position block size (``>= d``), ``N`` the number of
    blocks per window, so windows have width ``n = N * b``.  ``offsets``
    selects the position residues to evaluate (default: all of
    ``0 .. b-1``).  ``eta_d`` and ``delta_N`` are carried into reports and
    membership thresholds.
    """

    d: int
    b: int
    N: int
    offsets: tuple[int, ...] | None = None
    eps_list: tuple[float, ...] = ()
    eta_d: float = 0.0
    delta_N: float = 0.0

    def __post_init__(self) -> None:
        if self.d < 0:
            raise ValueError(f"bandwidth must be >= 0, got {self.d}")
        if self.b < max(1, self.d):
            raise ValueError(
                f"block size must be >= bandwidth, got b={self.b} < d={self.d}")
        if self.N < 1:
            raise ValueError(f"block count must be >= 1, got {self.N}")
        offs = self.offsets
        if offs is not None:
            offs = tuple(int(c) for c in offs)
            if not offs:
                raise ValueError("offsets must be nonempty when given")
            for c in offs:
                if not 0 <= c < self.b:
                    raise ValueError(
                        f"offset {c} outside [0, {self.b})")
            object.__setattr__(self, "offsets", offs)
        eps = tuple(float(e) for e in self.eps_list)
        for e in eps:
            if not e > 0:
                raise ValueError(f"eps values must be positive, got {e}")
        object.__setattr__(self, "eps_list", eps)
        if not (self.eta_d >= 0 and math.isfinite(self.eta_d)):
            raise ValueError(f"eta_d must be finite >= 0, got {self.eta_d}")
        if not (self.delta_N >= 0 and math.isfinite(self.delta_N)):
            raise ValueError(f"delta_N must be finite >= 0, got {self.delta_N}")

    @property
    def n(self) -> int:
        """Window width."""
        return self.N * self.b

    @property
    def offset_tuple(self) -> tuple[int, ...]:
        return self.offsets if self.offsets is not None else tuple(range(self.b))


@dataclass(frozen=True)
class BoundReport:
    """Field values of both bounds at one shift, with the error budget.

    ``per_offset[i]`` is the window-infimum for ``offset_tuple[i]``;
    ``F_lower``/``F_upper`` are its min/max.  ``budget`` groups
    ``(eps_list, eta_d, delta_N)``.  Membership helpers apply the
    documented strict-inequality convention with a floating-point backoff
    of ``(1 + SOLVER_BACKOFF * solver_tol)``.
    """

    lam: complex
    F_lower: float
    F_upper: float
    per_offset: tuple[float, ...]
    offsets: tuple[int, ...]
    eps_list: tuple[float, ...] = ()
    eta_d: float = 0.0
    delta_N: float = 0.0

    @property
    def budget(self) -> tuple[tuple[float, ...], float, float]:
        return (self.eps_list, self.eta_d, self.delta_N)

    def certified_inside(self, eps: float, solver_tol: float = 1e-8) -> bool:
        """True when ``lam`` provably lies in the eps-level lower set."""
        guard = 1.0 + SOLVER_BACKOFF * solver_tol
        return self.F_lower * guard < eps - self.eta_d

    def in_upper_set(self, eps: float, solver_tol: float = 1e-8) -> bool:
        """True unless membership in the outer enclosure can be excluded."""
        guard = 1.0 + SOLVER_BACKOFF * solver_tol
        return self.F_upper / guard < eps + self.eta_d + self.delta_N

    def certifies_exclusion(self, eps: float, solver_tol: float = 1e-8) -> bool:
        """True when ``lam`` provably lies outside the outer enclosure.

        At ``lam = 0`` this certifies that the operator itself is
        invertible.
        """
        return not self.in_upper_set(eps, solver_tol)

    def to_record(self) -> dict:
        return {
            "re": float(self.lam.real),
            "im": float(self.lam.imag),
            "F_l": self.F_lower,
            "F_u": self.F_upper,
            "eta_d": self.eta_d,
            "delta_N": self.delta_N,
        }


def delta_bound(op: BandOperator, b: int, offset: int, N: int) -> float:
    """Window-resolution error term of the block partition.

    ``2 * (sup ||subdiagonal block|| + sup ||superdiagonal block||)
    * sin(pi / (2N + 2))``; zero for diagonal operators, and of order
    ``1/N`` in general.
    """
    if N < 1:
        raise ValueError(f"block count must be >= 1, got {N}")
    sub, sup = block_norm_sup(op, b, offset)
    return 2.0 * (sub + sup) * math.sin(math.pi / (2 * N + 2))


def _split_runs(ks: list[int]) -> list[list[int]]:
    runs: list[list[int]] = []
    for k in ks:
        if runs and k == runs[-1][-1] + 1:
            runs[-1].append(k)
        else:
            runs.append([k])
    return runs


def _stream_sigmas(op: BandOperator, lam: complex, n: int, ks: list[int], *,
                   tol: float, seed: int, engine: str, restart_period,
                   workers: int = 0) -> dict[int, float]:
    """Smallest window singular value at each position of one operator.

    ``workers >= 2`` cuts long consecutive runs into that many contiguous
    segments and streams them concurrently (the heavy kernels release the
    GIL).  Segmentation depends only on the position count, so results are
    reproducible for a fixed ``workers`` value; each segment restarts the
    warm-start chain, so values can move against the serial ones within
    the solver tolerance.
    """
    out: dict[int, float] = {}
    if engine == "dense":
        for k in ks:
            s = dense_svd_oracle(window(op, lam, k, n).dense())
            out[k] = float(s[-1])
        return out
    d = op.bandwidth
    can_recycle = d == 0 or n >= 2 * d + 2

    def stream_run(run: list[int]) -> dict[int, float]:
        got: dict[int, float] = {}
        if len(run) == 1 or not can_recycle:
            for k in run:
                factor = complete_qr(qh_factorize(window(op, lam, k, n)))
                res, _ = smallest_singular_value_with_vector(
                    factor, tol=tol, seed=seed)
                got[k] = res.sigma
            return got
        state = None
        warm = None
        for k in run:
            if state is None:
                state = qh_factorize(window(op, lam, k, n))
            elif restart_period is not None and \
                    state.step_index + 1 >= int(restart_period):
                state = qh_factorize(window(op, lam, k, n))
            else:
                advance(state, window_column(op, lam, k, n))
            res, vec = smallest_singular_value_with_vector(
                complete_qr(state), tol=tol, seed=seed, v0=warm)
            warm = vec if res.converged else None
            got[k] = res.sigma
        return got

    runs = _split_runs(sorted(ks))
    w = int(workers)
    if w < 0:
        raise ValueError(f"workers must be >= 0, got {workers}")
    if w >= 2 and can_recycle:
        total = sum(len(run) for run in runs)
        target = max(32, -(-total // w))
        pieces: list[list[int]] = []
        for run in runs:
            m = -(-len(run) // target)
            if m <= 1:
                pieces.append(run)
                continue
            step = -(-len(run) // m)
            for q in range(0, len(run), step):
                pieces.append(run[q:q + step])
        if len(pieces) > 1:
            with ThreadPoolExecutor(max_workers=w) as pool:
                for got in pool.map(stream_run, pieces):
                    out.update(got)
            return out
    for run in runs:
        out.update(stream_run(run))
    return out


def _position_values(op: BandOperator, lam: complex, n: int,
                     positions: list[int], *, tol: float, seed: int,
                     engine: str, restart_period,
                     workers: int = 0) -> dict[int, float]:
    """Per-position ``min(sigma(op window), sigma(adjoint window))``.

    The adjoint of a band operator is a band operator with mirrored
    structure, so the same representative positions cover it; both streams
    run through the same machinery.
    """
    lam = complex(lam)
    vals = _stream_sigmas(op, lam, n, positions, tol=tol, seed=seed,
                          engine=engine, restart_period=restart_period,
                          workers=workers)
    adj = _stream_sigmas(adjoint(op), np.conj(lam), n, positions, tol=tol,
                         seed=seed, engine=engine,
                         restart_period=restart_period, workers=workers)
    return {k: min(vals[k], adj[k]) for k in vals}


def nu_window_inf(op: BandOperator, lam: complex, n: int, positions,
                  engine: str = "qh", *, tol: float = 1e-8, seed: int = 0,
                  restart_period=None, workers: int = 0) -> float:
    """Infimum of window smallest singular values over covering positions.

    ``positions`` is the list (or ``(list, flag)`` pair) produced by
    :func:`pseudospec.operators.enumerate_positions`.  Both the operator
    and its adjoint are probed at every position; consecutive position
    runs share one in-place shifted factorization with warm-started
    solves.  ``engine="dense"`` switches to the independent dense SVD
    route (test oracle); ``workers >= 2`` streams long runs in that many
    concurrent segments (see :func:`evaluate_bounds`).

    Numerically singular windows report their tiny diagonal magnitude, so
    a shift deep inside the spectrum simply returns (close to) 0.
    """
    if isinstance(positions, tuple) and len(positions) == 2 \
            and isinstance(positions[1], bool):
        positions = positions[0]
    ks = [int(k) for k in positions]
    if not ks:
        raise ValueError("positions must be nonempty")
    vals = _position_values(op, lam, n, ks, tol=tol, seed=seed,
                            engine=engine, restart_period=restart_period,
                            workers=workers)
    return min(vals.values())


def _class_min(op: BandOperator, vals: dict[int, float], b: int, c: int,
               n: int) -> float:
    """Infimum over the position class ``k ≡ c (mod b)`` given stride-1
    values at the covering set of :func:`enumerate_positions`."""
    if isinstance(op, LaurentOperator):
        return next(iter(vals.values()))
    if isinstance(op, SplitBandOperator):
        d = op.bandwidth
        lo = -n - d - 1
        hi = d + 1
        cands = [v for k, v in vals.items() if lo <= k <= hi and k % b == c]
        # far windows are pure one-family windows, identical for every
        # position on their side, and every residue class reaches both sides
        cands += [v for k, v in vals.items() if k < lo or k > hi]
        return min(cands)
    p = op.period
    residues = {(c + b * t) % p for t in range(p // math.gcd(b, p))}
    if not op.overrides:
        return min(v for k, v in vals.items() if k % p in residues)
    s0 = min(min(i, j) for (i, j) in op.overrides)
    s1 = max(max(i, j) for (i, j) in op.overrides)
    lo = s0 - n - op.bandwidth - 1
    hi = s1 + op.bandwidth + 1
    cands = [v for k, v in vals.items() if lo <= k <= hi and k % b == c]
    cands += [v for k, v in vals.items()
              if k > hi and k % p in residues]
    return min(cands)


def evaluate_bounds(op: BandOperator, lam: complex, cfg: BoundConfig, *,
                    tol: float = 1e-8, seed: int = 0, engine: str = "qh",
                    restart_period=None, workers: int = 0) -> BoundReport:
    """Evaluate both bound fields at one shift.

    Runs a single stride-1 sweep over the covering position set (operator
    and adjoint, one recycled stream per consecutive run) and partitions
    the per-position values into the residue classes of ``cfg.offsets``;
    ``F_lower``/``F_upper`` are the min/max of the per-class infima.

    ``workers >= 2`` streams long position runs in that many concurrent
    segments.  The segmentation is fixed by the position count, so repeat
    calls with the same ``workers`` reproduce bit-identical reports; a
    segment boundary restarts the warm-start chain, so fields may move
    against the serial sweep within the solver tolerance.
    """
    n = cfg.n
    positions, covered = enumerate_positions(op, n, 0, 1)
    if not covered:
        raise ValueError("position enumeration does not certify coverage")
    vals = _position_values(op, lam, n, positions, tol=tol, seed=seed,
                            engine=engine, restart_period=restart_period,
                            workers=workers)
    offsets = cfg.offset_tuple
    per = tuple(_class_min(op, vals, cfg.b, c, n) for c in offsets)
    return BoundReport(
        lam=complex(lam),
        F_lower=min(per),
        F_upper=max(per),
        per_offset=per,
        offsets=offsets,
        eps_list=cfg.eps_list,
        eta_d=cfg.eta_d,
        delta_N=cfg.delta_N,
    )

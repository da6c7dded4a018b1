"""Bi-infinite band operator model.

The classes here describe bounded operators on square-summable two-sided
sequences through their matrix entries ``entry(i, j)`` (integers of either
sign).  Three concrete shapes are provided:

* :class:`LaurentOperator` — constant along every diagonal, defined lazily
  by a :class:`LaurentSymbol` (possibly with unbounded support);
* :class:`DiagonalBandOperator` — bandwidth ``d``, diagonals periodic in
  the column index, plus finitely many entry overrides (impurities);
* :class:`SplitBandOperator` — banded with one coefficient family on
  nonnegative columns (or rows) and another on negative ones.

Positive diagonal offset ``q`` means the ``q``-th *sub*diagonal: the
diagonal holding entries ``(j + q, j)``.

Finite rectangular *windows* cut from an operator are the raw material of
the factorization pipeline: ``window(op, lam, k, n)`` is the
``(n + 2d) x n`` slice of ``op - lam*I`` with columns ``k .. k+n-1`` and
all rows that meet the band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

__all__ = [
    "LaurentSymbol",
    "LaurentOperator",
    "DiagonalBandOperator",
    "SplitBandOperator",
    "WindowMatrix",
    "laurent_operator",
    "truncate_to_band",
    "fejer_band_approx",
    "singular_integral_operator",
    "add_impurity",
    "adjoint",
    "window",
    "window_column",
    "enumerate_positions",
    "block_norm_sup",
    "fish_symbol",
    "demo_periodic_operator",
    "grcar_block",
]

_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)
_NEG_I_POWERS = (1 + 0j, -1j, -1 + 0j, 1j)


class LaurentSymbol:
    """Coefficient family ``a_k`` of a constant-diagonal operator.

    Parameters
    ----------
    coefficients : mapping or callable
        Either ``{offset: value}`` (finite, exact) or a callable
        ``k -> value`` evaluated lazily inside ``support``.
    support : (int, int), optional
        Inclusive offset range outside which coefficients are treated as
        zero.  Required for callables; inferred for mappings.  For
        callables the range is understood as a numerical cutoff, not an
        exact band.
    tail_bound : callable, optional
        ``d -> sum of |a_k| over |k| > d``.  Defaults to direct partial
        summation over the stored support.
    """

    def __init__(self,
                 coefficients: Mapping[int, complex] | Callable[[int], complex],
                 *,
                 support: tuple[int, int] | None = None,
                 tail_bound: Callable[[int], float] | None = None) -> None:
        if callable(coefficients) and not isinstance(coefficients, Mapping):
            if support is None:
                raise ValueError(
                    "callable coefficients require an explicit support range")
            self._fn = coefficients
            self._map = None
            self.exact_support = False
        else:
            cmap = {int(k): complex(v)
                    for k, v in dict(coefficients).items() if complex(v) != 0}
            self._fn = None
            self._map = cmap
            if support is None:
                if cmap:
                    support = (min(cmap), max(cmap))
                else:
                    support = (0, 0)
            self.exact_support = True
        k0, k1 = int(support[0]), int(support[1])
        if k0 > k1:
            raise ValueError(f"empty support range ({k0}, {k1})")
        self.support = (k0, k1)
        self._tail_fn = tail_bound

    def coefficient(self, k: int) -> complex:
        """The value on diagonal offset ``k`` (0 outside the support)."""
        if k < self.support[0] or k > self.support[1]:
            return 0j
        if self._map is not None:
            return self._map.get(k, 0j)
        return complex(self._fn(k))

    def tail(self, d: int) -> float:
        """Upper bound on ``sum(|a_k| for |k| > d)``, nonincreasing in ``d``."""
        if d < 0:
            raise ValueError(f"tail offset must be >= 0, got {d}")
        if self._tail_fn is not None:
            return float(self._tail_fn(d))
        total = 0.0
        for k in range(self.support[0], self.support[1] + 1):
            if abs(k) > d:
                total += abs(self.coefficient(k))
        return total

    def conj_reflect(self) -> "LaurentSymbol":
        """The symbol of the adjoint operator: ``k -> conj(a_{-k})``."""
        if self._map is not None:
            return LaurentSymbol({-k: np.conj(v) for k, v in self._map.items()},
                                 tail_bound=self._tail_fn)
        base = self

        def refl(k: int) -> complex:
            return complex(np.conj(base.coefficient(-k)))

        return LaurentSymbol(
            refl,
            support=(-base.support[1], -base.support[0]),
            # |a_k| is summed over both signs of k, so the tail is unchanged
            tail_bound=base._tail_fn if base._tail_fn is not None else base.tail,
        )


class LaurentOperator:
    """Lazy constant-diagonal operator ``entry(i, j) = a_{i-j}``."""

    def __init__(self, symbol: LaurentSymbol) -> None:
        if not isinstance(symbol, LaurentSymbol):
            raise TypeError("LaurentOperator requires a LaurentSymbol")
        self.symbol = symbol
        self.overrides: dict[tuple[int, int], complex] = {}
        self.period = 1

    @property
    def bandwidth(self) -> int | None:
        """Band half-width, or None when the support is only a cutoff."""
        if not self.symbol.exact_support:
            return None
        k0, k1 = self.symbol.support
        return max(abs(k0), abs(k1))

    def entry(self, i: int, j: int) -> complex:
        return self.symbol.coefficient(i - j)

    def diagonal_value(self, q: int, j: int) -> complex:
        return self.symbol.coefficient(q)

    def adjoint(self) -> "LaurentOperator":
        return LaurentOperator(self.symbol.conj_reflect())


def _normalize_diagonals(
        diagonals: Mapping[int, Sequence[complex]],
        d: int) -> dict[int, tuple[complex, ...]]:
    out: dict[int, tuple[complex, ...]] = {}
    for q, vals in diagonals.items():
        q = int(q)
        if abs(q) > d:
            raise ValueError(
                f"diagonal offset {q} exceeds bandwidth {d}")
        tup = tuple(complex(v) for v in vals)
        if not tup:
            raise ValueError(f"diagonal {q} has no values")
        if any(v != 0 for v in tup):
            out[q] = tup
    return out


class DiagonalBandOperator:
    """Banded operator with column-periodic diagonals and finite edits.

    ``diagonals`` maps offset ``q`` (positive = subdiagonal) to a periodic
    value tuple indexed by column modulo its length.  ``overrides`` maps
    index pairs ``(i, j)`` with ``|i - j| <= bandwidth`` to replacement
    entry values.  Instances are immutable by convention.
    """

    def __init__(self,
                 diagonals: Mapping[int, Sequence[complex]],
                 bandwidth: int,
                 overrides: Mapping[tuple[int, int], complex] | None = None
                 ) -> None:
        d = int(bandwidth)
        if d < 0:
            raise ValueError(f"bandwidth must be >= 0, got {d}")
        self.bandwidth = d
        self._diagonals = _normalize_diagonals(diagonals, d)
        per = 1
        for vals in self._diagonals.values():
            per = math.lcm(per, len(vals))
        self.period = per
        ov: dict[tuple[int, int], complex] = {}
        for (i, j), v in dict(overrides or {}).items():
            i, j = int(i), int(j)
            if abs(i - j) > d:
                raise ValueError(
                    f"override at ({i}, {j}) lies outside bandwidth {d}")
            ov[(i, j)] = complex(v)
        self.overrides = ov

    def diagonal_value(self, q: int, j: int) -> complex:
        vals = self._diagonals.get(q)
        if vals is None:
            return 0j
        return vals[j % len(vals)]

    def entry(self, i: int, j: int) -> complex:
        ov = self.overrides.get((i, j))
        if ov is not None:
            return ov
        q = i - j
        if abs(q) > self.bandwidth:
            return 0j
        return self.diagonal_value(q, j)

    def adjoint(self) -> "DiagonalBandOperator":
        d = self.bandwidth
        p = self.period
        diag: dict[int, tuple[complex, ...]] = {}
        for q in range(-d, d + 1):
            src = self._diagonals.get(-q)
            if src is None:
                continue
            diag[q] = tuple(
                complex(np.conj(self.diagonal_value(-q, j + q)))
                for j in range(p))
        ov = {(j, i): complex(np.conj(v))
              for (i, j), v in self.overrides.items()}
        return DiagonalBandOperator(diag, d, ov)


class SplitBandOperator:
    """Banded operator whose diagonals switch families at index zero.

    With ``axis="column"`` the entry is ``a_{i-j}`` for ``j >= 0`` and
    ``b_{i-j}`` for ``j < 0``; with ``axis="row"`` the sign of ``i``
    decides.  ``truncation_tail`` records the certified error of dropping
    coefficients beyond the bandwidth
    (``sum(max(|a_k|, |b_k|) for |k| > d)``).
    """

    def __init__(self,
                 pos_coeffs: Mapping[int, complex],
                 neg_coeffs: Mapping[int, complex],
                 bandwidth: int,
                 axis: str = "column",
                 truncation_tail: float = 0.0) -> None:
        d = int(bandwidth)
        if d < 0:
            raise ValueError(f"bandwidth must be >= 0, got {d}")
        if axis not in ("column", "row"):
            raise ValueError(f"axis must be 'column' or 'row', got {axis!r}")
        for name, coeffs in (("pos", pos_coeffs), ("neg", neg_coeffs)):
            for k in coeffs:
                if abs(int(k)) > d:
                    raise ValueError(
                        f"{name} coefficient offset {k} exceeds bandwidth {d}")
        self.bandwidth = d
        self.axis = axis
        self.pos_coeffs = {int(k): complex(v) for k, v in pos_coeffs.items()
                           if complex(v) != 0}
        self.neg_coeffs = {int(k): complex(v) for k, v in neg_coeffs.items()
                           if complex(v) != 0}
        self.truncation_tail = float(truncation_tail)
        self.overrides: dict[tuple[int, int], complex] = {}

    def entry(self, i: int, j: int) -> complex:
        q = i - j
        if abs(q) > self.bandwidth:
            return 0j
        side = j if self.axis == "column" else i
        coeffs = self.pos_coeffs if side >= 0 else self.neg_coeffs
        return coeffs.get(q, 0j)

    def diagonal_value(self, q: int, j: int) -> complex:
        # only meaningful for column-split operators, where the diagonal
        # value depends on the column alone
        if self.axis != "column":
            raise ValueError(
                "row-split operators have no column-indexed diagonal values")
        coeffs = self.pos_coeffs if j >= 0 else self.neg_coeffs
        return coeffs.get(q, 0j)

    def adjoint(self) -> "SplitBandOperator":
        return SplitBandOperator(
            {-k: complex(np.conj(v)) for k, v in self.pos_coeffs.items()},
            {-k: complex(np.conj(v)) for k, v in self.neg_coeffs.items()},
            self.bandwidth,
            axis="row" if self.axis == "column" else "column",
            truncation_tail=self.truncation_tail)


BandOperator = LaurentOperator | DiagonalBandOperator | SplitBandOperator


def laurent_operator(
        symbol: LaurentSymbol | Mapping[int, complex]) -> LaurentOperator:
    """Wrap a symbol (or coefficient mapping) as a lazy diagonal operator."""
    if isinstance(symbol, Mapping):
        symbol = LaurentSymbol(symbol)
    return LaurentOperator(symbol)


def truncate_to_band(op: BandOperator,
                     d: int) -> tuple["DiagonalBandOperator | SplitBandOperator",
                                      float]:
    """Drop all diagonals beyond offset ``d``.

    Returns ``(banded_op, eta)`` where ``eta`` bounds the operator norm of
    the discarded part (sum of sup magnitudes of dropped diagonals).

    Raises
    ------
    ValueError
        If ``d < 0``, or if an entry override would fall outside the new
        band.
    """
    d = int(d)
    if d < 0:
        raise ValueError(f"truncation bandwidth must be >= 0, got {d}")
    if isinstance(op, LaurentOperator):
        diag = {q: (op.symbol.coefficient(q),) for q in range(-d, d + 1)}
        return DiagonalBandOperator(diag, d), op.symbol.tail(d)
    if isinstance(op, DiagonalBandOperator):
        if d >= op.bandwidth:
            return op, 0.0
        eta = 0.0
        kept: dict[int, tuple[complex, ...]] = {}
        for q, vals in op._diagonals.items():
            if abs(q) <= d:
                kept[q] = vals
            else:
                eta += max(abs(v) for v in vals)
        for (i, j) in op.overrides:
            if abs(i - j) > d:
                raise ValueError(
                    f"entry override at ({i}, {j}) cannot survive truncation "
                    f"to bandwidth {d}")
        return DiagonalBandOperator(kept, d, op.overrides), eta
    if isinstance(op, SplitBandOperator):
        if d >= op.bandwidth:
            return op, op.truncation_tail
        eta = op.truncation_tail
        for k in range(d + 1, op.bandwidth + 1):
            for q in (k, -k):
                eta += max(abs(op.pos_coeffs.get(q, 0j)),
                           abs(op.neg_coeffs.get(q, 0j)))
        keep_pos = {k: v for k, v in op.pos_coeffs.items() if abs(k) <= d}
        keep_neg = {k: v for k, v in op.neg_coeffs.items() if abs(k) <= d}
        return SplitBandOperator(keep_pos, keep_neg, d, op.axis, eta), eta
    raise TypeError(f"cannot truncate operator of type {type(op).__name__}")


def fejer_band_approx(op: BandOperator, n: int) -> DiagonalBandOperator:
    """Cesàro-weighted band approximation of order ``n``.

    Keeps diagonals ``|k| <= n`` scaled by ``1 - |k|/(n+1)``.  The input
    must have globally defined diagonals (no entry overrides).
    """
    n = int(n)
    if n < 0:
        raise ValueError(f"approximation order must be >= 0, got {n}")
    diag: dict[int, tuple[complex, ...]] = {}
    if isinstance(op, LaurentOperator):
        for q in range(-n, n + 1):
            w = 1.0 - abs(q) / (n + 1)
            v = op.symbol.coefficient(q)
            if v != 0:
                diag[q] = (w * v,)
        return DiagonalBandOperator(diag, n)
    if isinstance(op, DiagonalBandOperator):
        if op.overrides:
            raise ValueError(
                "operators with entry overrides have no global diagonals to "
                "re-weight")
        for q, vals in op._diagonals.items():
            if abs(q) <= n:
                w = 1.0 - abs(q) / (n + 1)
                diag[q] = tuple(w * v for v in vals)
        return DiagonalBandOperator(diag, min(n, op.bandwidth))
    raise TypeError(
        f"cannot form a diagonal re-weighting of {type(op).__name__}")


def singular_integral_operator(pos_symbol: LaurentSymbol | Mapping[int, complex],
                               neg_symbol: LaurentSymbol | Mapping[int, complex],
                               d: int) -> SplitBandOperator:
    """Column-split band operator from two coefficient families.

    Entry ``(i, j)`` is ``a_{i-j}`` for ``j >= 0`` and ``b_{i-j}`` for
    ``j < 0``, truncated to ``|i - j| <= d``; the certified truncation
    error ``sum(max(|a_k|, |b_k|) for |k| > d)`` is stored on the result.
    """
    d = int(d)
    if d < 0:
        raise ValueError(f"bandwidth must be >= 0, got {d}")
    if isinstance(pos_symbol, Mapping):
        pos_symbol = LaurentSymbol(pos_symbol)
    if isinstance(neg_symbol, Mapping):
        neg_symbol = LaurentSymbol(neg_symbol)
    pos = {k: pos_symbol.coefficient(k) for k in range(-d, d + 1)}
    neg = {k: neg_symbol.coefficient(k) for k in range(-d, d + 1)}
    k_lo = min(pos_symbol.support[0], neg_symbol.support[0])
    k_hi = max(pos_symbol.support[1], neg_symbol.support[1])
    tail = 0.0
    for k in range(k_lo, k_hi + 1):
        if abs(k) > d:
            tail += max(abs(pos_symbol.coefficient(k)),
                        abs(neg_symbol.coefficient(k)))
    return SplitBandOperator(pos, neg, d, "column", tail)


def add_impurity(op: DiagonalBandOperator, E: np.ndarray, row_offset: int,
                 col_offset: int) -> DiagonalBandOperator:
    """Add a finite dense block to the operator, entry by entry.

    Entry ``(row_offset + r, col_offset + c)`` becomes the current value
    plus ``E[r, c]``.  Nonzero additions outside the band are rejected
    rather than widening the bandwidth; zero entries of ``E`` are ignored.
    """
    if not isinstance(op, DiagonalBandOperator):
        raise TypeError(
            "impurities require a banded operator; apply truncate_to_band "
            "first")
    E = np.asarray(E, dtype=np.complex128)
    if E.ndim != 2:
        raise ValueError(f"impurity block must be 2-D, got shape {E.shape}")
    d = op.bandwidth
    merged = dict(op.overrides)
    for r in range(E.shape[0]):
        for c in range(E.shape[1]):
            v = E[r, c]
            if v == 0:
                continue
            i = int(row_offset) + r
            j = int(col_offset) + c
            if abs(i - j) > d:
                raise ValueError(
                    f"impurity entry at ({i}, {j}) lies outside bandwidth "
                    f"{d}; widen the band before editing")
            base = merged.get((i, j))
            if base is None:
                base = op.entry(i, j)
            merged[(i, j)] = base + v
    return DiagonalBandOperator(op._diagonals, d, merged)


def adjoint(op: BandOperator) -> BandOperator:
    """The adjoint operator: ``entry(i, j) -> conj(entry(j, i))``."""
    return op.adjoint()


def _require_bandwidth(op: BandOperator) -> int:
    d = op.bandwidth
    if d is None:
        raise ValueError(
            "operator has no certified bandwidth; apply truncate_to_band "
            "first")
    return d


def _diag_values(op: BandOperator, q: int, cols: np.ndarray) -> np.ndarray:
    if isinstance(op, LaurentOperator):
        return np.full(cols.shape[0], op.symbol.coefficient(q),
                       dtype=np.complex128)
    if isinstance(op, DiagonalBandOperator):
        vals = op._diagonals.get(q)
        if vals is None:
            return np.zeros(cols.shape[0], dtype=np.complex128)
        arr = np.asarray(vals, dtype=np.complex128)
        return arr[cols % len(vals)]
    if isinstance(op, SplitBandOperator):
        if op.axis == "column":
            a = op.pos_coeffs.get(q, 0j)
            b = op.neg_coeffs.get(q, 0j)
            return np.where(cols >= 0, a, b).astype(np.complex128)
        rows = cols + q
        a = op.pos_coeffs.get(q, 0j)
        b = op.neg_coeffs.get(q, 0j)
        return np.where(rows >= 0, a, b).astype(np.complex128)
    raise TypeError(f"unsupported operator type {type(op).__name__}")


@dataclass(frozen=True)
class WindowMatrix:
    """The ``(n + 2d) x n`` band slice of ``op - lam*I`` at position ``k``.

    Local entry ``(r, c)`` equals ``op(k - d + r, k + c) - lam*[k-d+r == k+c]``,
    so all nonzeros satisfy ``0 <= c - r + 2d <= 2d``.  ``band`` stores
    slot ``u = c - r + 2d`` of row ``r``.
    """

    band: np.ndarray
    origin: int
    shift: complex
    bandwidth: int

    @property
    def rows(self) -> int:
        return self.band.shape[0]

    @property
    def cols(self) -> int:
        return self.band.shape[0] - 2 * self.bandwidth

    def entry(self, r: int, c: int) -> complex:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"({r}, {c}) outside a {self.rows} x {self.cols} window")
        u = c - r + 2 * self.bandwidth
        if 0 <= u <= 2 * self.bandwidth:
            return complex(self.band[r, u])
        return 0j

    def dense(self) -> np.ndarray:
        d = self.bandwidth
        m, n = self.rows, self.cols
        M = np.zeros((m, n), dtype=np.complex128)
        for u in range(2 * d + 1):
            for r in range(m):
                c = r - 2 * d + u
                if 0 <= c < n:
                    M[r, c] = self.band[r, u]
        return M


def window(op: BandOperator, lam: complex, k: int, n: int) -> WindowMatrix:
    """Extract the shifted band window with columns ``k .. k+n-1``."""
    d = _require_bandwidth(op)
    n = int(n)
    if n < 1:
        raise ValueError(f"window width must be >= 1, got {n}")
    lam = complex(lam)
    m = n + 2 * d
    band = np.zeros((m, 2 * d + 1), dtype=np.complex128)
    cols = np.arange(k, k + n)
    for q in range(-d, d + 1):
        vals = _diag_values(op, q, cols)
        if q == 0:
            vals = vals - lam
        band[d + q: d + q + n, d - q] = vals
    for (ig, jg), v in op.overrides.items():
        c = jg - k
        if 0 <= c < n:
            q = ig - jg
            band[c + d + q, d - q] = v - lam if q == 0 else v
    return WindowMatrix(band, int(k), lam, d)


def window_column(op: BandOperator, lam: complex, k: int, n: int) -> np.ndarray:
    """Raw band entries of the final column of ``window(op, lam, k, n)``.

    Slot ``q`` of the result is the entry in global row ``k + n - 1 + q - d``
    of global column ``k + n - 1``; it lands in local row ``n - 1 + q``.
    """
    d = _require_bandwidth(op)
    jg = int(k) + int(n) - 1
    out = np.empty(2 * d + 1, dtype=np.complex128)
    for q in range(2 * d + 1):
        v = op.entry(jg + q - d, jg)
        if q == d:
            v -= lam
        out[q] = v
    return out


def enumerate_positions(op: BandOperator, n: int, block_offset: int = 0,
                        block_size: int = 1) -> tuple[list[int], bool]:
    """Finitely many window positions covering all of ``k ≡ offset (mod b)``.

    Every window of width ``n`` at a position in the residue class equals
    (entry for entry) the window at one of the returned positions.  The
    second return value reports whether this coverage is certified for the
    operator type; types without eventual periodicity are rejected.
    """
    b = int(block_size)
    c = int(block_offset)
    if b < 1:
        raise ValueError(f"block size must be >= 1, got {b}")
    if not 0 <= c < b:
        raise ValueError(f"block offset must lie in [0, {b}), got {c}")
    n = int(n)
    if n < 1:
        raise ValueError(f"window width must be >= 1, got {n}")
    if isinstance(op, LaurentOperator):
        return [c], True
    if isinstance(op, SplitBandOperator):
        d = op.bandwidth
        lo = -n - d - 1
        hi = d + 1
        ks = [k for k in range(lo, hi + 1) if (k - c) % b == 0]
        right = hi + 1 + ((c - (hi + 1)) % b)
        left = lo - 1 - ((lo - 1 - c) % b)
        return sorted(set(ks) | {left, right}), True
    if isinstance(op, DiagonalBandOperator):
        d = op.bandwidth
        p = op.period
        reps = p // math.gcd(b, p)
        base = [c + b * t for t in range(reps)]
        if not op.overrides:
            return base, True
        s0 = min(min(i, j) for (i, j) in op.overrides)
        s1 = max(max(i, j) for (i, j) in op.overrides)
        lo = s0 - n - d - 1
        hi = s1 + d + 1
        ks = {k for k in range(lo, hi + 1) if (k - c) % b == 0}
        L = math.lcm(b, p)
        for k0 in base:
            ks.add(k0 + L * math.ceil((hi + 1 - k0) / L))
        return sorted(ks), True
    raise TypeError(
        f"cannot enumerate positions for {type(op).__name__}: no eventual "
        f"periodicity is declared for this operator type")


def block_norm_sup(op: BandOperator, b: int, offset: int) -> tuple[float, float]:
    """Sup of spectral norms of the sub- and superdiagonal ``b x b`` blocks.

    The operator is partitioned into blocks whose row/column ranges start
    at ``offset + l*b``; with ``b >= bandwidth`` only the block diagonals
    directly below and above the main one are nonzero.  Returns
    ``(sup_subdiagonal, sup_superdiagonal)``.
    """
    d = _require_bandwidth(op)
    b = int(b)
    offset = int(offset)
    if b < max(1, d):
        raise ValueError(
            f"block size must be at least the bandwidth, got b={b} < d={d}")
    if not 0 <= offset < b:
        raise ValueError(f"offset must lie in [0, {b}), got {offset}")

    def block(li: int, lj: int) -> np.ndarray:
        r0 = offset + li * b
        c0 = offset + lj * b
        M = np.empty((b, b), dtype=np.complex128)
        for r in range(b):
            for cc in range(b):
                M[r, cc] = op.entry(r0 + r, c0 + cc)
        return M

    if isinstance(op, LaurentOperator):
        ls: list[int] = [0]
    elif isinstance(op, SplitBandOperator):
        K = 2 + (d + b) // b
        ls = list(range(-K, K + 1))
    else:
        p = op.period
        reps = p // math.gcd(b, p)
        lset = set(range(reps))
        if op.overrides:
            s0 = min(min(i, j) for (i, j) in op.overrides)
            s1 = max(max(i, j) for (i, j) in op.overrides)
            lset.update(range((s0 - offset) // b - 2,
                              (s1 - offset) // b + 3))
        ls = sorted(lset)

    sup_sub = 0.0
    sup_super = 0.0
    for l in ls:
        sup_sub = max(sup_sub, float(np.linalg.norm(block(l + 1, l), 2)))
        sup_super = max(sup_super, float(np.linalg.norm(block(l - 1, l), 2)))
    return sup_sub, sup_super


def fish_symbol() -> LaurentSymbol:
    """A rapidly decaying two-sided test symbol with a closed-form tail.

    Coefficients: ``a_0 = 3.1``; ``a_k = 2^{-k} (1 + 1.1 (-i)^k)`` for
    ``k > 0``; ``a_k = (i/2)^{-k}`` for ``k < 0``.
    """

    def coeff(k: int) -> complex:
        if k == 0:
            return 3.1 + 0j
        if k > 0:
            return (2.0 ** -k) * (1.0 + 1.1 * _NEG_I_POWERS[k % 4])
        mk = -k
        return (2.0 ** -mk) * _I_POWERS[mk % 4]

    csup = (2.1, math.sqrt(2.21), 0.1, math.sqrt(2.21))

    def tail(d: int) -> float:
        # negative side: |a_{-m}| = 2^{-m}, summing to 2^{-d} beyond d
        total = 2.0 ** -d
        # positive side: |a_k| = 2^{-k} c_{k mod 4}; each residue class
        # beyond d is geometric with ratio 1/16
        for r in range(4):
            k_r = d + 1 + ((r - (d + 1)) % 4)
            total += csup[r] * (2.0 ** -k_r) * (16.0 / 15.0)
        return total

    return LaurentSymbol(coeff, support=(-1075, 1075), tail_bound=tail)


def demo_periodic_operator() -> DiagonalBandOperator:
    """Period-two band operator with bandwidth 2 used in the worked examples.

    The first subdiagonal alternates 9, 2 (even/odd columns), the first
    superdiagonal alternates 2, 9, and the second superdiagonal holds 4 on
    even columns.
    """
    return DiagonalBandOperator(
        {-1: (2.0, 9.0), 1: (9.0, 2.0), -2: (4.0, 0.0)},
        bandwidth=2)


def grcar_block(size: int = 10) -> np.ndarray:
    """Dense Toeplitz block with 1 on the diagonal and first three
    superdiagonals and -1 on the first subdiagonal."""
    size = int(size)
    G = np.zeros((size, size), dtype=np.complex128)
    for i in range(size):
        for j in range(size):
            if 0 <= j - i <= 3:
                G[i, j] = 1.0
            elif i - j == 1:
                G[i, j] = -1.0
    return G

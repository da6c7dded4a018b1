"""Level-set tracing and grid classification of scalar fields.

The tracer walks the piecewise-linear zero set of ``F - threshold`` on an
equilateral triangular mesh: vertex signs split each triangle into "all
same" or "mixed", and a mixed triangle always has exactly two sign-change
edges (exact zeros are nudged to the positive side), so components are
followed edge to edge without ambiguity.  Components either close up or
end on the bounding box.

Field values are cached per vertex — each vertex is evaluated at most
once, which matters when ``F`` wraps a full bound evaluation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .sigma_min import SOLVER_BACKOFF

__all__ = [
    "Triangulation",
    "Polyline",
    "ContourSet",
    "GridField",
    "trace_contour",
    "find_seed",
    "grid_scan",
]

_ROW = math.sqrt(3.0) / 2.0
_ZERO_NUDGE = 1e-300

Vertex = tuple[int, int]
Triangle = tuple[int, int, int]  # (ix, iy, kind); kind 0 = up, 1 = down


@dataclass(frozen=True)
class Triangulation:
    """Equilateral triangular mesh over a rectangle.

    Vertex ``(ix, iy)`` sits at ``x0 + (ix + 0.5*(iy & 1)) * h``,
    ``y0 + iy * h * sqrt(3)/2``; odd rows are offset half a step.  Each
    lattice cell splits into an upward and a downward triangle.
    """

    bbox: tuple[float, float, float, float]
    h: float

    def __post_init__(self) -> None:
        x0, x1, y0, y1 = self.bbox
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"empty bounding box {self.bbox}")
        if not self.h > 0:
            raise ValueError(f"mesh size must be positive, got {self.h}")

    @property
    def nx(self) -> int:
        x0, x1, _, _ = self.bbox
        return max(1, math.ceil((x1 - x0) / self.h))

    @property
    def ny(self) -> int:
        _, _, y0, y1 = self.bbox
        return max(1, math.ceil((y1 - y0) / (_ROW * self.h)))

    def vertex_point(self, v: Vertex) -> complex:
        ix, iy = v
        x0, _, y0, _ = self.bbox
        return complex(x0 + (ix + 0.5 * (iy & 1)) * self.h,
                       y0 + iy * _ROW * self.h)

    def triangle_valid(self, t: Triangle) -> bool:
        ix, iy, kind = t
        return 0 <= ix < self.nx and 0 <= iy < self.ny and kind in (0, 1)

    def triangle_vertices(self, t: Triangle) -> tuple[Vertex, Vertex, Vertex]:
        ix, iy, kind = t
        parity = iy & 1
        if kind == 0:
            return ((ix, iy), (ix + 1, iy), (ix + parity, iy + 1))
        return ((ix, iy + 1), (ix + 1, iy + 1), (ix + 1 - parity, iy))

    def _triangles_touching(self, v: Vertex):
        ix, iy = v
        for iyt in (iy - 1, iy):
            for ixt in range(ix - 2, ix + 2):
                for kind in (0, 1):
                    t = (ixt, iyt, kind)
                    if self.triangle_valid(t):
                        yield t

    def neighbor(self, t: Triangle, edge: frozenset) -> Triangle | None:
        """The other valid triangle sharing ``edge``, or None at the rim."""
        va = next(iter(edge))
        for cand in self._triangles_touching(va):
            if cand != t and edge <= set(self.triangle_vertices(cand)):
                return cand
        return None


@dataclass(frozen=True)
class Polyline:
    """One traced component: crossing points in walk order."""

    points: np.ndarray
    closed: bool

    @property
    def length(self) -> float:
        if len(self.points) < 2:
            return 0.0
        return float(np.sum(np.abs(np.diff(self.points))))


@dataclass(frozen=True)
class ContourSet:
    """All components found from the given seeds, plus walk diagnostics."""

    curves: tuple[Polyline, ...]
    triangles_visited: int
    vertex_evals: int
    sign_data: dict
    diagnostic: str = ""


class _Field:
    """Vertex-cached signed field values (exact zeros nudged positive)."""

    def __init__(self, tl: Triangulation,
                 F: Callable[[complex], float], threshold: float) -> None:
        self.tl = tl
        self.F = F
        self.threshold = threshold
        self.cache: dict[Vertex, float] = {}
        self.evals = 0

    def value(self, v: Vertex) -> float:
        val = self.cache.get(v)
        if val is None:
            self.evals += 1
            val = float(self.F(self.tl.vertex_point(v))) - self.threshold
            if val == 0.0:
                val = _ZERO_NUDGE
            self.cache[v] = val
        return val

    def crossing_edges(self, t: Triangle) -> list[frozenset]:
        vs = self.tl.triangle_vertices(t)
        out = []
        for a, b in ((vs[0], vs[1]), (vs[1], vs[2]), (vs[2], vs[0])):
            if (self.value(a) > 0) != (self.value(b) > 0):
                out.append(frozenset((a, b)))
        return out

    def cross_point(self, edge: frozenset) -> complex:
        va, vb = tuple(edge)
        fa = self.value(va)
        fb = self.value(vb)
        t = fa / (fa - fb)
        pa = self.tl.vertex_point(va)
        pb = self.tl.vertex_point(vb)
        return (1.0 - t) * pa + t * pb


def _march(fld: _Field, tri0: Triangle, edge0: frozenset, visited: set,
           limit: int) -> tuple[list[complex], bool, bool]:
    """Follow crossings starting through ``edge0``.

    Returns ``(points, closed, truncated)``; ``closed`` means the walk
    returned to the starting triangle.
    """
    pts: list[complex] = []
    tri, edge = tri0, edge0
    while True:
        pts.append(fld.cross_point(edge))
        nxt = fld.tl.neighbor(tri, edge)
        if nxt is None:
            return pts, False, False
        if nxt == tri0:
            return pts, True, False
        visited.add(nxt)
        edges = fld.crossing_edges(nxt)
        others = [e for e in edges if e != edge]
        if len(others) != 1:
            # cannot happen with strict vertex signs; bail out defensively
            return pts, False, True
        tri, edge = nxt, others[0]
        if len(pts) > limit:
            return pts, False, True


def _locate_mixed_triangle(fld: _Field, seed: complex,
                           radius: int = 8) -> Triangle | None:
    tl = fld.tl
    x0, _, y0, _ = tl.bbox
    iy0 = round((seed.imag - y0) / (_ROW * tl.h))
    ix0 = round((seed.real - x0) / tl.h)
    best = None
    best_dist = math.inf
    for r in range(radius + 1):
        for iy in range(iy0 - r, iy0 + r + 1):
            for ix in range(ix0 - r, ix0 + r + 1):
                if max(abs(iy - iy0), abs(ix - ix0)) != r:
                    continue
                for kind in (0, 1):
                    t = (ix, iy, kind)
                    if not tl.triangle_valid(t):
                        continue
                    if len(fld.crossing_edges(t)) == 2:
                        vs = tl.triangle_vertices(t)
                        cen = sum(tl.vertex_point(v) for v in vs) / 3.0
                        dist = abs(cen - seed)
                        if dist < best_dist:
                            best = t
                            best_dist = dist
        if best is not None:
            return best
    return None


def trace_contour(F: Callable[[complex], float], threshold: float,
                  bbox: tuple[float, float, float, float], h: float,
                  seeds=None, *,
                  coarse_step: float | None = None) -> ContourSet:
    """Trace the level set ``F = threshold`` inside ``bbox``.

    ``seeds`` is an iterable of complex points near the level set (one per
    suspected component; duplicates are merged).  When omitted, one seed
    is searched automatically on a coarse grid; an absent level set yields
    an empty :class:`ContourSet` with an explanatory ``diagnostic``.
    """
    tl = Triangulation(tuple(float(v) for v in bbox), float(h))
    fld = _Field(tl, F, float(threshold))
    diagnostic = ""
    if seeds is None:
        if coarse_step is None:
            x0, x1, y0, y1 = tl.bbox
            coarse_step = max(x1 - x0, y1 - y0) / 12.0
        found = find_seed(F, threshold, tl.bbox, coarse_step)
        if found is None:
            return ContourSet((), 0, fld.evals, fld.cache,
                              "no sign change found on the coarse seed grid")
        seeds = [found]
    limit = 8 * tl.nx * tl.ny + 64
    visited: set[Triangle] = set()
    curves: list[Polyline] = []
    for seed in seeds:
        tri0 = _locate_mixed_triangle(fld, complex(seed))
        if tri0 is None:
            diagnostic = (diagnostic + "; " if diagnostic else "") + \
                f"no level-set triangle near seed {complex(seed):.4g}"
            continue
        if tri0 in visited:
            continue
        visited.add(tri0)
        e_back, e_fwd = fld.crossing_edges(tri0)
        fwd, closed, trunc_f = _march(fld, tri0, e_fwd, visited, limit)
        if closed:
            pts = [fld.cross_point(e_back)] + fwd
        else:
            back, _, trunc_b = _march(fld, tri0, e_back, visited, limit)
            pts = list(reversed(back)) + fwd
            if trunc_f or trunc_b:
                diagnostic = (diagnostic + "; " if diagnostic else "") + \
                    "walk truncated (degenerate signs or length limit)"
        curves.append(Polyline(np.asarray(pts, dtype=np.complex128), closed))
    return ContourSet(tuple(curves), len(visited), fld.evals, fld.cache,
                      diagnostic)


def find_seed(F: Callable[[complex], float], threshold: float,
              bbox: tuple[float, float, float, float],
              coarse_step: float) -> complex | None:
    """Locate one point near the level set by coarse scan plus bisection.

    Scans a coarse lattice for a sign change between neighboring nodes,
    then bisects that segment.  Returns None when the scan finds no sign
    change (the level set is reported absent at this resolution).
    """
    x0, x1, y0, y1 = (float(v) for v in bbox)
    step = float(coarse_step)
    if step <= 0:
        raise ValueError(f"coarse step must be positive, got {coarse_step}")
    xs = np.arange(x0, x1 + 0.5 * step, step)
    ys = np.arange(y0, y1 + 0.5 * step, step)
    vals = np.empty((len(ys), len(xs)))
    for r, y in enumerate(ys):
        for c, x in enumerate(xs):
            vals[r, c] = float(F(complex(x, y))) - threshold
    sgn = vals > 0

    def bisect(pa: complex, pb: complex, fa: float) -> complex:
        for _ in range(40):
            mid = 0.5 * (pa + pb)
            fm = float(F(mid)) - threshold
            if fm == 0.0:
                return mid
            if (fm > 0) == (fa > 0):
                pa, fa = mid, fm
            else:
                pb = mid
        return 0.5 * (pa + pb)

    for r in range(len(ys)):
        for c in range(len(xs)):
            if c + 1 < len(xs) and sgn[r, c] != sgn[r, c + 1]:
                return bisect(complex(xs[c], ys[r]),
                              complex(xs[c + 1], ys[r]), vals[r, c])
            if r + 1 < len(ys) and sgn[r, c] != sgn[r + 1, c]:
                return bisect(complex(xs[c], ys[r]),
                              complex(xs[c], ys[r + 1]), vals[r, c])
    return None


@dataclass(frozen=True)
class GridField:
    """Both bound fields sampled on a rectangular lattice.

    ``F_lower``/``F_upper`` have shape ``(ny, nx)`` (row ``r`` at
    ``ys[r]``).  ``classes[eps]`` holds 0 (certified inside), 1
    (undecided), or 2 (certified outside) per node.
    """

    xs: np.ndarray
    ys: np.ndarray
    F_lower: np.ndarray
    F_upper: np.ndarray
    classes: dict[float, np.ndarray]
    eta_d: float
    delta_N: float


def grid_scan(F_lower: Callable[[complex], float],
              F_upper: Callable[[complex], float],
              bbox: tuple[float, float, float, float],
              resolution: int | tuple[int, int],
              eps_list, *, eta_d: float = 0.0, delta_N: float = 0.0,
              solver_tol: float = 1e-8, workers: int = 1) -> GridField:
    """Sample both bound fields on a lattice and classify each node.

    ``resolution`` is the node count per axis (or an ``(nx, ny)`` pair).
    Nodes are independent; ``workers > 1`` fans them across threads with
    results assembled by index, so the output is thread-count independent.
    """
    if isinstance(resolution, int):
        nx = ny = resolution
    else:
        nx, ny = (int(v) for v in resolution)
    if nx < 2 or ny < 2:
        raise ValueError(f"resolution must be >= 2 per axis, got {nx}x{ny}")
    x0, x1, y0, y1 = (float(v) for v in bbox)
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    points = [complex(xs[c], ys[r]) for r in range(ny) for c in range(nx)]

    def node(lam: complex) -> tuple[float, float]:
        return float(F_lower(lam)), float(F_upper(lam))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(node, points))
    else:
        results = [node(p) for p in points]
    fl = np.array([v[0] for v in results]).reshape(ny, nx)
    fu = np.array([v[1] for v in results]).reshape(ny, nx)
    guard = 1.0 + SOLVER_BACKOFF * solver_tol
    classes: dict[float, np.ndarray] = {}
    for eps in eps_list:
        eps = float(eps)
        cls = np.ones((ny, nx), dtype=np.int8)
        cls[fl * guard < eps - eta_d] = 0
        cls[fu / guard >= eps + eta_d + delta_N] = 2
        classes[eps] = cls
    return GridField(xs, ys, fl, fu, classes, float(eta_d), float(delta_N))

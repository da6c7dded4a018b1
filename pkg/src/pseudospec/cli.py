"""Command-line surface: job configs, builtin operators, task drivers.

Jobs are JSON documents (``--config job.json``) with dotted-path flag
overrides (``--set bounds.N=100``; flags win).  Every output file embeds
the fully resolved job in its header for provenance.  Tasks:

* ``contour`` — trace the level sets of both bound fields for each ε;
* ``grid``    — rectangular field dump with per-ε classifications;
* ``bench``   — per-step timing records in recycled / restarted / fresh
  factorization modes;
* ``selftest`` — a small battery of independent-oracle cross-checks.

Exit codes: 0 success, 1 validation, 2 numerical failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .bounds import BoundConfig, BoundReport, delta_bound, evaluate_bounds
from .operators import (
    add_impurity,
    demo_periodic_operator,
    fish_symbol,
    grcar_block,
    laurent_operator,
    singular_integral_operator,
    truncate_to_band,
    window,
)
from .givens import GivensRotation, shift_through
from .qh_engine import StepRecord, advance, complete_qr, qh_factorize, run_sequence
from .sigma_min import (
    NearSingular,
    dense_svd_oracle,
    smallest_singular_value,
)
from .operators import window_column
from .tracer import grid_scan, trace_contour

__all__ = [
    "JobError",
    "JobSpec",
    "OperatorSpec",
    "ImpuritySpec",
    "parse_job",
    "serialize_job",
    "run",
    "main",
]

_BUILTIN_OPERATORS = ("fish", "example21", "singint")
_BUILTIN_IMPURITIES = ("grcar10",)
_TASKS = ("contour", "grid", "bench", "selftest")


class JobError(ValueError):
    """Configuration validation failure, carrying the offending field path."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


def _as_complex(value, path: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, complex):
        return value
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        try:
            return complex(value)
        except ValueError:
            pass
    raise JobError(path, f"cannot interpret {value!r} as a complex number")


def _complex_out(z: complex):
    if z.imag == 0:
        return z.real
    return [z.real, z.imag]


@dataclass(frozen=True)
class ImpuritySpec:
    """A finite additive perturbation: builtin block or explicit matrix."""

    builtin: str | None = None
    matrix: tuple[tuple[complex, ...], ...] | None = None
    row_offset: int = 0
    col_offset: int = 0
    scale: float = 1.0

    def block(self) -> np.ndarray:
        if self.builtin is not None:
            if self.builtin == "grcar10":
                E = grcar_block()
            else:  # pragma: no cover - guarded by parse_job
                raise JobError("operator.impurity.builtin",
                               f"unknown builtin {self.builtin!r}")
        else:
            E = np.array(self.matrix, dtype=np.complex128)
        return self.scale * E


@dataclass(frozen=True)
class OperatorSpec:
    """Which operator to build: a builtin, raw coefficients, or a split pair."""

    builtin: str | None = None
    coefficients: tuple[tuple[int, complex], ...] | None = None
    singint_pos: tuple[tuple[int, complex], ...] | None = None
    singint_neg: tuple[tuple[int, complex], ...] | None = None
    impurity: ImpuritySpec | None = None


@dataclass(frozen=True)
class JobSpec:
    """A fully validated job: operator, window geometry, task parameters."""

    task: str
    operator: OperatorSpec
    d: int
    b: int
    N: int
    offsets: tuple[int, ...] | None
    eps_list: tuple[float, ...]
    bbox: tuple[float, float, float, float]
    h: float
    resolution: tuple[int, int]
    restart: int | str | None
    seed: int
    workers: int
    solver_tol: float
    lam: complex
    bench_steps: int


def _parse_coeffs(raw, path: str) -> tuple[tuple[int, complex], ...]:
    if not isinstance(raw, Mapping) or not raw:
        raise JobError(path, "expected a nonempty {offset: value} mapping")
    out = []
    for key, val in raw.items():
        try:
            k = int(key)
        except (TypeError, ValueError):
            raise JobError(f"{path}.{key}", "offset keys must be integers")
        out.append((k, _as_complex(val, f"{path}.{key}")))
    return tuple(sorted(out))


def _parse_impurity(raw, path: str) -> ImpuritySpec:
    if not isinstance(raw, Mapping):
        raise JobError(path, "expected a mapping")
    builtin = raw.get("builtin")
    matrix = raw.get("matrix")
    if (builtin is None) == (matrix is None):
        raise JobError(path, "give exactly one of 'builtin' or 'matrix'")
    if builtin is not None and builtin not in _BUILTIN_IMPURITIES:
        raise JobError(f"{path}.builtin",
                       f"unknown impurity {builtin!r}; "
                       f"available: {', '.join(_BUILTIN_IMPURITIES)}")
    mat = None
    if matrix is not None:
        try:
            rows = [tuple(_as_complex(v, f"{path}.matrix") for v in row)
                    for row in matrix]
        except TypeError:
            raise JobError(f"{path}.matrix", "expected a 2-D array")
        if not rows or len({len(r) for r in rows}) != 1:
            raise JobError(f"{path}.matrix", "expected a rectangular 2-D array")
        mat = tuple(rows)
    return ImpuritySpec(
        builtin=builtin,
        matrix=mat,
        row_offset=int(raw.get("row_offset", 0)),
        col_offset=int(raw.get("col_offset", 0)),
        scale=float(raw.get("scale", 1.0)),
    )


def _parse_operator(raw, path: str) -> OperatorSpec:
    if not isinstance(raw, Mapping):
        raise JobError(path, "expected a mapping")
    builtin = raw.get("builtin")
    coeffs = raw.get("coefficients")
    spos = raw.get("singint_pos")
    sneg = raw.get("singint_neg")
    if builtin == "singint":
        if spos is None or sneg is None:
            raise JobError(
                path, "builtin 'singint' requires both 'singint_pos' and "
                      "'singint_neg' coefficient mappings")
    elif builtin is not None:
        if builtin not in _BUILTIN_OPERATORS:
            raise JobError(f"{path}.builtin",
                           f"unknown builtin {builtin!r}; available: "
                           f"{', '.join(_BUILTIN_OPERATORS)}")
        if coeffs is not None:
            raise JobError(path, "give either 'builtin' or 'coefficients', "
                                 "not both")
    elif coeffs is None:
        raise JobError(path, "an operator needs 'builtin' or 'coefficients'")
    imp = raw.get("impurity")
    return OperatorSpec(
        builtin=builtin,
        coefficients=_parse_coeffs(coeffs, f"{path}.coefficients")
        if coeffs is not None else None,
        singint_pos=_parse_coeffs(spos, f"{path}.singint_pos")
        if spos is not None else None,
        singint_neg=_parse_coeffs(sneg, f"{path}.singint_neg")
        if sneg is not None else None,
        impurity=_parse_impurity(imp, f"{path}.impurity")
        if imp is not None else None,
    )


def build_operator(job: JobSpec):
    """Instantiate the configured operator.  Returns ``(op, eta_d)``."""
    spec = job.operator
    if spec.builtin == "fish":
        op, eta = truncate_to_band(laurent_operator(fish_symbol()), job.d)
    elif spec.builtin == "example21":
        op = demo_periodic_operator()
        eta = 0.0
        if job.d != op.bandwidth:
            raise JobError("bounds.d",
                           f"builtin 'example21' has bandwidth "
                           f"{op.bandwidth}; set bounds.d accordingly")
    elif spec.builtin == "singint":
        op = singular_integral_operator(dict(spec.singint_pos),
                                        dict(spec.singint_neg), job.d)
        eta = op.truncation_tail
    else:
        op, eta = truncate_to_band(
            laurent_operator(dict(spec.coefficients)), job.d)
    if spec.impurity is not None:
        try:
            op = add_impurity(op, spec.impurity.block(),
                              spec.impurity.row_offset,
                              spec.impurity.col_offset)
        except (TypeError, ValueError) as exc:
            raise JobError("operator.impurity", str(exc))
    return op, eta


def parse_job(source, overrides=()) -> JobSpec:
    """Build a validated :class:`JobSpec` from a config file or mapping.

    ``source`` is a JSON file path or an already-parsed mapping;
    ``overrides`` are ``key=value`` strings with dotted paths
    (``bounds.N=100``); override values are parsed as JSON when possible
    and win over the file.
    """
    if isinstance(source, (str, Path)):
        try:
            with open(source, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise JobError("config", f"cannot read {source}: {exc}")
        except json.JSONDecodeError as exc:
            raise JobError("config", f"invalid JSON in {source}: {exc}")
    elif isinstance(source, Mapping):
        raw = json.loads(json.dumps(source))  # deep copy, JSON-normalized
    else:
        raise JobError("config", f"unsupported config source {type(source)}")
    if not isinstance(raw, Mapping):
        raise JobError("config", "top level must be a mapping")
    raw = dict(raw)

    for item in overrides:
        if "=" not in item:
            raise JobError("--set", f"expected key=value, got {item!r}")
        key, _, val = item.partition("=")
        try:
            parsed = json.loads(val)
        except json.JSONDecodeError:
            parsed = val
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            nxt = node.get(part)
            if not isinstance(nxt, dict):
                nxt = {}
                node[part] = nxt
            node = nxt
        node[parts[-1]] = parsed

    task = raw.get("task")
    if task not in _TASKS:
        raise JobError("task", f"must be one of {', '.join(_TASKS)}, "
                               f"got {task!r}")
    op_raw = raw.get("operator")
    if op_raw is None:
        raise JobError("operator", "missing")
    operator = _parse_operator(op_raw, "operator")

    bounds = raw.get("bounds", {})
    if not isinstance(bounds, Mapping):
        raise JobError("bounds", "expected a mapping")
    if "d" not in bounds:
        raise JobError("bounds.d", "missing bandwidth")
    try:
        d = int(bounds["d"])
        b = int(bounds.get("b", max(d, 1)))
        N = int(bounds.get("N", 25))
    except (TypeError, ValueError) as exc:
        raise JobError("bounds", f"non-integer geometry field: {exc}")
    offsets_raw = bounds.get("offsets")
    offsets = None
    if offsets_raw is not None:
        try:
            offsets = tuple(int(c) for c in offsets_raw)
        except (TypeError, ValueError):
            raise JobError("bounds.offsets", "expected a list of integers")
    eps_raw = bounds.get("eps_list", [])
    try:
        eps_list = tuple(float(e) for e in eps_raw)
    except (TypeError, ValueError):
        raise JobError("bounds.eps_list", "expected a list of numbers")

    bbox_raw = raw.get("bbox", [-2.0, 2.0, -2.0, 2.0])
    try:
        bbox = tuple(float(v) for v in bbox_raw)
    except (TypeError, ValueError):
        raise JobError("bbox", "expected [x0, x1, y0, y1]")
    if len(bbox) != 4 or not (bbox[1] > bbox[0] and bbox[3] > bbox[2]):
        raise JobError("bbox", f"degenerate box {bbox_raw!r}")

    h = float(raw.get("h", 0.05))
    if not h > 0:
        raise JobError("h", f"mesh size must be positive, got {h}")
    res_raw = raw.get("resolution", 40)
    if isinstance(res_raw, (int, float)):
        resolution = (int(res_raw), int(res_raw))
    else:
        try:
            resolution = tuple(int(v) for v in res_raw)
        except (TypeError, ValueError):
            raise JobError("resolution", "expected an int or [nx, ny]")
        if len(resolution) != 2:
            raise JobError("resolution", "expected an int or [nx, ny]")
    if min(resolution) < 2:
        raise JobError("resolution", f"must be >= 2 per axis, got {resolution}")

    restart = raw.get("restart", "auto")
    if restart in ("none", "never", None):
        restart = None
    elif restart != "auto":
        try:
            restart = int(restart)
        except (TypeError, ValueError):
            raise JobError("restart",
                           f"expected 'auto', 'none', or an integer, "
                           f"got {restart!r}")
        if restart < 1:
            raise JobError("restart", f"period must be >= 1, got {restart}")

    seed = int(raw.get("seed", 0))
    workers = int(raw.get("workers", 0))
    if workers < 0:
        raise JobError("workers", f"must be >= 0, got {workers}")
    solver_tol = float(raw.get("solver_tol", 1e-8))
    if not 0 < solver_tol < 1:
        raise JobError("solver_tol", f"must be in (0, 1), got {solver_tol}")
    lam = _as_complex(raw.get("lam", 0.0), "lam")
    bench_steps = int(raw.get("bench_steps", 100))
    if bench_steps < 1:
        raise JobError("bench_steps", f"must be >= 1, got {bench_steps}")

    job = JobSpec(
        task=task, operator=operator, d=d, b=b, N=N, offsets=offsets,
        eps_list=eps_list, bbox=bbox, h=h, resolution=resolution,
        restart=restart, seed=seed, workers=workers, solver_tol=solver_tol,
        lam=lam, bench_steps=bench_steps,
    )

    # geometry checks (shared with BoundConfig) with config field paths
    try:
        BoundConfig(d=d, b=b, N=N, offsets=offsets, eps_list=eps_list)
    except ValueError as exc:
        raise JobError("bounds", str(exc))
    # operator resolution validates builtin consistency and yields eta
    _, eta = build_operator(job)
    if task in ("contour", "grid"):
        if not eps_list:
            raise JobError("bounds.eps_list",
                           f"task {task!r} needs at least one eps value")
        for i, e in enumerate(eps_list):
            if e <= eta:
                raise JobError(
                    f"bounds.eps_list[{i}]",
                    f"eps = {e} must exceed the band-truncation budget "
                    f"eta_d = {eta:.6g}; lower sets are empty otherwise")
    return job


def serialize_job(job: JobSpec) -> dict:
    """JSON-ready mapping; ``parse_job`` of it reproduces ``job`` exactly."""
    op: dict = {}
    if job.operator.builtin is not None:
        op["builtin"] = job.operator.builtin
    if job.operator.coefficients is not None:
        op["coefficients"] = {str(k): _complex_out(v)
                              for k, v in job.operator.coefficients}
    if job.operator.singint_pos is not None:
        op["singint_pos"] = {str(k): _complex_out(v)
                             for k, v in job.operator.singint_pos}
    if job.operator.singint_neg is not None:
        op["singint_neg"] = {str(k): _complex_out(v)
                             for k, v in job.operator.singint_neg}
    if job.operator.impurity is not None:
        imp = job.operator.impurity
        impd: dict = {"row_offset": imp.row_offset,
                      "col_offset": imp.col_offset, "scale": imp.scale}
        if imp.builtin is not None:
            impd["builtin"] = imp.builtin
        if imp.matrix is not None:
            impd["matrix"] = [[_complex_out(v) for v in row]
                              for row in imp.matrix]
        op["impurity"] = impd
    return {
        "task": job.task,
        "operator": op,
        "bounds": {
            "d": job.d, "b": job.b, "N": job.N,
            "offsets": list(job.offsets) if job.offsets is not None else None,
            "eps_list": list(job.eps_list),
        },
        "bbox": list(job.bbox),
        "h": job.h,
        "resolution": list(job.resolution),
        "restart": "none" if job.restart is None else job.restart,
        "seed": job.seed,
        "workers": job.workers,
        "solver_tol": job.solver_tol,
        "lam": _complex_out(job.lam),
        "bench_steps": job.bench_steps,
    }


def _job_header(job: JobSpec) -> str:
    return "# job " + json.dumps(serialize_job(job), sort_keys=True)


def _make_report_fields(op, job: JobSpec, eta: float, delta: float):
    cfg = BoundConfig(d=job.d, b=job.b, N=job.N, offsets=job.offsets,
                      eps_list=job.eps_list, eta_d=eta, delta_N=delta)
    cache: dict[complex, BoundReport] = {}
    lock = threading.Lock()

    def report(lam: complex) -> BoundReport:
        with lock:
            hit = cache.get(lam)
        if hit is not None:
            return hit
        rep = evaluate_bounds(op, lam, cfg, tol=job.solver_tol,
                              seed=job.seed, restart_period=job.restart
                              if job.restart != "auto" else None)
        with lock:
            cache[lam] = rep
        return rep

    return (lambda lam: report(lam).F_lower), (lambda lam: report(lam).F_upper)


def _compute_delta(op, job: JobSpec) -> float:
    offsets = job.offsets if job.offsets is not None else range(job.b)
    return max(delta_bound(op, job.b, c, job.N) for c in offsets)


def _fmt(x: float) -> str:
    return repr(float(x))


def _run_grid(job: JobSpec, out_dir: Path) -> None:
    op, eta = build_operator(job)
    delta = _compute_delta(op, job)
    F_l, F_u = _make_report_fields(op, job, eta, delta)
    workers = job.workers or os.cpu_count() or 1
    gf = grid_scan(F_l, F_u, job.bbox, job.resolution, job.eps_list,
                   eta_d=eta, delta_N=delta, solver_tol=job.solver_tol,
                   workers=workers)
    path = out_dir / "grid.txt"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_job_header(job) + "\n")
        fh.write(f"# eta_d {_fmt(eta)} delta_N {_fmt(delta)}\n")
        fh.write(f"# columns: re im F_l F_u " +
                 " ".join(f"class_eps{_fmt(e)}" for e in job.eps_list) + "\n")
        fh.write(f"{len(gf.xs)} {len(gf.ys)}\n")
        fh.write(" ".join(_fmt(v) for v in job.bbox) + "\n")
        for r in range(len(gf.ys)):
            for c in range(len(gf.xs)):
                cells = [_fmt(gf.xs[c]), _fmt(gf.ys[r]),
                         _fmt(gf.F_lower[r, c]), _fmt(gf.F_upper[r, c])]
                cells += [str(int(gf.classes[e][r, c])) for e in job.eps_list]
                fh.write(" ".join(cells) + "\n")


def _run_contour(job: JobSpec, out_dir: Path) -> None:
    op, eta = build_operator(job)
    delta = _compute_delta(op, job)
    F_l, F_u = _make_report_fields(op, job, eta, delta)
    for i, eps in enumerate(job.eps_list):
        for name, F, thr in (("lower", F_l, eps - eta),
                             ("upper", F_u, eps + eta + delta)):
            cs = trace_contour(F, thr, job.bbox, job.h)
            path = out_dir / f"contour_eps{i}_{name}.txt"
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(_job_header(job) + "\n")
                fh.write(f"# eps {_fmt(eps)} threshold {_fmt(thr)} "
                         f"h {_fmt(job.h)} "
                         f"triangles_visited {cs.triangles_visited} "
                         f"vertex_evals {cs.vertex_evals}\n")
                if cs.diagnostic:
                    fh.write(f"# diagnostic: {cs.diagnostic}\n")
                for ci, curve in enumerate(cs.curves):
                    fh.write(f"# curve {ci} closed={curve.closed} "
                             f"points={len(curve.points)}\n")
                    for p in curve.points:
                        fh.write(f"{_fmt(p.real)} {_fmt(p.imag)}\n")


def _run_bench(job: JobSpec, out_dir: Path) -> None:
    op, eta = build_operator(job)
    n = job.N * job.b
    ks = list(range(job.bench_steps))
    for mode, policy in (("recycled", None), ("restarted", "auto"),
                         ("fresh", 1)):
        recorder: list[StepRecord] = []
        for _k, factor in run_sequence(op, job.lam, ks, n, policy,
                                       recorder=recorder):
            smallest_singular_value(factor, tol=job.solver_tol, seed=job.seed)
        path = out_dir / f"bench_{mode}.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"job": serialize_job(job), "mode": mode},
                                sort_keys=True) + "\n")
            for rec in recorder:
                fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")


def _selftest_checks():
    rng = np.random.default_rng(20260823)

    def random_rotation(row: int) -> GivensRotation:
        v = rng.standard_normal(4)
        c = complex(v[0], v[1])
        s = complex(v[2], v[3])
        nrm = math.sqrt(abs(c) ** 2 + abs(s) ** 2)
        return GivensRotation(row, c / nrm, s / nrm)

    def check_window_entries():
        op = demo_periodic_operator()
        w = window(op, 0.0, 0, 6)
        dense = w.dense()
        for r in range(w.rows):
            for c in range(w.cols):
                want = op.entry(r - op.bandwidth, c)
                assert dense[r, c] == want, (r, c, dense[r, c], want)

    def check_shift_through():
        for _ in range(25):
            gA, gB, gC = (random_rotation(2), random_rotation(1),
                          random_rotation(2))
            out = shift_through(gA, gB, gC)
            P_in = gA.dense(3) @ gB.dense(3) @ gC.dense(3)
            P_out = out[0].dense(3) @ out[1].dense(3) @ out[2].dense(3)
            assert np.max(np.abs(P_in - P_out)) < 1e-13

    def check_recycled_sigma():
        op = demo_periodic_operator()
        n = 12
        state = qh_factorize(window(op, 0.3 + 0.1j, 0, n))
        for k in range(1, 6):
            advance(state, window_column(op, 0.3 + 0.1j, k, n))
            fresh = qh_factorize(window(op, 0.3 + 0.1j, k, n))
            s_rec = smallest_singular_value(complete_qr(state), tol=1e-12)
            s_new = smallest_singular_value(complete_qr(fresh), tol=1e-12)
            assert abs(s_rec.sigma - s_new.sigma) <= 1e-10 * s_new.sigma

    def check_sigma_vs_jacobi():
        n = 24
        band = (rng.standard_normal((n, 5)) + 1j * rng.standard_normal((n, 5)))
        band[:, 0] += 4.0
        for v in range(1, 5):
            band[n - v:, v] = 0.0
        from .qh_engine import TriangularFactor
        factor = TriangularFactor(np.ascontiguousarray(band))
        got = smallest_singular_value(factor, tol=1e-10)
        want = dense_svd_oracle(factor.dense())[-1]
        assert abs(got.sigma - want) <= 1e-8 * want

    def check_tracer_circle():
        cs = trace_contour(lambda z: abs(z) - 1.0, 0.0,
                           (-1.6, 1.6, -1.6, 1.6), 0.1)
        assert len(cs.curves) == 1 and cs.curves[0].closed
        assert abs(cs.curves[0].length - 2 * math.pi) < 0.05 * 2 * math.pi

    return [
        ("window entries vs direct indexing", check_window_entries),
        ("rotation rewrite preserves products", check_shift_through),
        ("recycled vs fresh singular values", check_recycled_sigma),
        ("iterative sigma vs Jacobi oracle", check_sigma_vs_jacobi),
        ("tracer reproduces the unit circle", check_tracer_circle),
    ]


def _run_selftest(_job: JobSpec | None, out_dir: Path | None) -> int:
    failures = 0
    for name, check in _selftest_checks():
        try:
            check()
        except Exception as exc:  # noqa: BLE001 - report and continue
            failures += 1
            print(f"selftest: {name} ... FAIL ({exc!r})")
        else:
            print(f"selftest: {name} ... ok")
    return 0 if failures == 0 else 2


def run(job: JobSpec, out_dir) -> int:
    """Execute a job, writing outputs under ``out_dir``.  Returns exit code."""
    try:
        if job.task == "selftest":
            return _run_selftest(job, None)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if job.task == "grid":
            _run_grid(job, out)
        elif job.task == "contour":
            _run_contour(job, out)
        elif job.task == "bench":
            _run_bench(job, out)
        else:  # pragma: no cover - parse_job forbids
            raise JobError("task", f"unhandled task {job.task!r}")
        return 0
    except JobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NearSingular, FloatingPointError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 3


_DEFAULT_SELFTEST = {
    "task": "selftest",
    "operator": {"builtin": "example21"},
    "bounds": {"d": 2, "b": 2, "N": 3, "eps_list": [2.0]},
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pseudospec",
        description="certified spectral-set bounds for band operators")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in _TASKS:
        sp = sub.add_parser(cmd)
        sp.add_argument("--config", default=None,
                        help="JSON job file (optional for selftest)")
        sp.add_argument("--set", action="append", default=[],
                        dest="overrides", metavar="KEY=VALUE",
                        help="dotted-path override, wins over the file")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--workers", type=int, default=None,
                        help="worker threads (0 = hardware parallelism)")
    args = parser.parse_args(argv)

    overrides = list(args.overrides) + [f"task={args.command}"]
    if args.workers is not None:
        overrides.append(f"workers={args.workers}")
    source = args.config
    if source is None:
        if args.command != "selftest":
            print("error: --config is required for this task",
                  file=sys.stderr)
            return 1
        source = dict(_DEFAULT_SELFTEST)
    try:
        job = parse_job(source, overrides)
    except JobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(job, args.out)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

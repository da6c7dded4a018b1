"""Two-sided bound fields: geometry config, resolution term, and the
per-offset window infima, cross-checked against brute-force dense scans."""

from __future__ import annotations

import math

import numpy as np
import pytest

import pseudospec as ps

from .helpers import dense_window


def identity_operator() -> ps.BandOperator:
    op, _ = ps.truncate_to_band(ps.laurent_operator({0: 1.0}), 0)
    return op


def brute_offset_min(op, lam, b, c, n, lo, hi):
    """Independent per-offset field value: dense SVD at every position of
    the residue class inside [lo, hi], operator and adjoint."""
    adj = ps.adjoint(op)
    best = math.inf
    for k in range(lo, hi + 1):
        if k % b != c % b:
            continue
        s_op = ps.dense_svd_oracle(dense_window(op, lam, k, n))[-1]
        s_ad = ps.dense_svd_oracle(
            dense_window(adj, np.conj(lam), k, n))[-1]
        best = min(best, float(s_op), float(s_ad))
    return best


class TestBoundConfig:
    def test_window_width(self):
        cfg = ps.BoundConfig(d=2, b=3, N=4)
        assert cfg.n == 12

    def test_default_offsets_cover_block(self):
        assert ps.BoundConfig(d=1, b=3, N=2).offset_tuple == (0, 1, 2)

    def test_explicit_offsets_normalized(self):
        cfg = ps.BoundConfig(d=1, b=4, N=2, offsets=[2, 0])
        assert cfg.offset_tuple == (2, 0)

    @pytest.mark.parametrize("kwargs", [
        dict(d=-1, b=2, N=1),
        dict(d=3, b=2, N=1),     # block narrower than the band
        dict(d=1, b=2, N=0),
        dict(d=1, b=2, N=1, offsets=(2,)),
        dict(d=1, b=2, N=1, offsets=()),
        dict(d=1, b=2, N=1, eps_list=(0.0,)),
        dict(d=1, b=2, N=1, eta_d=-0.5),
        dict(d=1, b=2, N=1, delta_N=math.inf),
    ])
    def test_rejects_bad_geometry(self, kwargs):
        with pytest.raises(ValueError):
            ps.BoundConfig(**kwargs)

    def test_eps_list_coerced_to_floats(self):
        cfg = ps.BoundConfig(d=0, b=1, N=3, eps_list=[1, 2])
        assert cfg.eps_list == (1.0, 2.0)


class TestDeltaBound:
    def test_diagonal_operator_has_zero_delta(self):
        assert ps.delta_bound(identity_operator(), 3, 0, 5) == 0.0

    def test_demo_operator_values(self):
        op = ps.demo_periodic_operator()
        want0 = 2.0 * (2.0 + math.sqrt(20.0)) * math.sin(math.pi / 8.0)
        want1 = 2.0 * (9.0 + math.sqrt(97.0)) * math.sin(math.pi / 8.0)
        assert ps.delta_bound(op, 2, 0, 3) == pytest.approx(want0)
        assert ps.delta_bound(op, 2, 1, 3) == pytest.approx(want1)
        assert want0 == pytest.approx(4.953558, abs=1e-6)
        assert want1 == pytest.approx(14.426291, abs=1e-6)

    def test_decreases_with_more_blocks(self):
        op = ps.demo_periodic_operator()
        vals = [ps.delta_bound(op, 2, 0, N) for N in (1, 2, 4, 8, 64)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < vals[0] / 8

    def test_scales_with_operator(self):
        op = ps.DiagonalBandOperator({1: (5.0,)}, 1)
        tripled = ps.DiagonalBandOperator({1: (15.0,)}, 1)
        assert ps.delta_bound(tripled, 2, 0, 4) == pytest.approx(
            3.0 * ps.delta_bound(op, 2, 0, 4))

    def test_rejects_empty_partition(self):
        with pytest.raises(ValueError):
            ps.delta_bound(identity_operator(), 2, 0, 0)


class TestNuWindowInf:
    def test_identity_at_zero(self):
        op = identity_operator()
        ks, covered = ps.enumerate_positions(op, 6)
        assert covered
        assert ps.nu_window_inf(op, 0.0, 6, ks) == pytest.approx(1.0)

    def test_identity_at_its_spectrum(self):
        op = identity_operator()
        ks, _ = ps.enumerate_positions(op, 6)
        assert ps.nu_window_inf(op, 1.0, 6, ks) <= 1e-12

    def test_accepts_enumerate_pair(self):
        op = identity_operator()
        pair = ps.enumerate_positions(op, 5)
        assert ps.nu_window_inf(op, 0.0, 5, pair) == pytest.approx(1.0)

    def test_rejects_empty_positions(self):
        with pytest.raises(ValueError):
            ps.nu_window_inf(identity_operator(), 0.0, 5, [])

    def test_dense_and_recycled_routes_agree(self):
        op = ps.demo_periodic_operator()
        ks, _ = ps.enumerate_positions(op, 8)
        for lam in (0.0, 2.0 + 1.0j, -3.5j):
            fast = ps.nu_window_inf(op, lam, 8, ks, tol=1e-10)
            slow = ps.nu_window_inf(op, lam, 8, ks, engine="dense")
            assert fast == pytest.approx(slow, rel=1e-7, abs=1e-10)

    def test_restart_period_does_not_change_values(self):
        op = ps.add_impurity(ps.demo_periodic_operator(),
                             np.array([[1.5]]), 0, 0)
        ks, _ = ps.enumerate_positions(op, 8)
        base = ps.nu_window_inf(op, 0.3j, 8, ks, tol=1e-10)
        for r in (1, 2, 5):
            again = ps.nu_window_inf(op, 0.3j, 8, ks, tol=1e-10,
                                     restart_period=r)
            assert again == pytest.approx(base, rel=1e-7)


class TestEvaluateBounds:
    def test_demo_operator_frozen_fields(self):
        cfg = ps.BoundConfig(d=2, b=2, N=3)
        rep = ps.evaluate_bounds(ps.demo_periodic_operator(), 0.0, cfg,
                                 tol=1e-10)
        assert rep.offsets == (0, 1)
        assert rep.per_offset[0] == pytest.approx(6.196458714503441, rel=1e-8)
        assert rep.per_offset[1] == pytest.approx(5.999394319143615, rel=1e-8)
        assert rep.F_lower == min(rep.per_offset)
        assert rep.F_upper == max(rep.per_offset)
        assert rep.F_lower < rep.F_upper  # the offsets genuinely differ

    def test_fields_bracket_every_offset(self):
        cfg = ps.BoundConfig(d=2, b=4, N=2)
        rep = ps.evaluate_bounds(ps.demo_periodic_operator(), 1.0 - 2.0j, cfg)
        for v in rep.per_offset:
            assert rep.F_lower <= v <= rep.F_upper

    def test_single_offset_collapses_the_fields(self):
        op, _ = ps.truncate_to_band(ps.laurent_operator({1: 1.0}), 1)
        cfg = ps.BoundConfig(d=1, b=1, N=6)
        rep = ps.evaluate_bounds(op, 0.5, cfg)
        assert rep.F_lower == rep.F_upper == rep.per_offset[0]

    def test_dense_engine_agrees(self):
        cfg = ps.BoundConfig(d=2, b=2, N=3)
        op = ps.demo_periodic_operator()
        a = ps.evaluate_bounds(op, 1.0j, cfg, tol=1e-10)
        b = ps.evaluate_bounds(op, 1.0j, cfg, engine="dense")
        assert a.per_offset == pytest.approx(b.per_offset, rel=1e-7)

    def test_against_brute_scan_periodic(self):
        op = ps.demo_periodic_operator()
        cfg = ps.BoundConfig(d=2, b=2, N=3)
        rep = ps.evaluate_bounds(op, 0.7 - 0.2j, cfg, engine="dense")
        # period 2 == block size, so one representative per class suffices;
        # scan a generous range anyway
        for i, c in enumerate(rep.offsets):
            want = brute_offset_min(op, 0.7 - 0.2j, 2, c, cfg.n, -6, 6)
            assert rep.per_offset[i] == pytest.approx(want, rel=1e-9)

    def test_against_brute_scan_with_impurity(self):
        base, _ = ps.truncate_to_band(
            ps.laurent_operator({0: 0.4, 1: 1.0, -1: 0.25}), 1)
        op = ps.add_impurity(base, np.array([[0.9 + 0.3j]]), 0, 0)
        cfg = ps.BoundConfig(d=1, b=2, N=2)
        rep = ps.evaluate_bounds(op, 0.1 + 0.1j, cfg, engine="dense")
        n = cfg.n
        for i, c in enumerate(rep.offsets):
            want = brute_offset_min(op, 0.1 + 0.1j, 2, c, n,
                                    -n - 10, 10)
            assert rep.per_offset[i] == pytest.approx(want, rel=1e-9)

    def test_wider_windows_never_raise_the_upper_field(self):
        sym = ps.fish_symbol()
        op, eta = ps.truncate_to_band(ps.laurent_operator(sym), 3)
        lam = 0.5 + 0.5j
        reps = [ps.evaluate_bounds(
                    op, lam, ps.BoundConfig(d=3, b=3, N=N), tol=1e-10)
                for N in (2, 4, 8)]
        for a, b in zip(reps, reps[1:]):
            assert b.F_upper <= a.F_upper + 1e-8
        assert eta < 0.5

    def test_budget_carried_into_report(self):
        cfg = ps.BoundConfig(d=2, b=2, N=3, eps_list=(2.0, 4.0),
                             eta_d=0.125, delta_N=0.5)
        rep = ps.evaluate_bounds(ps.demo_periodic_operator(), 0.0, cfg)
        assert rep.budget == ((2.0, 4.0), 0.125, 0.5)

    def test_to_record_keys(self):
        cfg = ps.BoundConfig(d=2, b=2, N=3, eta_d=0.25, delta_N=1.5)
        rep = ps.evaluate_bounds(ps.demo_periodic_operator(), 1 + 2j, cfg)
        rec = rep.to_record()
        assert rec == {"re": 1.0, "im": 2.0, "F_l": rep.F_lower,
                       "F_u": rep.F_upper, "eta_d": 0.25, "delta_N": 1.5}


class TestWorkerStreams:
    @staticmethod
    def _op():
        base, _ = ps.truncate_to_band(
            ps.laurent_operator({0: 0.4, 1: 1.0, -1: 0.25}), 1)
        return ps.add_impurity(base, np.array([[0.9 + 0.3j]]), 0, 0)

    def test_segmented_sweep_matches_serial_within_tol(self):
        op = self._op()
        cfg = ps.BoundConfig(d=1, b=1, N=64)  # run long enough to split
        serial = ps.evaluate_bounds(op, 0.2 + 0.1j, cfg, tol=1e-10)
        split = ps.evaluate_bounds(op, 0.2 + 0.1j, cfg, tol=1e-10,
                                   workers=2)
        assert split.F_lower == pytest.approx(serial.F_lower, rel=1e-7)
        assert split.F_upper == pytest.approx(serial.F_upper, rel=1e-7)

    def test_segmented_sweep_is_reproducible(self):
        op = self._op()
        cfg = ps.BoundConfig(d=1, b=1, N=64)
        first = ps.evaluate_bounds(op, -0.3j, cfg, workers=3)
        again = ps.evaluate_bounds(op, -0.3j, cfg, workers=3)
        assert again.per_offset == first.per_offset

    def test_negative_workers_rejected(self):
        cfg = ps.BoundConfig(d=1, b=1, N=4)
        with pytest.raises(ValueError, match="workers"):
            ps.evaluate_bounds(self._op(), 0.0, cfg, workers=-1)


class TestMembership:
    def make_report(self, F_lower, F_upper, eta_d=0.0, delta_N=0.0):
        return ps.BoundReport(lam=0j, F_lower=F_lower, F_upper=F_upper,
                              per_offset=(F_lower, F_upper), offsets=(0, 1),
                              eta_d=eta_d, delta_N=delta_N)

    def test_certified_inside_threshold(self):
        rep = self.make_report(1.0, 2.0, eta_d=0.1)
        assert rep.certified_inside(1.2)
        assert not rep.certified_inside(1.05)
        assert not rep.certified_inside(1.1)  # strict inequality at the edge

    def test_upper_set_and_exclusion_partition(self):
        rep = self.make_report(1.0, 2.0, eta_d=0.1, delta_N=0.3)
        assert rep.in_upper_set(1.7)
        assert not rep.in_upper_set(1.5)
        for eps in (0.5, 1.5, 1.7, 3.0):
            assert rep.certifies_exclusion(eps) != rep.in_upper_set(eps)

    def test_solver_backoff_widens_the_margin(self):
        rep = self.make_report(1.0, 2.0)
        # nominally 1.0 < 1.001 passes, but a coarse solver may not be
        # trusted to that margin
        assert rep.certified_inside(1.001, solver_tol=1e-8)
        assert not rep.certified_inside(1.001, solver_tol=1e-2)
        assert rep.certifies_exclusion(1.999, solver_tol=1e-8)
        assert not rep.certifies_exclusion(1.999, solver_tol=1e-2)

    def test_memberships_monotone_in_eps(self):
        cfg = ps.BoundConfig(d=2, b=2, N=3)
        rep = ps.evaluate_bounds(ps.demo_periodic_operator(), 0.0, cfg)
        inside = [rep.certified_inside(e) for e in (1.0, 4.0, 7.0, 20.0)]
        upper = [rep.in_upper_set(e) for e in (1.0, 4.0, 7.0, 20.0)]
        assert inside == sorted(inside)  # False before True
        assert upper == sorted(upper)
        assert inside[-1] and upper[-1]

"""Rotation primitives and the sequence-rewriting algebra.

The universal oracle throughout: materialize rotations as dense matrices
(via the independent helpers, not the library's own ``dense``) and
compare products.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import pseudospec as ps

from .helpers import (
    pattern_dense,
    random_descending,
    random_rotation,
    rot_dense,
    seq_dense,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@st.composite
def complex_pairs(draw):
    x = complex(draw(finite), draw(finite))
    y = complex(draw(finite), draw(finite))
    return x, y


@st.composite
def unit_rotations(draw, row=st.integers(1, 6)):
    x, y = draw(complex_pairs())
    nrm = np.hypot(abs(x), abs(y))
    if nrm < 1e-6:
        x, y = 1.0, 0.0
        nrm = 1.0
    return ps.GivensRotation(draw(row), x / nrm, y / nrm)


class TestComputeRotation:
    def test_already_zero(self):
        c, s = ps.compute_rotation(1.0, 0.0)
        assert (c, s) == (1.0 + 0.0j, 0.0 + 0.0j)

    def test_y_zero_is_exact_identity_even_for_complex_x(self):
        c, s = ps.compute_rotation(-2.5 + 1.5j, 0.0)
        assert (c, s) == (1.0 + 0.0j, 0.0 + 0.0j)

    def test_pure_swap(self):
        c, s = ps.compute_rotation(0.0, 1.0)
        assert (c, s) == (0.0 + 0.0j, 1.0 + 0.0j)
        out = np.array([[c, s], [-np.conj(s), np.conj(c)]]) @ [0.0, 1.0]
        assert np.allclose(out, [1.0, 0.0])

    def test_three_four_five(self):
        c, s = ps.compute_rotation(3.0, 4.0)
        assert abs(c) == pytest.approx(0.6)
        assert abs(s) == pytest.approx(0.8)
        out = np.array([[c, s], [-np.conj(s), np.conj(c)]]) @ [3.0, 4.0]
        assert out[0] == pytest.approx(5.0)
        assert out[1] == pytest.approx(0.0, abs=1e-14)

    def test_both_zero_gives_identity(self):
        assert ps.compute_rotation(0.0, 0.0) == (1.0 + 0.0j, 0.0 + 0.0j)

    @given(complex_pairs())
    def test_unit_and_zeroing(self, pair):
        x, y = pair
        c, s = ps.compute_rotation(x, y)
        assert abs(abs(c) ** 2 + abs(s) ** 2 - 1) < 1e-14
        r = c * x + s * y
        low = -np.conj(s) * x + np.conj(c) * y
        assert abs(low) <= 1e-12 * max(1.0, np.hypot(abs(x), abs(y)))
        assert abs(abs(r) - np.hypot(abs(x), abs(y))) < 1e-9


class TestGivensRotation:
    def test_row_must_be_positive(self):
        with pytest.raises(ValueError):
            ps.GivensRotation(0, 1.0, 0.0)

    def test_unit_circle_enforced(self):
        with pytest.raises(ValueError):
            ps.GivensRotation(1, 0.9, 0.9)

    def test_small_drift_renormalized(self):
        g = ps.GivensRotation(1, 0.6 * (1 + 3e-12), 0.8 * (1 + 3e-12))
        assert abs(abs(g.c) ** 2 + abs(g.s) ** 2 - 1) < 1e-15

    def test_identity_flag(self):
        assert ps.GivensRotation(3, 1.0, 0.0).is_identity
        assert not ps.GivensRotation(3, 0.0, 1.0).is_identity

    @given(unit_rotations())
    def test_inverse_is_conjugate_transpose(self, g):
        gi = g.inverse()
        prod = rot_dense(g, g.row + 1) @ rot_dense(gi, g.row + 1)
        assert np.max(np.abs(prod - np.eye(g.row + 1))) < 1e-14

    @given(unit_rotations())
    def test_dense_matches_manual_embedding(self, g):
        size = g.row + 3
        assert np.array_equal(g.dense(size), rot_dense(g, size))


class TestApplyRotationLeft:
    def test_identity_rotation_no_op(self, rng):
        M = rng.standard_normal((5, 3)) + 0j
        before = M.copy()
        ps.apply_rotation_left(M, ps.GivensRotation(2, 1.0, 0.0))
        assert np.array_equal(M, before)

    def test_only_two_rows_change(self, rng):
        M = rng.standard_normal((6, 4)) + 0j
        before = M.copy()
        ps.apply_rotation_left(M, random_rotation(rng, 3))
        changed = [i for i in range(6) if not np.array_equal(M[i], before[i])]
        assert changed == [2, 3]

    def test_zeroing_column(self):
        M = np.array([[3.0 + 0j], [4.0 + 0j]])
        c, s = ps.compute_rotation(3.0, 4.0)
        ps.apply_rotation_left(M, ps.GivensRotation(1, c, s))
        assert M[0, 0] == pytest.approx(5.0)
        assert abs(M[1, 0]) < 1e-14

    def test_gram_preserved(self, rng):
        M = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
        G0 = M.conj().T @ M
        ps.apply_rotation_left(M, random_rotation(rng, 4))
        assert np.max(np.abs(M.conj().T @ M - G0)) < 1e-12

    def test_row_out_of_range(self, rng):
        M = rng.standard_normal((4, 2)) + 0j
        with pytest.raises(ValueError):
            ps.apply_rotation_left(M, ps.GivensRotation(4, 1.0, 0.0))

    def test_banded_window_rejected(self):
        w = ps.window(ps.demo_periodic_operator(), 0.0, 0, 4)
        with pytest.raises(TypeError):
            ps.apply_rotation_left(w, ps.GivensRotation(1, 1.0, 0.0))


class TestRotationSequence:
    def test_descending_stores_rows_ascending_in_application_order(self, rng):
        seq = random_descending(rng, 1, 4)
        rows = [g.row for g in seq.rotations]
        assert rows == [1, 2, 3, 4]
        assert seq.first_row == 1

    def test_contiguity_enforced(self, rng):
        good = random_descending(rng, 1, 3)
        rots = (good.rotations[0], good.rotations[2])
        with pytest.raises(ValueError):
            ps.RotationSequence("descending", rots)

    def test_direction_name_checked(self, rng):
        with pytest.raises(ValueError):
            ps.RotationSequence("sideways", (random_rotation(rng, 1),))

    def test_dense_matches_manual(self, rng):
        seq = random_descending(rng, 2, 3)
        assert np.max(np.abs(seq.dense(6) - seq_dense(seq, 6))) < 1e-14


class TestShiftThrough:
    def test_identities_pass_through(self):
        e2 = ps.GivensRotation(2, 1.0, 0.0)
        e1 = ps.GivensRotation(1, 1.0, 0.0)
        out = ps.shift_through(e2, e1, e2)
        assert all(g.is_identity for g in out)

    def test_output_row_pattern(self, rng):
        out = ps.shift_through(random_rotation(rng, 2),
                               random_rotation(rng, 1),
                               random_rotation(rng, 2))
        assert [g.row for g in out] == [1, 2, 1]

    @settings(max_examples=200)
    @given(st.data())
    def test_product_preserved(self, data):
        gA = data.draw(unit_rotations(row=st.just(2)))
        gB = data.draw(unit_rotations(row=st.just(1)))
        gC = data.draw(unit_rotations(row=st.just(2)))
        out = ps.shift_through(gA, gB, gC)
        P_in = rot_dense(gA, 3) @ rot_dense(gB, 3) @ rot_dense(gC, 3)
        P_out = rot_dense(out[0], 3) @ rot_dense(out[1], 3) @ rot_dense(out[2], 3)
        assert np.max(np.abs(P_in - P_out)) < 1e-13

    def test_involution_returns_same_product(self, rng):
        gA, gB, gC = (random_rotation(rng, 2), random_rotation(rng, 1),
                      random_rotation(rng, 2))
        mid = ps.shift_through(gA, gB, gC)
        back = ps.shift_through(mid[1], mid[0], mid[1])
        # row layout of ``back`` is (2, 1, 2) only if we re-feed compatible
        # rows; check products instead, which is the actual invariant.
        P0 = rot_dense(gA, 3) @ rot_dense(gB, 3) @ rot_dense(gC, 3)
        P2 = (rot_dense(mid[0], 3) @ rot_dense(mid[1], 3)
              @ rot_dense(mid[2], 3))
        assert np.max(np.abs(P0 - P2)) < 1e-13
        P3 = (rot_dense(back[0], 3) @ rot_dense(back[1], 3)
              @ rot_dense(back[2], 3))
        P_mid_in = (rot_dense(mid[1], 3) @ rot_dense(mid[0], 3)
                    @ rot_dense(mid[1], 3))
        assert np.max(np.abs(P3 - P_mid_in)) < 1e-13


class TestShiftThroughHigher:
    def test_empty_left_returns_right(self, rng):
        right = random_descending(rng, 1, 3)
        new_left, new_right = ps.shift_through_higher(
            ps.RotationSequence("descending", ()), right)
        assert new_left == right
        assert len(new_right) == 0

    def test_equal_lengths_one(self, rng):
        left = random_descending(rng, 1, 1)
        right = random_descending(rng, 1, 1)
        new_left, new_right = ps.shift_through_higher(left, right)
        size = 3
        P_in = seq_dense(left, size) @ seq_dense(right, size)
        P_out = seq_dense(new_left, size) @ seq_dense(new_right, size)
        assert np.max(np.abs(P_in - P_out)) < 1e-12

    def test_paper_shape_l4_t1(self, rng):
        left = random_descending(rng, 1, 4)
        right = random_descending(rng, 1, 5)
        new_left, new_right = ps.shift_through_higher(left, right)
        assert len(new_left) == 5 and new_left.first_row == 1
        assert len(new_right) == 4 and new_right.first_row == 2
        size = 7
        P_in = seq_dense(left, size) @ seq_dense(right, size)
        P_out = seq_dense(new_left, size) @ seq_dense(new_right, size)
        assert np.max(np.abs(P_in - P_out)) < 1e-12

    def test_length_precondition(self, rng):
        with pytest.raises(ValueError):
            ps.shift_through_higher(random_descending(rng, 1, 3),
                                    random_descending(rng, 1, 2))

    def test_row_one_precondition(self, rng):
        with pytest.raises(ValueError):
            ps.shift_through_higher(random_descending(rng, 2, 2),
                                    random_descending(rng, 1, 3))

    @settings(max_examples=60, deadline=None)
    @given(l=st.integers(1, 6), t=st.integers(0, 3), seed=st.integers(0, 2**31))
    def test_product_preserved_randomized(self, l, t, seed):
        rng = np.random.default_rng(seed)
        left = random_descending(rng, 1, l)
        right = random_descending(rng, 1, l + t)
        new_left, new_right = ps.shift_through_higher(left, right)
        assert new_right.first_row in (2,) or len(new_right) == 0
        size = l + t + 2
        P_in = seq_dense(left, size) @ seq_dense(right, size)
        P_out = seq_dense(new_left, size) @ seq_dense(new_right, size)
        assert np.max(np.abs(P_in - P_out)) < 1e-12


class TestReorderFirstRow:
    def test_single_sequence_unchanged(self, rng):
        pat = ps.RotationPattern((random_descending(rng, 1, 3),))
        assert ps.reorder_first_row(pat) is pat

    def test_s2_l1_is_basic_lemma(self, rng):
        pat = ps.RotationPattern((random_descending(rng, 1, 2),
                                  random_descending(rng, 1, 1)))
        out = ps.reorder_first_row(pat)
        size = 4
        assert np.max(np.abs(pattern_dense(out, size)
                             - pattern_dense(pat, size))) < 1e-11

    def test_theorem_shape_s3_l4(self, rng):
        pat = ps.RotationPattern((random_descending(rng, 1, 6),
                                  random_descending(rng, 1, 5),
                                  random_descending(rng, 1, 4)))
        out = ps.reorder_first_row(pat)
        size = 11
        assert np.max(np.abs(pattern_dense(out, size)
                             - pattern_dense(pat, size))) < 1e-11
        assert len(out.sequences) == 3
        assert [s.first_row for s in out.sequences] == [2, 2, 1]
        assert len(out.sequences[-1]) == 6
        assert out.rotation_count == pat.rotation_count

    def test_exactly_one_sequence_touches_row_one(self, rng):
        pat = ps.RotationPattern(tuple(
            random_descending(rng, 1, 5 - j) for j in range(4)))
        out = ps.reorder_first_row(pat)
        touching = [s for s in out.sequences
                    if any(g.row == 1 for g in s.rotations)]
        assert len(touching) == 1

    def test_bad_staircase_rejected(self, rng):
        pat = ps.RotationPattern((random_descending(rng, 1, 3),
                                  random_descending(rng, 1, 3)))
        with pytest.raises(ValueError):
            ps.reorder_first_row(pat)

    def test_non_row_one_rejected(self, rng):
        pat = ps.RotationPattern((random_descending(rng, 1, 3),
                                  random_descending(rng, 2, 2)))
        with pytest.raises(ValueError):
            ps.reorder_first_row(pat)

    @settings(max_examples=40, deadline=None)
    @given(s=st.integers(2, 5), l=st.integers(1, 4), seed=st.integers(0, 2**31))
    def test_product_preserved_randomized(self, s, l, seed):
        rng = np.random.default_rng(seed)
        pat = ps.RotationPattern(tuple(
            random_descending(rng, 1, l + s - 1 - j) for j in range(s)))
        out = ps.reorder_first_row(pat)
        size = l + s + 1
        assert np.max(np.abs(pattern_dense(out, size)
                             - pattern_dense(pat, size))) < 1e-11


class TestPatternBasics:
    def test_dense_unitary(self, rng):
        pat = ps.RotationPattern(tuple(
            random_descending(rng, 1 + j, 4) for j in range(3)))
        P = pat.dense(8)
        assert np.max(np.abs(P.conj().T @ P - np.eye(8))) < 1e-12

    def test_disjoint_rows_commute(self, rng):
        g1 = random_rotation(rng, 1)
        g4 = random_rotation(rng, 4)
        size = 6
        ab = rot_dense(g1, size) @ rot_dense(g4, size)
        ba = rot_dense(g4, size) @ rot_dense(g1, size)
        assert np.max(np.abs(ab - ba)) < 1e-15

    def test_diagram_texture(self, rng):
        pat = ps.RotationPattern((random_descending(rng, 1, 2),
                                  random_descending(rng, 2, 1)))
        art = pat.diagram()
        lines = art.splitlines()
        # rows 1..2 with a row label, columns: last-applied sequence first
        assert lines[0].split() == ["1", "·", "⌒"]
        assert lines[1].split() == ["2", "⌒", "⌒"]

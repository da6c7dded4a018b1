"""Shared fixtures: seeded RNG and a one-time kernel warm-up."""

from __future__ import annotations

import numpy as np
import pytest

import pseudospec as ps


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260823)


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    """Touch every jitted kernel once so timed tests never pay compile cost."""
    op = ps.demo_periodic_operator()
    n = 8
    state = ps.qh_factorize(ps.window(op, 0.25 + 0.25j, 0, n))
    ps.advance(state, ps.window_column(op, 0.25 + 0.25j, 1, n))
    factor = ps.complete_qr(state)
    ps.smallest_singular_value(factor, tol=1e-8)
    ps.dense_svd_oracle(factor.dense())
    ps.shift_through(
        ps.GivensRotation(2, 0.6, 0.8),
        ps.GivensRotation(1, 0.6, 0.8),
        ps.GivensRotation(2, 0.8, -0.6),
    )
    yield

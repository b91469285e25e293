import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from definetti.metrics import (
    bernoulli_middle_exact,
    bound_eq26,
    bound_eq26_exact,
    bound_eq27,
    bound_eq27_exact,
    bound_eq210,
    bound_eq210_exact,
    bound_report,
    bound_two_one_minus_c,
    bound_two_one_minus_c_exact,
    c_constant,
    c_constant_exact,
    dimension_ratio_bounds,
    eq33_bound,
    hermitian_eig,
    trace_distance,
    trace_norm,
)
from definetti.states import haar_random_pure, random_mixed
from definetti.fock_core import SpaceShape


def test_eig_examples():
    vals, _ = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(vals, [1, 2, 3])
    vals, _ = hermitian_eig(np.eye(4))
    assert np.allclose(vals, 1)


def test_eig_round_trip(rng):
    x = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    M = x + x.conj().T
    vals, vecs = hermitian_eig(M)
    assert np.allclose(vecs @ np.diag(vals) @ vecs.conj().T, M, atol=1e-10)
    assert np.allclose(vecs.conj().T @ vecs, np.eye(6), atol=1e-12)
    assert np.max(np.linalg.norm(M @ vecs - vecs * vals, axis=0)) <= 1e-10 * np.linalg.norm(M, 2)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_trace_distance_examples():
    assert trace_distance(np.diag([1, 0]), np.diag([1, 0])) == 0
    assert abs(trace_distance(np.diag([1, 0]), np.diag([2 / 3, 1 / 3])) - 2 / 3) <= 1e-12
    assert np.isclose(trace_norm(np.diag([1, -2])), 3)
    with pytest.raises(ValueError):
        trace_distance(np.eye(2), np.eye(3))


def test_trace_distance_is_a_metric():
    s = SpaceShape(2, 3)
    states = [haar_random_pure(s, i) for i in range(3)] + [random_mixed(s, 2, i) for i in range(3)]
    for x in states:
        for y in states:
            dxy = trace_distance(x, y)
            assert dxy <= 2 + 1e-12
            assert abs(dxy - trace_distance(y, x)) <= 1e-12
            for z in states:
                assert dxy <= trace_distance(x, z) + trace_distance(z, y) + 1e-12


def test_bound_values():
    assert bound_eq26(2, 1, 10) == 0.5
    assert bound_eq26(2, 1, 4) == 2
    assert bound_eq26_exact(2, 1, 5) == Fraction(4, 3)
    assert bound_eq27(2, 1, 10) == 0.8
    assert abs(bound_eq27(3, 2, 100) - 0.24) <= 1e-15
    assert c_constant_exact(2, 1, 1) == Fraction(1, 3)
    assert c_constant_exact(4, 0, 3) == 1
    assert c_constant_exact(3, 2, 10) == Fraction(45, 91)
    assert bound_eq210(2, 1, 1) == 8
    assert bound_two_one_minus_c_exact(2, 1, 1) == Fraction(4, 3)
    assert abs(bound_two_one_minus_c(2, 1, 1) - 4 / 3) <= 1e-15
    assert abs(bound_eq210(2, 2, 100) - 0.24) <= 1e-15


def test_bound_errors():
    with pytest.raises(ValueError):
        bound_eq26(2, 3, 2)
    with pytest.raises(ValueError):
        c_constant(2, 3, 2)
    with pytest.raises(ValueError):
        dimension_ratio_bounds(2, 3, 2)


def test_eq26_continuous_at_threshold():
    d, k = 3, 2
    N = 2 * k * d
    assert Fraction(2 * k * d, N - k * d) == 2 == bound_eq26_exact(d, k, N)


def test_bound_chain_random_sweep():
    gen = random.Random(7)
    for _ in range(200):
        d, k = gen.randint(1, 8), gen.randint(1, 6)
        N = gen.randint(k, 200)
        lo, mid, hi = bound_two_one_minus_c_exact(d, k, N), bernoulli_middle_exact(d, k, N), bound_eq210_exact(d, k, N)
        assert lo <= mid <= hi
        if N > 2 * k * d:
            assert bound_eq26_exact(d, k, N) <= bound_eq27_exact(d, k, N)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 5), st.integers(0, 40))
def test_c_constant_range(d, k, extra):
    N = k + extra
    C = c_constant_exact(d, k, N)
    assert 0 < C <= 1
    assert (C < 1) == (k >= 1)


def test_dimension_ratio():
    r = dimension_ratio_bounds(2, 1, 10)
    assert r.ratio == Fraction(10, 11)
    assert r.bernoulli_ok
    assert abs(r.eq33_bound - 0.2) <= 1e-15
    r0 = dimension_ratio_bounds(3, 0, 5)
    assert r0.ratio == 1 and r0.eq33_bound == 0
    for k in range(6):
        assert dimension_ratio_bounds(1, k, 5).ratio == 1
        assert eq33_bound(1, k, 5) == 0


def test_bound_report():
    rep = bound_report(2, 1, 1, 2 / 3)
    assert rep.all_satisfied
    assert rep.C_dkN == pytest.approx(1 / 3)
    bad = bound_report(2, 1, 100, 1.0)
    assert not bad.satisfied["bound_eq26"]
    assert bad.satisfied["trivial"]
    with pytest.raises(ValueError):
        bound_report(2, 1, 4, -0.1)

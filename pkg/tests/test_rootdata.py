import math

import pytest
from hypothesis import given, settings, strategies as st

from faceklr.rootdata import (builtin, positive_roots, pairing, seq, ht,
                              load_cartan, CartanError, weight_of_word)


def test_pairing_symmetric_diagonal():
    a2 = builtin("a2")
    assert pairing(a2, (1, 0), (1, 0)) == 2
    assert pairing(a2, (1, 0), (0, 1)) == -1
    b2 = builtin("b2")
    assert pairing(b2, (1, 0), (1, 0)) == 4
    assert pairing(b2, (0, 1), (0, 1)) == 2
    assert pairing(b2, (1, 0), (0, 1)) == -2


def test_delta_pairing_zero():
    sl2 = builtin("a1-affine")
    # bilinear expansion: 2 + 2 - 2 - 2 = 0
    assert pairing(sl2, sl2.delta, sl2.delta) == 0
    sl3 = builtin("a2-affine")
    assert pairing(sl3, sl3.delta, sl3.delta) == 0
    for r in positive_roots(sl3, 4):
        assert pairing(sl3, sl3.delta, r.coeffs) == 0


@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=60, deadline=None)
def test_pairing_bilinear(a, b, c, d):
    spec = builtin("a2")
    lam, mu = (a, b), (c, d)
    doubled = tuple(2 * x for x in lam)
    assert pairing(spec, doubled, mu) == 2 * pairing(spec, lam, mu)
    assert pairing(spec, lam, mu) == pairing(spec, mu, lam)


def test_positive_roots_a2():
    got = {r.coeffs for r in positive_roots(builtin("a2"), 3)}
    assert got == {(1, 0), (0, 1), (1, 1)}


def test_positive_roots_counts_type_a():
    for n in (1, 2, 3, 4):
        spec = builtin(f"a{n}")
        roots = positive_roots(spec, 20)
        assert len(roots) == n * (n + 1) // 2


def test_positive_roots_affine_sl2():
    got = {(r.coeffs, r.imaginary) for r in positive_roots(builtin("a1-affine"), 3)}
    assert got == {((1, 0), False), ((0, 1), False), ((1, 1), True),
                   ((2, 1), False), ((1, 2), False)}


def test_affine_sl3_contains_delta():
    spec = builtin("a2-affine")
    roots = positive_roots(spec, 3)
    assert any(r.coeffs == (1, 1, 1) and r.imaginary for r in roots)


def test_roots_nonnegative():
    for name in ("a3", "b2", "g2", "a2-affine"):
        for r in positive_roots(builtin(name), 6):
            assert all(x >= 0 for x in r.coeffs)
            assert 0 < ht(r.coeffs) <= 6


def test_seq_examples():
    assert seq((1, 1)) == [(0, 1), (1, 0)]
    assert seq((2, 0)) == [(0, 0)]
    assert len(seq((1, 1, 1))) == 6


@given(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2)))
@settings(max_examples=40, deadline=None)
def test_seq_multinomial(nu):
    if sum(nu) > 8:
        return
    words = seq(nu)
    expect = math.factorial(sum(nu))
    for n in nu:
        expect //= math.factorial(n)
    assert len(words) == expect
    assert len(set(words)) == len(words)
    assert all(weight_of_word(builtin("a3"), w) == nu for w in words)


def test_projection():
    sl3 = builtin("a2-affine")
    assert sl3.project(sl3.delta) == (0, 0)
    assert sl3.project((1, 0, 0)) == (-1, -1)  # alpha_0 -> -theta
    assert sl3.project((0, 1, 0)) == (1, 0)


def test_load_cartan_roundtrip():
    text = """
[cartan]
kind = finite
labels = 1 2
matrix = 2 -1 / -2 2
symmetrizers = 2 1
"""
    spec = load_cartan(text)
    assert spec.matrix == ((2, -1), (-2, 2))
    assert spec.sym == (2, 1)


def test_invalid_cartan_rejected():
    with pytest.raises(CartanError):
        load_cartan("""
[cartan]
kind = finite
labels = 1 2
matrix = 2 -2 / -2 2
symmetrizers = 1 1
""")  # affine matrix declared finite
    with pytest.raises(CartanError):
        load_cartan("""
[cartan]
kind = affine
labels = 0 1
matrix = 2 -4 / -1 2
symmetrizers = 1 4
affine_node = 0
""")  # twisted A_2^(2)

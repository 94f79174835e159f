from fractions import Fraction

import pytest

from faceklr.rootdata import builtin, positive_roots
from faceklr.convexity import (Face, face_from_functional, is_face,
                               simple_face_roots, compatible_order,
                               default_order, minimal_pair, face_cartan,
                               witness_functional, is_convex_order,
                               order_from_functionals, OrderError,
                               PLUS, ZERO, MINUS)


def test_functional_faces_are_faces():
    import itertools
    sl3 = builtin("a2-affine")
    for c in itertools.product([-1, 0, 1], repeat=3):
        assert is_face(face_from_functional(sl3, c, 5))


def test_whole_and_empty_faces():
    a2 = builtin("a2")
    whole = face_from_functional(a2, (0, 0), 3)
    assert not whole.part(PLUS) and not whole.part(MINUS)
    assert is_face(whole)
    empty = face_from_functional(a2, (1, 1), 3)
    assert not empty.face_roots
    assert is_face(empty)
    assert [r.coeffs for r in simple_face_roots(whole)] == [(0, 1), (1, 0)]


def test_example_face_data():
    """The affine sl3 face cut by the alpha_2 coefficient functional."""
    sl3 = builtin("a2-affine")
    face = face_from_functional(sl3, (-1, 0, 1), 7)
    assert is_face(face)
    simples = [r.coeffs for r in simple_face_roots(face)]
    assert simples == [(0, 1, 0), (1, 0, 1)]
    fc, _ = face_cartan(face)
    assert fc.kind == "affine"
    assert fc.matrix == ((2, -2), (-2, 2))


def test_lemma_face_in_affine_sl4():
    sl4 = builtin("a3-affine")
    face = face_from_functional(sl4, (-2, 0, 1, 1), 9)
    simples = [r.coeffs for r in simple_face_roots(face)]
    assert simples == [(0, 1, 0, 0), (1, 0, 1, 1)]


def test_witness_functional_signs():
    sl3 = builtin("a2-affine")
    face = face_from_functional(sl3, (-1, 0, 1), 5)
    c = witness_functional(face)
    for coeffs, zone in face.zones:
        val = sum(ci * xi for ci, xi in zip(c, coeffs))
        if zone == ZERO:
            assert val == 0
        elif zone == PLUS:
            assert val >= 1
        else:
            assert val <= -1


def test_compatible_order_zones_and_convexity():
    sl3 = builtin("a2-affine")
    face = face_from_functional(sl3, (-1, 0, 1), 7)
    order = compatible_order(face, inner=[(-1, 1, -1)])
    assert is_convex_order(order)
    roots = order.sorted_roots()
    zones = [face.zone(r) for r in roots]
    # minus block, then zero block, then plus block
    first_zero = zones.index(ZERO)
    first_plus = zones.index(PLUS)
    assert all(z == MINUS for z in zones[:first_zero])
    assert all(z == ZERO for z in zones[first_zero:first_plus])
    assert all(z == PLUS for z in zones[first_plus:])


def test_order_requires_separation():
    sl3 = builtin("a2-affine")
    with pytest.raises(OrderError):
        order_from_functionals(sl3, 5, [(-1, 1, -1)])


def test_minimal_pairs():
    a2 = builtin("a2")
    o = default_order(a2, 4)
    mp = minimal_pair(a2, (1, 1), o)
    assert (mp.beta, mp.gamma) == ((1, 0), (0, 1))
    b2 = builtin("b2")
    ob = default_order(b2, 4)
    mp2 = minimal_pair(b2, (1, 2), ob)
    assert tuple(x + y for x, y in zip(mp2.beta, mp2.gamma)) == (1, 2)
    assert ob.key(mp2.gamma) < ob.key(mp2.beta)
    sl2 = builtin("a1-affine")
    osl2 = default_order(sl2, 5)
    mp3 = minimal_pair(sl2, (1, 2), osl2)
    assert tuple(x + y for x, y in zip(mp3.beta, mp3.gamma)) == (1, 2)


def test_imaginary_roots_tie():
    sl2 = builtin("a1-affine")
    o = default_order(sl2, 6)
    assert o.equiv((1, 1), (2, 2))
    assert not o.equiv((1, 0), (0, 1))


def test_face_cartan_finite_case():
    a3 = builtin("a3")
    face = face_from_functional(a3, (0, 0, 1), 4)
    fc, simples = face_cartan(face)
    assert fc.kind == "finite"
    assert fc.matrix == ((2, -1), (-1, 2))
    assert [r.coeffs for r in simples] == [(0, 1, 0), (1, 0, 0)]

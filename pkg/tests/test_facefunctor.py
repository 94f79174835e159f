import time
from fractions import Fraction

import pytest

from faceklr.rootdata import builtin
from faceklr.laurent import GradedDim, geometric
from faceklr.klr import Engine, standard_parameters, sl_n_affine_parameters
from faceklr.convexity import (face_from_functional, compatible_order,
                               order_from_functionals, coordinate_tiebreakers)
from faceklr.facefunctor import FaceContext, verify_nested
from faceklr.modules import (letter_module, apply_map, generating_vector,
                             characters_equal, induce)


@pytest.fixture(scope="module")
def a2a3_ctx():
    a3 = builtin("a3")
    eng = Engine(a3, standard_parameters(a3))
    face = face_from_functional(a3, (0, 0, 1), 4)
    order = compatible_order(face, inner=[(0, 1, 0)])
    return FaceContext(face, order, eng, 10)


@pytest.fixture(scope="module")
def example_ctx():
    spec = builtin("a2-affine")
    eng = Engine(spec, sl_n_affine_parameters(spec, [1, 1, 1], [-1, -1, -1]))
    face = face_from_functional(spec, (-1, 0, 1), 7)
    order = compatible_order(face, inner=[(-1, 1, -1)])
    return FaceContext(face, order, eng, 10)


def test_identity_face_reproduces_parameters():
    """On the whole-positive-roots face the extracted presentation is the
    original one, up to the face label sorting."""
    a2 = builtin("a2")
    eng = Engine(a2, standard_parameters(a2))
    face = face_from_functional(a2, (0, 0), 3)
    order = compatible_order(face, inner=[(0, 1)])
    ctx = FaceContext(face, order, eng, 12)
    assert ctx.roots == [(0, 1), (1, 0)]  # label 0 is alpha_2
    orig = standard_parameters(a2)
    assert ctx.extract_q(1, 0) == orig.q_poly(0, 1)
    assert ctx.extract_q(0, 1) == orig.q_poly(1, 0)
    assert ctx.extract_q(0, 0) == {}


def test_worked_example_q_polynomial(example_ctx):
    """s_i = 1, t_i = -1: the face polynomial is -(u + v)^2."""
    q = example_ctx.extract_q(0, 1)
    assert q == {(2, 0): Fraction(-1), (1, 1): Fraction(-2),
                 (0, 2): Fraction(-1)}
    # geometric iff discriminant zero
    a, b, c = q[(2, 0)], q[(1, 1)], q[(0, 2)]
    assert b * b - 4 * a * c == 0


def test_worked_example_root_module_character(example_ctx):
    D = example_ctx.root_mod(1)
    ch = D.character()
    assert list(ch) == [(0, 2)]  # the cuspidal character [02]
    assert ch[(0, 2)] == geometric(2, ch[(0, 2)].trunc)


def test_x_seed_relations(example_ctx):
    """x_gamma v = -s_2^{-1} y_1 v = t_2^{-1} y_2 v with s_2 = 1, t_2 = -1."""
    D = example_ctx.root_mod(1)
    x = example_ctx.x_end(1)
    v = generating_vector(D)
    xv = apply_map(x, {v: Fraction(1)})
    y1v = D.apply_gen(("y", 0), {v: Fraction(1)})
    y2v = D.apply_gen(("y", 1), {v: Fraction(1)})
    assert xv == {k: -c for k, c in y1v.items()}
    assert xv == {k: -c for k, c in y2v.items()}


def test_presentation_a2_in_a3(a2a3_ctx):
    rep = a2a3_ctx.presentation_report()
    assert rep["pass"]
    assert rep["face_cartan"] == [[2, -1], [-1, 2]]
    assert rep["q1_diagonal_zero"] and rep["q3_symmetry"]
    assert rep["braid"] and rep["hom_dimension_formula"]


def test_tau_squared_zero(a2a3_ctx):
    assert a2a3_ctx.extract_q(0, 0) == {}
    assert a2a3_ctx.extract_q(1, 1) == {}


def test_hom_formula_values(a2a3_ctx):
    f = a2a3_ctx.hom_formula((0, 0), (0, 0), 4)
    assert [f[d] for d in (-2, -1, 0, 1, 2)] == [1, 0, 3, 0, 5]
    got = a2a3_ctx.hom_dims_computed((0, 0), (0, 0), range(-2, 3))
    assert got == {-2: 1, -1: 0, 0: 3, 1: 0, 2: 5}


def test_functor_on_letters(a2a3_ctx):
    feng = a2a3_ctx.face_engine()
    F0 = a2a3_ctx.apply_functor(letter_module(feng, 0, 10))
    assert F0.dim == 1
    assert list(F0.character()) == [(1,)]  # L(alpha_2)
    F1 = a2a3_ctx.apply_functor(letter_module(feng, 1, 10))
    assert list(F1.character()) == [(0,)]


def test_functor_circ_compatibility(a2a3_ctx):
    feng = a2a3_ctx.face_engine()
    A = letter_module(feng, 0, 10)
    B = letter_module(feng, 1, 10)
    FAB = a2a3_ctx.apply_functor(induce([A, B], 10))
    FA = a2a3_ctx.apply_functor(A)
    FB = a2a3_ctx.apply_functor(B)
    both = induce([FA, FB], 10)
    assert characters_equal(FAB.character(), both.character())


def test_nested_faces(a2a3_ctx):
    rep = verify_nested(a2a3_ctx, (0, 1, 2))
    assert rep["pass"]
    assert rep["cartan_match"]
    rep2 = verify_nested(a2a3_ctx, (0, 2, 4))  # same E by a different functional
    assert rep2["pass"]


def test_nested_affine(example_ctx):
    rep = verify_nested(example_ctx, (-1, 0, 3))
    assert rep["E_roots"] == [[0, 1, 0]]
    assert rep["pass"]

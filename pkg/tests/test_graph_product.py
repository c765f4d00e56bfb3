import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from racg_hecke import CoxeterSystem, InputError, PreconditionError, enumerate_ball
from racg_hecke.graph_product import (
    RepParameter,
    character,
    character_by_matrices,
    character_table,
    character_via_hecke,
    closed_form_character,
    convex_combination_test,
    find_distinguishing_word,
    hecke_translation_check,
    rep_eigenvector_check,
    rep_generator,
    sign_character,
    sign_operator,
    translation_operator,
    translation_parameters,
)
from racg_hecke.hecke import left_hecke_operator

from strategies import systems

S4 = CoxeterSystem.from_names("stuv", [("s", "u")])


@pytest.fixture(scope="module")
def ball():
    return enumerate_ball(S4, 6)


def params(n):
    return st.lists(st.floats(-0.95, 0.95), min_size=n, max_size=n)


def test_rep_parameter():
    a = RepParameter((0.6, 0.0))
    assert a.z == pytest.approx((0.8, 1.0))
    with pytest.raises(InputError):
        RepParameter((1.0,))


def test_sign_operator(ball):
    sig = sign_operator(S4, 0, ball).toarray()
    assert sig[0, 0] == 1 and sig[ball.index[(0,)], ball.index[(0,)]] == -1
    assert np.array_equal(sig @ sig, np.eye(len(ball)))


def test_zero_parameter_is_regular(ball):
    for s in S4.generators:
        lam = rep_generator(S4, (0.0,) * 4, s, ball).matrix
        assert abs(lam - translation_operator(S4, s, ball).matrix).max() == 0


@settings(max_examples=20, deadline=None)
@given(params(4))
def test_involution_symmetry_and_relations(a):
    ball = enumerate_ball(S4, 5)
    inner1, inner2 = ball.interior(1), ball.interior(2)
    mats = [rep_generator(S4, a, s, ball).toarray() for s in S4.generators]
    for M in mats:
        assert np.allclose(M, M.T, atol=0)
        sq = M @ M
        assert np.abs(sq[:, inner1] - np.eye(len(ball))[:, inner1]).max() < 1e-12
        cols = M[:, inner1]
        assert np.abs(cols.T @ cols - np.eye(len(inner1))).max() < 1e-12
    comm = mats[0] @ mats[2] - mats[2] @ mats[0]
    assert np.abs(comm[:, inner2]).max() < 1e-12


def test_character_examples():
    a = (0.5, 0.5, -0.3, 0.2)
    assert character(S4, a, ()) == 1
    assert character(S4, a, (0,)) == pytest.approx(0.5)
    assert character(S4, a, (0, 1)) == pytest.approx(0.25)
    assert character(S4, a, (0, 1, 3)) == pytest.approx(0.5 * 0.5 * 0.2)
    assert abs(character(S4, a, (0, 1, 0, 1)) - 7 / 16) < 1e-12
    assert abs(character_by_matrices(S4, a, (0, 1, 0, 1)) - 7 / 16) < 1e-12


@settings(max_examples=50, deadline=None)
@given(systems(2, 4), st.data())
def test_closed_forms_and_symmetry(S, data):
    a = data.draw(params(S.rank))
    for w in enumerate_ball(S, 4).words:
        ex = character(S, a, w)
        assert abs(ex) <= 1 + 1e-12
        assert ex == pytest.approx(character(S, a, S.inverse(w)), abs=1e-9)
        cf = closed_form_character(S, a, w)
        if cf is not None:
            assert abs(ex - cf) < 1e-9
            assert abs(character_by_matrices(S, a, w) - cf) < 1e-9


def test_closed_form_shapes():
    a = (0.1, 0.2, 0.3, 0.4)
    assert closed_form_character(S4, a, (0, 2, 0, 2)) is None  # commuting: s u s u = e
    assert closed_form_character(S4, a, (0, 1, 0)) is None


def test_translation_examples(ball):
    q = translation_parameters((0.6, 0.0, 0.3, 0.1))
    assert q[0] == pytest.approx(0.25) and q[1] == 1.0
    lam = rep_generator(S4, (0.0,) * 4, 1, ball).matrix
    assert abs(lam - left_hecke_operator(S4, (1.0,) * 4, 1, ball).matrix).max() == 0
    assert hecke_translation_check(S4, (0.6, 0.0, 0.3, 0.85), ball).max_residual < 1e-12
    with pytest.raises(PreconditionError):
        hecke_translation_check(S4, (-0.1, 0.0, 0.3, 0.85), ball)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(0.0, 0.9), min_size=4, max_size=4))
def test_translation_random(a):
    ball = enumerate_ball(S4, 5)
    rep = hecke_translation_check(S4, a, ball)
    assert rep.violations == []
    for w in enumerate_ball(S4, 3).words:
        assert character(S4, a, w) == pytest.approx(character_via_hecke(S4, a, w), abs=1e-9)


def test_rep_eigenvectors(ball):
    a = (0.5, 0.3, 0.7, 0.4)
    assert rep_eigenvector_check(S4, a, (1, 1, 1, 1), ball).violations == []
    assert rep_eigenvector_check(S4, a, (1, -1, 1, 1), ball).violations == []
    neg = (-0.5, 0.3, -0.7, 0.4)
    assert rep_eigenvector_check(S4, neg, (1, -1, 1, -1), ball).max_residual < 1e-9
    with pytest.raises(PreconditionError):
        rep_eigenvector_check(S4, (0.0, 0.3, 0.7, 0.4), (1, 1, 1, 1), ball)


def test_rep_eigenvector_wrong_sign_fails(ball):
    # swapping the eigenvalue sign must be detected
    from racg_hecke import graph_product

    a = (0.5, 0.3, 0.7, 0.4)
    eta = graph_product.rep_eigenvector(S4, a, (1, 1, 1, 1), ball)
    M = rep_generator(S4, a, 0, ball).matrix
    mask = ball.interior_mask(1)
    assert np.abs((M @ eta + eta)[mask]).max() > 0.1


def test_find_distinguishing_word():
    a = (0.1, 0.2, -0.3, 0.4)
    assert find_distinguishing_word(S4, a, a, 4) is None
    b = (0.1, 0.25, -0.3, 0.4)
    assert find_distinguishing_word(S4, a, b, 4) == (1,)
    c = (-0.1, 0.2, -0.3, 0.4)
    w = find_distinguishing_word(S4, a, c, 3)
    assert w == (0,)


def test_sign_character():
    assert sign_character((0.5, -0.2, 0.0, 0.1), (1, 0, 1)) == 1
    assert sign_character((0.5, -0.2, 0.0, 0.1), (1, 2)) == -1
    assert sign_character((0.5, -0.2, 0.0, 0.1), (2,)) == 1


def test_convex_combination():
    a = (0.1, 0.2, -0.3, 0.4)
    assert convex_combination_test(S4, a, a, 0, 0, 4)["max_residual"] < 1e-12
    b = (0.1, 0.3, -0.3, 0.4)
    assert convex_combination_test(S4, a, b, 0.2, 0.1, 3)["max_residual"] > 1e-3
    grid = np.linspace(-1, 1, 9)
    best = min(convex_combination_test(S4, a, b, c, d, 2)["max_residual"] for c in grid for d in grid)
    assert best > 1e-3


def test_character_table():
    t = character_table(S4, (0.5,) * 4, [(), (0,)])
    assert t == {(): 1.0, (0,): 0.5}

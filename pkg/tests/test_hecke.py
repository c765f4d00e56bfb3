import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from racg_hecke import CoxeterSystem, PreconditionError, enumerate_ball
from racg_hecke.hecke import (
    central_constraint_pairs,
    commutator_residual,
    double_coset,
    double_coset_form_check,
    eigen_weights,
    eigenvector_coeffs,
    eigenvector_residual,
    first_solution_identity,
    fundamental_solution_check,
    hecke_word_operator,
    inversion_operator,
    left_hecke_operator,
    quadratic_residual,
    right_hecke_operator,
    adding_letters_check,
    solve_central_space,
)
from racg_hecke.series import c_sets

from strategies import systems

S4 = CoxeterSystem.from_names("stuv", [("s", "u")])
Q4 = (0.3, 0.5, 0.7, 0.2)
# t is free only against s; flipping t converges when q_s < q_t
FLIP = CoxeterSystem.from_names("stuv", [("t", "u"), ("t", "v")])
QF = (0.05, 0.5, 0.05, 0.05)


@pytest.fixture(scope="module")
def ball6():
    return enumerate_ball(S4, 6)


def unit(ball, w):
    v = np.zeros(len(ball))
    v[ball.index[tuple(w)]] = 1.0
    return v


def test_left_operator_examples(ball6):
    q = Q4
    T = left_hecke_operator(S4, q, 0, ball6)
    assert T.domain_safe_radius == 1
    assert np.array_equal(T @ unit(ball6, ()), unit(ball6, (0,)))
    p = (q[0] - 1) / math.sqrt(q[0])
    assert np.allclose(T @ unit(ball6, (0,)), unit(ball6, ()) + p * unit(ball6, (0,)))
    assert T.matrix.getnnz(axis=0).max() <= 2


def test_operator_matches_formula_on_interior(ball6):
    _, p = np.sqrt(Q4), [(x - 1) / math.sqrt(x) for x in Q4]
    for s in S4.generators:
        T = left_hecke_operator(S4, Q4, s, ball6).toarray()
        R = right_hecke_operator(S4, Q4, s, ball6).toarray()
        for j in ball6.interior(1):
            w = ball6.words[j]
            want = unit(ball6, S4.left_multiply(s, w))
            if len(S4.left_multiply(s, w)) < len(w):
                want = want + p[s] * unit(ball6, w)
            assert np.allclose(T[:, j], want)
            want = unit(ball6, S4.right_multiply(w, s))
            if len(S4.right_multiply(w, s)) < len(w):
                want = want + p[s] * unit(ball6, w)
            assert np.allclose(R[:, j], want)


def test_inversion_is_involution(ball6):
    J = inversion_operator(ball6)
    assert abs(J @ J - np.eye(len(ball6))).max() == 0
    assert np.array_equal(right_hecke_operator(S4, Q4, 1, ball6) @ unit(ball6, ()), unit(ball6, (1,)))


def test_quadratic_and_commutation(ball6):
    for s in S4.generators:
        assert quadratic_residual(S4, Q4, s, ball6) < 1e-12
    L = [left_hecke_operator(S4, Q4, s, ball6).matrix for s in S4.generators]
    R = [right_hecke_operator(S4, Q4, s, ball6).matrix for s in S4.generators]
    # commuting generators commute exactly on columns not touched by truncation
    assert commutator_residual(L[0], L[2], ball6.interior(2)) == 0
    for s, t in itertools.product(S4.generators, repeat=2):
        assert commutator_residual(L[s], R[t], ball6.interior(2)) < 1e-12


def test_word_operator(ball6):
    assert abs(hecke_word_operator(S4, Q4, (), ball6).matrix - np.eye(len(ball6))).max() == 0
    T = hecke_word_operator(S4, Q4, (0, 1), ball6)
    assert T.domain_safe_radius == 2
    assert np.array_equal(T @ unit(ball6, ()), unit(ball6, (0, 1)))


def test_delta_e_is_cyclic(ball6):
    small = enumerate_ball(S4, 3)
    cols = [hecke_word_operator(S4, Q4, w, small) @ unit(small, ()) for w in small.words]
    assert np.linalg.matrix_rank(np.column_stack(cols)) == len(small)


def test_eigenvector_examples():
    ball = enumerate_ball(S4, 3)
    q = (0.25, 0.25, 0.25, 0.25)
    eta = eigenvector_coeffs(S4, q, (1, 1, 1, 1), ball)
    assert eta[0] == 1 and eta[ball.index[(0,)]] == pytest.approx(0.5)
    eta = eigenvector_coeffs(S4, q, (-1, 1, 1, 1), ball)
    assert eta[ball.index[(0,)]] == pytest.approx(-2)
    exact = eigenvector_coeffs(S4, q, (-1, 1, 1, 1), ball, exact=True)
    assert exact[ball.index[(0, 1, 0)]] == Fraction(4, 2)
    assert np.allclose([float(x) for x in exact], eta)
    with pytest.raises(PreconditionError):
        eigenvector_coeffs(S4, (0.3,) * 4, (1, 1, 1, 1), ball, exact=True)
    assert list(eigen_weights(q, (1, -1, 1, 1))) == pytest.approx([0.5, -2, 0.5, 0.5])


@settings(max_examples=40, deadline=None)
@given(systems(1, 4), st.data())
def test_eigen_relation_any_sign(S, data):
    # the relation is local, so it holds on interior(1) for every sign vector
    q = data.draw(st.lists(st.floats(0.05, 1.0), min_size=S.rank, max_size=S.rank))
    eps = data.draw(st.lists(st.sampled_from([1, -1]), min_size=S.rank, max_size=S.rank))
    ball = enumerate_ball(S, 5)
    for s in S.generators:
        assert eigenvector_residual(S, q, eps, s, ball) < 1e-9
    assert adding_letters_check(S, q, eps, ball) == []


def test_eigenvector_multiplicative():
    ball = enumerate_ball(S4, 5)
    eta = eigenvector_coeffs(S4, Q4, (1, -1, 1, -1), ball)
    for i, w in enumerate(ball.words):
        for j, v in enumerate(ball.words):
            if len(w) + len(v) <= 5 and len(S4.multiply(w, v)) == len(w) + len(v):
                assert eta[ball.index[S4.multiply(w, v)]] == pytest.approx(eta[i] * eta[j])


def test_adding_letters_exact_and_detects_errors():
    ball = enumerate_ball(S4, 5)
    q = (Fraction(1, 4), Fraction(1, 9), Fraction(4, 9), Fraction(1, 16))
    assert adding_letters_check(S4, q, (1, -1, 1, -1), ball) == []
    assert adding_letters_check(S4, (0.4,) * 4, (1, 1, 1, 1), enumerate_ball(S4, 6)) == []


def test_constraint_pairs_match_double_loop():
    for radius in (2, 4):
        ball = enumerate_ball(S4, radius)
        brute = []
        for i, w in enumerate(ball.words):
            for s in S4.generators:
                sws = S4.normalize((s,) + w + (s,))
                if len(sws) == len(w) + 2 and len(sws) <= radius:
                    brute.append((i, s))
        got = central_constraint_pairs(S4, ball)
        assert got == sorted(brute)
        assert all(len(ball.words[i]) + 2 <= radius for i, _ in got)
    # the identity is never a constraint: s e s = e
    assert all(i != 0 for i, _ in central_constraint_pairs(S4, enumerate_ball(S4, 2)))


def test_central_space_contains_eigenvectors():
    ball = enumerate_ball(FLIP, 6)
    C, _ = c_sets(FLIP, QF, 2)
    assert (1, -1, 1, 1) in C
    space = solve_central_space(FLIP, QF, ball, margin=1)
    assert space.containment_error(unit(ball, ())) < 1e-8
    for eps in C:
        assert space.containment_error(eigenvector_coeffs(FLIP, QF, eps, ball)) < 1e-8
    assert space.dimension >= 1 + len(C)
    # a generic vector is not central
    rng = np.random.default_rng(0)
    assert space.containment_error(rng.normal(size=len(ball))) > 1e-3


def test_double_coset_examples():
    ball = enumerate_ball(FLIP, 7)
    s, t = 0, 1
    w = (2,)
    eta1 = eigenvector_coeffs(FLIP, QF, (1, 1, 1, 1), ball)
    fit = double_coset_form_check(FLIP, QF, s, t, w, eta1, ball)
    assert fit.a == pytest.approx(eta1[ball.index[w]]) and fit.residual < 1e-9
    assert fit.b == 0 and abs(fit.c) < 1e-9
    delta = unit(ball, ())
    fit = double_coset_form_check(FLIP, QF, s, t, w, delta, ball)
    assert (fit.a, fit.b, fit.c) == (0, 0, 0)
    eta2 = eigenvector_coeffs(FLIP, QF, (1, -1, 1, 1), ball)
    xi = 0.7 * eta1 - 1.3 * eta2
    fit = double_coset_form_check(FLIP, QF, s, t, w, xi, ball)
    assert fit.case == "q_s<q_t" and fit.b == 0 and fit.residual < 1e-9
    assert fit.c == pytest.approx(-1.3 * eta2[ball.index[w]])
    assert fit.points == len(double_coset(FLIP, s, t, w, ball))


def test_double_coset_preconditions():
    ball = enumerate_ball(FLIP, 5)
    xi = np.zeros(len(ball))
    with pytest.raises(PreconditionError):
        double_coset_form_check(FLIP, QF, 1, 2, (0,), xi, ball)  # t, u commute
    with pytest.raises(PreconditionError):
        double_coset_form_check(FLIP, QF, 0, 1, (0, 2), xi, ball)  # not minimal
    with pytest.raises(PreconditionError):
        double_coset_form_check(FLIP, QF, 0, 1, (), xi, ball)  # D e D = D is degenerate


def test_fundamental_solutions():
    rep = fundamental_solution_check(0.1, 0.37, 20)
    assert rep.violations == [] and rep.max_abs_residual < 1e-12
    assert fundamental_solution_check(1.0, 0.4, 20).violations == []
    assert fundamental_solution_check(1.0, 1.0, 20).violations == []
    for q in (Fraction(1, 2), Fraction(1, 3), Fraction(7, 10)):
        assert first_solution_identity(q, q)
    assert first_solution_identity(Fraction(1, 5), Fraction(3, 7))


def test_fundamental_solution_check_detects_wrong_recurrence():
    from racg_hecke import hecke

    original = hecke.fundamental_solutions

    def broken(q_s, q_t, n):
        out = original(q_s, q_t, n)
        return [(g1 * 1.001, g2) for g1, g2 in out]

    hecke.fundamental_solutions = broken
    try:
        assert fundamental_solution_check(0.3, 0.6, 5).violations
    finally:
        hecke.fundamental_solutions = original

"""Graph-product representations ``lambda_a`` of a right-angled Coxeter group.

For ``a_s`` in ``(-1, 1)`` and ``z_s = sqrt(1 - a_s^2)`` the generator acts on
``l^2(W)`` by ``lambda_a(s) = a_s sigma(s) + z_s lambda(s)``, where
``sigma(s) delta_w = -delta_w`` if ``|sw| < |w|`` (else ``+delta_w``) and
``lambda(s) delta_w = delta_{sw}``.  Complex phases of ``z_s`` are unitarily
irrelevant and are dropped, so every matrix here is real symmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .coxeter import BallBasis, CoxeterSystem, Word, enumerate_ball
from .errors import InputError, PreconditionError
from .hecke import TruncatedOperator, Violation, left_hecke_operator

CHARACTER_TOL = 1e-9


@dataclass(frozen=True)
class RepParameter:
    a: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        if any(not -1 < x < 1 for x in a):
            raise InputError(f"representation parameters must lie in (-1, 1), got {a}")
        object.__setattr__(self, "a", a)

    @property
    def z(self) -> tuple:
        return tuple(math.sqrt(1.0 - x * x) for x in self.a)

    def __len__(self):
        return len(self.a)


def as_rep_parameter(a) -> RepParameter:
    return a if isinstance(a, RepParameter) else RepParameter(tuple(a))


def _check_rank(system: CoxeterSystem, a: RepParameter) -> None:
    if len(a) != system.rank:
        raise InputError(f"expected {system.rank} representation parameters, got {len(a)}")


def sign_operator(system: CoxeterSystem, s: int, ball: BallBasis) -> TruncatedOperator:
    """Diagonal ``sigma(s)``: ``-1`` on words with left descent ``s``."""
    s = system._check_letter(s)
    diag = np.where(ball.left_descent_mask(s), -1.0, 1.0)
    return TruncatedOperator(sp.diags(diag, format="csr"), ball, 0)


def translation_operator(system: CoxeterSystem, s: int, ball: BallBasis) -> TruncatedOperator:
    """``lambda(s) delta_w = delta_{sw}``, dropping images outside the ball."""
    s = system._check_letter(s)
    n = len(ball)
    target = ball.left_table(s)
    ok = target >= 0
    m = sp.csr_matrix((np.ones(int(ok.sum())), (target[ok], np.flatnonzero(ok))), shape=(n, n))
    return TruncatedOperator(m, ball, 1)


def rep_generator(system: CoxeterSystem, a, s: int, ball: BallBasis) -> TruncatedOperator:
    a = as_rep_parameter(a)
    _check_rank(system, a)
    if ball.radius < 1:
        raise PreconditionError("rep_generator needs a ball of radius at least 1")
    m = a.a[s] * sign_operator(system, s, ball).matrix + a.z[s] * translation_operator(system, s, ball).matrix
    return TruncatedOperator(m.tocsr(), ball, 1)


def apply_generator(system: CoxeterSystem, a: RepParameter, s: int, vec: dict) -> dict:
    """Exact action of ``lambda_a(s)`` on a finitely supported vector ``{word: coeff}``."""
    out: dict = {}
    for w, c in vec.items():
        sw = system.left_multiply(s, w)
        sign = -1.0 if len(sw) < len(w) else 1.0
        out[w] = out.get(w, 0.0) + a.a[s] * sign * c
        out[sw] = out.get(sw, 0.0) + a.z[s] * c
    return out


def character(system: CoxeterSystem, a, w: Word) -> float:
    """``tau_a(w) = <lambda_a(w) delta_e, delta_e>`` by exact finite-support action."""
    a = as_rep_parameter(a)
    _check_rank(system, a)
    vec = {(): 1.0}
    for s in reversed(tuple(w)):
        vec = apply_generator(system, a, s, vec)
    return float(vec.get((), 0.0))


def character_by_matrices(system: CoxeterSystem, a, w: Word, ball: BallBasis | None = None) -> float:
    """Same value through sparse matrices on a ball of radius ``|w| + 1``."""
    a = as_rep_parameter(a)
    w = tuple(w)
    if ball is None:
        ball = enumerate_ball(system, len(w) + 1)
    v = np.zeros(len(ball))
    v[0] = 1.0
    for s in reversed(w):
        v = rep_generator(system, a, s, ball).matrix @ v
    return float(v[0])


def character_via_hecke(system: CoxeterSystem, a, w: Word, ball: BallBasis | None = None) -> float:
    """``<(a_s + z_s T_s) ... delta_e, delta_e>`` with ``sqrt(q_s) = (1 - a_s) / z_s``; needs ``a >= 0``."""
    a = as_rep_parameter(a)
    if any(x < 0 for x in a.a):
        raise PreconditionError("the Hecke translation needs a_s >= 0")
    w = tuple(w)
    if ball is None:
        ball = enumerate_ball(system, len(w) + 1)
    q = translation_parameters(a)
    v = np.zeros(len(ball))
    v[0] = 1.0
    for s in reversed(w):
        v = a.a[s] * v + a.z[s] * (left_hecke_operator(system, q, s, ball).matrix @ v)
    return float(v[0])


def character_table(system: CoxeterSystem, a, words: Sequence[Word]) -> dict:
    return {tuple(w): character(system, a, w) for w in words}


def closed_form_character(system: CoxeterSystem, a, w: Word) -> float | None:
    """The closed forms for ``e, s, st, stu`` (any distinct letters) and ``stst``
    (``s, t`` non-commuting); None for other shapes."""
    a = as_rep_parameter(a).a
    w = tuple(w)
    if len(set(w)) == len(w) and len(w) <= 3:
        return math.prod((a[s] for s in w), start=1.0)
    if len(w) == 4 and w[0] == w[2] and w[1] == w[3] and w[0] != w[1]:
        s, t = w[0], w[1]
        if not system.commutes(s, t):
            return a[s] ** 2 + a[t] ** 2 - a[s] ** 2 * a[t] ** 2
    return None


# -- Hecke dictionary ---------------------------------------------------------


def translation_parameters(a) -> tuple:
    """``q_s = ((1 - a_s) / z_s)^2 = (1 - a_s) / (1 + a_s)`` for ``a_s >= 0``."""
    a = as_rep_parameter(a)
    return tuple(((1.0 - x) / z) ** 2 for x, z in zip(a.a, a.z))


@dataclass
class ResidualReport:
    max_residual: float
    violations: list

    def to_json(self) -> dict:
        return {"max_residual": self.max_residual, "violations": [v.to_json() for v in self.violations]}


def hecke_translation_check(system: CoxeterSystem, a, ball: BallBasis, tol: float = 1e-12) -> ResidualReport:
    """Entrywise ``lambda_a(s) = a_s I + z_s T_s`` on interior(1) columns."""
    a = as_rep_parameter(a)
    _check_rank(system, a)
    if any(x < 0 for x in a.a):
        raise PreconditionError("the Hecke translation needs a_s >= 0")
    q = translation_parameters(a)
    cols = ball.interior(1)
    I = sp.identity(len(ball), format="csr")
    worst, bad = 0.0, []
    for s in system.generators:
        lhs = rep_generator(system, a, s, ball).matrix
        rhs = a.a[s] * I + a.z[s] * left_hecke_operator(system, q, s, ball).matrix
        diff = abs(sp.csc_matrix(lhs - rhs)[:, cols])
        err = float(diff.max()) if diff.nnz else 0.0
        worst = max(worst, err)
        if err > tol:
            bad.append(Violation("translation", "*", system.names[s], f"max entry deviation {err:.3e}"))
    return ResidualReport(worst, bad)


def signed_root(a) -> np.ndarray:
    """``sign(a_s) (1 - |a_s|) / z_s``, the signed square root of ``q_s``."""
    a = as_rep_parameter(a)
    av, z = np.asarray(a.a), np.asarray(a.z)
    return np.sign(av) * (1.0 - np.abs(av)) / z


def rep_eigenvector(system: CoxeterSystem, a, eps, ball: BallBasis) -> np.ndarray:
    """Coefficients ``prod_s (eps_s r_s^{eps_s})^{l_s(w)}`` with ``r`` the signed root."""
    a = as_rep_parameter(a)
    if any(x == 0 for x in a.a):
        raise PreconditionError("eigenvectors need a_s != 0 for every s (sign undefined)")
    e = np.asarray(eps, dtype=float)
    lam = e * signed_root(a) ** e
    return np.prod(lam[None, :] ** ball.letter_counts(), axis=1)


def rep_eigenvector_check(system: CoxeterSystem, a, eps, ball: BallBasis, tol: float = 1e-9) -> ResidualReport:
    """``lambda_a(s) eta = eps_s sign(a_s) eta`` on interior(1), relative to ``max |eta|``."""
    a = as_rep_parameter(a)
    _check_rank(system, a)
    eta = rep_eigenvector(system, a, eps, ball)
    mask = ball.interior_mask(1)
    scale = max(1.0, float(np.abs(eta[mask]).max()))
    worst, bad = 0.0, []
    for s in system.generators:
        val = eps[s] * math.copysign(1.0, a.a[s])
        r = rep_generator(system, a, s, ball).matrix @ eta - val * eta
        err = float(np.abs(r[mask]).max()) / scale
        worst = max(worst, err)
        if err > tol:
            bad.append(Violation("rep-eigenvector", "*", system.names[s], f"residual {err:.3e}"))
    return ResidualReport(worst, bad)


# -- separation ---------------------------------------------------------------


def find_distinguishing_word(system: CoxeterSystem, a, b, max_len: int, tol: float = CHARACTER_TOL):
    """First word in (length, ShortLex) order with ``|tau_a(w) - tau_b(w)| > tol``, or None."""
    a, b = as_rep_parameter(a), as_rep_parameter(b)
    _check_rank(system, a)
    _check_rank(system, b)
    for w in enumerate_ball(system, max_len).words:
        if abs(character(system, a, w) - character(system, b, w)) > tol:
            return w
    return None


def sign_character(a, w: Word) -> float:
    """``sigma_a(w) = prod_s sign(a_s)^{l_s(w)}``, taking ``sign(0) = +1``."""
    a = as_rep_parameter(a).a
    return math.prod((-1.0 if a[s] < 0 else 1.0 for s in w), start=1.0)


def convex_combination_test(system: CoxeterSystem, a, b, c: float, d: float, max_len: int) -> dict:
    """``max_w |tau_a - c sigma_a - d sigma_b - (1 - c - d) tau_b|`` over ``|w| <= max_len``."""
    a, b = as_rep_parameter(a), as_rep_parameter(b)
    worst, arg = 0.0, ()
    for w in enumerate_ball(system, max_len).words:
        r = abs(character(system, a, w) - c * sign_character(a, w) - d * sign_character(b, w)
                - (1.0 - c - d) * character(system, b, w))
        if r > worst:
            worst, arg = r, w
    return {"max_residual": worst, "word": system.word_str(arg),
            "note": "sigma_a taken as the one-dimensional character s -> sign(a_s)"}

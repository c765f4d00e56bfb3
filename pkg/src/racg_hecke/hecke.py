"""Hecke operators truncated to a finite ball, Hecke eigenvectors and
central vectors.

On the basis ``delta_w`` the left operator of a generator is

    T_s delta_w = delta_{sw}                  if |sw| > |w|
    T_s delta_w = delta_{sw} + p_s delta_w    if |sw| < |w|

with ``p_s = (q_s - 1) / sqrt(q_s)``.  Right operators are conjugated by the
inversion permutation ``J``.  A column of a generator operator is exact when
``sw`` stays in the ball, i.e. on ``interior(1)``; products of ``k`` such
operators are exact on ``interior(k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
import scipy.sparse as sp

from .coxeter import BallBasis, CoxeterSystem, Word
from .errors import InputError, PreconditionError
from .series import as_parameters
from .surd import rational_sqrt

SVD_RTOL = 1e-8
EXACT_TOL = 1e-12


def hecke_constants(q) -> tuple:
    """``(sqrt(q_s), p_s)`` as float arrays."""
    qa = np.asarray([float(x) for x in as_parameters(q).q])
    root = np.sqrt(qa)
    return root, (qa - 1.0) / root


@dataclass
class TruncatedOperator:
    """A sparse matrix on a ball; columns in ``interior(domain_safe_radius)`` are exact."""

    matrix: sp.csr_matrix
    ball: BallBasis
    domain_safe_radius: int

    def __matmul__(self, other):
        if isinstance(other, TruncatedOperator):
            return TruncatedOperator((self.matrix @ other.matrix).tocsr(), self.ball,
                                     self.domain_safe_radius + other.domain_safe_radius)
        return self.matrix @ other

    def exact_columns(self) -> np.ndarray:
        return self.ball.interior(self.domain_safe_radius)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _check_generator(system: CoxeterSystem, s) -> int:
    return system._check_letter(s)


def left_hecke_operator(system: CoxeterSystem, q, s: int, ball: BallBasis) -> TruncatedOperator:
    s = _check_generator(system, s)
    _, p = hecke_constants(q)
    n = len(ball)
    cols = np.arange(n)
    target = ball.left_table(s)
    inside = target >= 0
    desc = ball.left_descent_mask(s)
    rows = np.concatenate([target[inside], cols[desc]])
    cc = np.concatenate([cols[inside], cols[desc]])
    vals = np.concatenate([np.ones(int(inside.sum())), np.full(int(desc.sum()), p[s])])
    m = sp.csr_matrix((vals, (rows, cc)), shape=(n, n))
    return TruncatedOperator(m, ball, 1)


def inversion_operator(ball: BallBasis) -> sp.csr_matrix:
    """``J delta_w = delta_{w^-1}``."""
    n = len(ball)
    return sp.csr_matrix((np.ones(n), (ball.inverse_permutation, np.arange(n))), shape=(n, n))


def right_hecke_operator(system: CoxeterSystem, q, s: int, ball: BallBasis) -> TruncatedOperator:
    """``J T_s J``: right multiplication ``delta_w -> delta_{ws} (+ p_s delta_w)``."""
    J = inversion_operator(ball)
    left = left_hecke_operator(system, q, s, ball)
    return TruncatedOperator((J @ left.matrix @ J).tocsr(), ball, 1)


def hecke_word_operator(system: CoxeterSystem, q, w: Word, ball: BallBasis) -> TruncatedOperator:
    """``T_w = T_{s_1} ... T_{s_n}`` over the canonical reduced expression."""
    w = tuple(w)
    if not system.is_canonical(w):
        raise InputError(f"word {w} is not canonical")
    out = TruncatedOperator(sp.identity(len(ball), format="csr"), ball, 0)
    for s in w:
        out = out @ left_hecke_operator(system, q, s, ball)
    return out


def _masked_residual(M, cols: np.ndarray) -> float:
    """Largest column norm of ``M`` over the given columns (unit vectors)."""
    if cols.size == 0:
        return 0.0
    sub = sp.csc_matrix(M)[:, cols]
    if sub.nnz == 0:
        return 0.0
    return float(np.sqrt(np.asarray(sub.multiply(sub).sum(axis=0))).max())


def quadratic_residual(system: CoxeterSystem, q, s: int, ball: BallBasis) -> float:
    """``max_v ||(T_s - sqrt q_s)(T_s + 1/sqrt q_s) v||`` over basis vectors of interior(1)."""
    root, _ = hecke_constants(q)
    T = left_hecke_operator(system, q, s, ball).matrix
    I = sp.identity(len(ball), format="csr")
    M = (T - root[s] * I) @ (T + (1.0 / root[s]) * I)
    # exact on interior(1): (T + c) delta_w lies in span{delta_w, delta_sw},
    # and T maps both back into the ball without truncation
    return _masked_residual(M, ball.interior(1))


def commutator_residual(A, B, cols: np.ndarray) -> float:
    return _masked_residual(A @ B - B @ A, cols)


# -- eigenvectors -------------------------------------------------------------


def eigen_weights(q, eps: Sequence[int]) -> np.ndarray:
    """``eps_s q_s^(eps_s / 2)``: the eigenvalue of ``T_s`` on ``eta_eps``."""
    qa = np.asarray([float(x) for x in as_parameters(q).q])
    e = np.asarray(eps, dtype=float)
    return e * qa ** (e / 2.0)


def _check_eps(system: CoxeterSystem, eps) -> tuple:
    eps = tuple(int(e) for e in eps)
    if len(eps) != system.rank or any(e not in (-1, 1) for e in eps):
        raise InputError(f"sign vector must have {system.rank} entries in {{-1, 1}}, got {eps}")
    return eps


def exact_eigen_weights(q, eps) -> list | None:
    """Rational eigen-weights when every ``q_s`` is a rational square, else None."""
    out = []
    for x, e in zip(as_parameters(q).q, eps):
        r = rational_sqrt(Fraction(x))  # floats convert exactly
        if r is None:
            return None
        out.append(r if e == 1 else -1 / r)
    return out


def eigenvector_coeffs(system: CoxeterSystem, q, eps, ball: BallBasis, exact: bool = False):
    """Coefficients of ``eta_eps`` on the ball: ``prod_s (eps_s q_s^(eps_s/2))^{l_s(w)}``.

    The square root of ``q_{w,eps} = prod (eps_s q_s^{eps_s})^{l_s}`` carries its
    sign, which is what the per-letter product yields.  With ``exact=True`` the
    coefficients are Fractions (requires rational square roots of all ``q_s``).
    """
    eps = _check_eps(system, eps)
    counts = ball.letter_counts()
    if exact:
        lam = exact_eigen_weights(q, eps)
        if lam is None:
            raise PreconditionError("exact coefficients need every q_s to be the square of a rational")
        return [math.prod((lam[s] ** int(c) for s, c in enumerate(row)), start=Fraction(1)) for row in counts]
    lam = eigen_weights(q, eps)
    return np.prod(lam[None, :] ** counts, axis=1)


def eigenvector_residual(system: CoxeterSystem, q, eps, s: int, ball: BallBasis) -> float:
    """``max |(T_s eta - lambda_s eta)_w|`` over ``w`` in interior(1), relative to ``max |eta|`` there."""
    eta = eigenvector_coeffs(system, q, eps, ball)
    lam = eigen_weights(q, eps)[s]
    T = left_hecke_operator(system, q, s, ball).matrix
    r = T @ eta - lam * eta
    mask = ball.interior_mask(1)
    scale = max(1.0, float(np.abs(eta[mask]).max()))
    return float(np.abs(r[mask]).max()) / scale


@dataclass
class Violation:
    kind: str
    word: str
    generator: str
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "word": self.word, "generator": self.generator, "detail": self.detail}


def _close(a, b, tol) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def adding_letters_check(system: CoxeterSystem, q, eps, ball: BallBasis, tol: float = EXACT_TOL) -> list:
    """Check the letter-adding identities of ``eta_eps`` on every instance in the ball.

    For ``|sws| = |w| + 2``: ``eta_sw = eta_ws`` and ``eta_sws = eta_w + p_s eta_ws``;
    for ``eps_s = 1`` and ``|sw| > |w|``: ``eta_sw = sqrt(q_s) eta_w``.  Exact in
    rational arithmetic when all ``q_s`` are rational squares.
    """
    eps = _check_eps(system, eps)
    lam = exact_eigen_weights(q, eps)
    if lam is not None:
        eta = eigenvector_coeffs(system, q, eps, ball, exact=True)
        qs = [Fraction(x) for x in as_parameters(q).q]
        root = [rational_sqrt(x) for x in qs]
        p = [(x - 1) / r for x, r in zip(qs, root)]
    else:
        eta = eigenvector_coeffs(system, q, eps, ball)
        root, p = hecke_constants(q)
    out = []
    name = system.word_str
    for s in system.generators:
        L, R = ball.left_table(s), ball.right_table(s)
        for i, w in enumerate(ball.words):
            j = L[i]
            if j < 0 or len(ball.words[j]) < len(w):
                continue
            if eps[s] == 1 and not _close(eta[j], root[s] * eta[i], tol):
                out.append(Violation("eigen-step", name(w), system.names[s],
                                     f"eta_sw={float(eta[j])!r} vs sqrt(q_s) eta_w={float(root[s] * eta[i])!r}"))
            k, m = R[j], R[i]
            if k < 0 or len(ball.words[k]) != len(w) + 2:
                continue
            if not _close(eta[j], eta[m], tol):
                out.append(Violation("sw=ws", name(w), system.names[s],
                                     f"eta_sw={float(eta[j])!r} eta_ws={float(eta[m])!r}"))
            if not _close(eta[k], eta[i] + p[s] * eta[m], tol):
                out.append(Violation("sws", name(w), system.names[s],
                                     f"eta_sws={float(eta[k])!r} vs {float(eta[i] + p[s] * eta[m])!r}"))
    return out


# -- central vectors ----------------------------------------------------------


def central_constraint_pairs(system: CoxeterSystem, ball: BallBasis) -> list:
    """All ``(w, s)`` with ``|sws| = |w| + 2`` and ``sws`` in the ball, as index pairs."""
    out = []
    for s in system.generators:
        L, R = ball.left_table(s), ball.right_table(s)
        sw = L
        ok = sw >= 0
        sws = np.full(len(ball), -1)
        sws[ok] = R[sw[ok]]
        good = (sws >= 0)
        good[good] = ball.lengths[sws[good]] == ball.lengths[good] + 2
        out.extend((int(i), s) for i in np.flatnonzero(good))
    out.sort()
    return out


def central_constraint_matrix(system: CoxeterSystem, q, ball: BallBasis, margin: int = 0) -> sp.csr_matrix:
    """Stacked rows ``xi_sw - xi_ws`` and ``xi_sws - xi_w - p_s xi_sw``, for ``sws`` in interior(margin)."""
    _, p = hecke_constants(q)
    limit = ball.radius - margin
    rows, cols, vals = [], [], []
    r = 0
    for i, s in central_constraint_pairs(system, ball):
        j = ball.left_table(s)[i]
        m = ball.right_table(s)[i]
        k = ball.right_table(s)[j]
        if ball.lengths[k] > limit:
            continue
        if j != m:
            rows += [r, r]
            cols += [j, m]
            vals += [1.0, -1.0]
            r += 1
        rows += [r, r, r]
        cols += [k, i, j]
        vals += [1.0, -1.0, -p[s]]
        r += 1
    return sp.csr_matrix((vals, (rows, cols)), shape=(r, len(ball)))


@dataclass
class CentralSpace:
    """Orthonormal basis (columns) of the null space of the central constraints."""

    basis: np.ndarray
    singular_values: np.ndarray
    cutoff: float
    n_constraints: int
    ball: BallBasis = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def containment_error(self, v) -> float:
        """Relative distance of ``v`` from the span."""
        v = np.asarray(v, dtype=float)
        nv = np.linalg.norm(v)
        if nv == 0:
            return 0.0
        proj = self.basis @ (self.basis.T @ v)
        return float(np.linalg.norm(v - proj) / nv)


def solve_central_space(system: CoxeterSystem, q, ball: BallBasis, margin: int = 1,
                        rtol: float = SVD_RTOL) -> CentralSpace:
    """Null space of the central constraints supported in interior(margin).

    Singular values below ``rtol * sigma_max`` count as zero.  Words that occur
    in no constraint (near the boundary) are unconstrained, so the dimension is
    inflated relative to the infinite group; it is reported, never asserted.
    """
    A = central_constraint_matrix(system, q, ball, margin).toarray()
    n = len(ball)
    if A.shape[0] == 0:
        return CentralSpace(np.eye(n), np.zeros(0), 0.0, 0, ball)
    _, sv, vt = np.linalg.svd(A, full_matrices=True)
    cutoff = rtol * float(sv[0]) if sv.size and sv[0] > 0 else 0.0
    rank = int(np.sum(sv > cutoff))
    return CentralSpace(vt[rank:].T.copy(), sv, cutoff, A.shape[0], ball)


# -- double cosets ------------------------------------------------------------


@dataclass
class DoubleCosetFit:
    a: float
    b: float
    c: float
    residual: float
    points: int
    case: str

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "residual": self.residual,
                "points": self.points, "case": self.case}


def _dihedral_words(s: int, t: int, n: int) -> list:
    out = [()]
    for k in range(1, n + 1):
        out.append(tuple((s, t)[i % 2] for i in range(k)))
        out.append(tuple((t, s)[i % 2] for i in range(k)))
    return out


def double_coset(system: CoxeterSystem, s: int, t: int, w: Word, ball: BallBasis) -> list:
    """Elements ``d w d'`` of ``<s,t> w <s,t>`` lying in the ball (as indices)."""
    w = tuple(w)
    ds = _dihedral_words(s, t, ball.radius)
    seen = set()
    for d in ds:
        left = system.multiply(d, w)
        if len(left) > ball.radius:
            continue
        for d2 in ds:
            x = system.multiply(left, d2)
            if x in ball.index:
                seen.add(ball.index[x])
    return sorted(seen)


def double_coset_form_check(system: CoxeterSystem, q, s: int, t: int, w: Word, xi,
                            ball: BallBasis) -> DoubleCosetFit:
    """Least-squares fit of ``xi`` on ``<s,t> w <s,t>`` against the three profiles.

    Profiles, normalised to 1 at ``w``: ``(q_x/q_w)^{1/2}`` (a), the signed
    profile with ``eps_s=-1, eps_t=+1`` (b) and with ``eps_s=+1, eps_t=-1`` (c).
    Only the cases allowed by the ordering of ``q_s`` and ``q_t`` are fitted.
    """
    s, t = _check_generator(system, s), _check_generator(system, t)
    w = tuple(w)
    if s == t or system.commutes(s, t):
        raise PreconditionError("s and t must be distinct non-commuting generators")
    if w not in ball.index:
        raise PreconditionError(f"{system.word_str(w)} is not in the ball")
    desc = system.left_descents(w) | system.right_descents(w)
    if s in desc or t in desc:
        raise PreconditionError(f"{system.word_str(w)} is not the shortest element of its double coset")
    if all(system.left_multiply(x, w) == system.right_multiply(w, x) for x in (s, t)):
        raise PreconditionError(f"double coset of {system.word_str(w)} is degenerate: s and t commute with it")
    qa = [float(x) for x in as_parameters(q).q]
    xi = np.asarray(xi, dtype=float)
    idx = double_coset(system, s, t, w, ball)
    counts = ball.letter_counts()[idx]
    base = ball.letter_counts()[ball.index[w]]
    dls, dlt = counts[:, s] - base[s], counts[:, t] - base[t]

    def profile(es, et):
        return (es ** dls) * qa[s] ** (es * dls / 2.0) * (et ** dlt) * qa[t] ** (et * dlt / 2.0)

    cols = {"a": profile(1, 1), "b": profile(-1, 1), "c": profile(1, -1)}
    if qa[s] < qa[t]:
        use, case = ["a", "c"], "q_s<q_t"
    elif qa[s] > qa[t]:
        use, case = ["a", "b"], "q_s>q_t"
    else:
        use, case = ["a"], "q_s=q_t"
    M = np.column_stack([cols[k] for k in use])
    y = xi[idx]
    coef, *_ = np.linalg.lstsq(M, y, rcond=None)
    res = float(np.abs(M @ coef - y).max()) if len(idx) else 0.0
    got = dict(zip(use, coef.tolist()))
    return DoubleCosetFit(got.get("a", 0.0), got.get("b", 0.0), got.get("c", 0.0), res, len(idx), case)


# -- fundamental solutions ----------------------------------------------------


def fundamental_solutions(q_s, q_t, n: int) -> list:
    """The four pairs ``(g1(n), g2(n))`` solving the dihedral recurrences, in mpmath."""
    qs, qt, n = mpmath.mpf(q_s), mpmath.mpf(q_t), mpmath.mpf(n)
    sign = -1 if int(n) % 2 else 1
    half = mpmath.mpf(1) / 2
    return [
        (qs ** (n * half) * qt ** (n * half), qs ** (n * half) * qt ** ((n + 1) * half)),
        (sign * qs ** (-n * half) * qt ** (n * half), sign * qs ** (-n * half) * qt ** ((n + 1) * half)),
        (sign * qs ** (n * half) * qt ** (-n * half), -sign * qs ** (n * half) * qt ** (-(n + 1) * half)),
        (qs ** (-n * half) * qt ** (-n * half), -qs ** (-n * half) * qt ** (-(n + 1) * half)),
    ]


@dataclass
class RecurrenceReport:
    max_abs_residual: float
    max_rel_residual: float
    violations: list

    def to_json(self) -> dict:
        return {"max_abs_residual": self.max_abs_residual, "max_rel_residual": self.max_rel_residual,
                "violations": self.violations}


def fundamental_solution_check(q_s, q_t, n_max: int = 20, tol: float = EXACT_TOL, dps: int = 50) -> RecurrenceReport:
    """Evaluate both recurrences for all four solutions, ``n = 0..n_max``.

    ``g1(n+2) = g1(n) + p_s g2(n+1) + p_t g2(n)`` and
    ``g2(n+2) = g2(n) + p_t g1(n+2) + p_s g1(n+1)``.  The values span many
    orders of magnitude (``q^{-n/2}``), so the arithmetic runs at ``dps``
    decimal digits and the absolute residual is compared with ``tol``.
    """
    if not (0 < q_s <= 1 and 0 < q_t <= 1):
        raise InputError("q_s and q_t must lie in (0, 1]")
    with mpmath.workdps(dps):
        qs, qt = mpmath.mpf(q_s), mpmath.mpf(q_t)
        ps, pt = (qs - 1) / mpmath.sqrt(qs), (qt - 1) / mpmath.sqrt(qt)
        table = [fundamental_solutions(q_s, q_t, n) for n in range(n_max + 3)]
        worst_abs = mpmath.mpf(0)
        worst_rel = mpmath.mpf(0)
        bad = []
        for k in range(4):
            for n in range(n_max + 1):
                g1 = [table[n + i][k][0] for i in range(3)]
                g2 = [table[n + i][k][1] for i in range(3)]
                r1 = g1[2] - (g1[0] + ps * g2[1] + pt * g2[0])
                r2 = g2[2] - (g2[0] + pt * g1[2] + ps * g1[1])
                for label, r, ref in (("g1", r1, g1[2]), ("g2", r2, g2[2])):
                    a = abs(r)
                    rel = a / max(mpmath.mpf(1), abs(ref))
                    worst_abs, worst_rel = max(worst_abs, a), max(worst_rel, rel)
                    if a > tol:
                        bad.append({"solution": k + 1, "n": n, "recurrence": label, "residual": float(a)})
    return RecurrenceReport(float(worst_abs), float(worst_rel), bad)


def first_solution_identity(q_s, q_t) -> bool:
    """``1 + (q_s - 1) q_t + (q_t - 1) == q_s q_t`` in exact rational arithmetic.

    This is the recurrence for the first solution at ``n = 0`` after clearing
    the square roots.
    """
    qs, qt = Fraction(q_s), Fraction(q_t)
    return 1 + (qs - 1) * qt + (qt - 1) == qs * qt

"""Iwahori-Hecke algebras of right-angled buildings, in exact arithmetic.

A building of type ``(W, S)`` with thickness ``d_s`` (each ``s``-panel has
``d_s`` chambers) is represented only through its Bruhat cells ``BwB``,
indexed by ``w`` in ``W``.  The convolution algebra of B-biinvariant functions
is determined by

    1_{BsB} 1_{BwB} = 1_{BswB}                               if |sw| > |w|
    1_{BsB} 1_{BwB} = (d_s - 1) 1_{BwB} + d_s 1_{BswB}        if |sw| < |w|

and ``T_w -> (-1)^{|w|} sqrt(q_w) 1_{BwB}`` with ``q_s = 1/d_s`` is an
isomorphism from the Hecke algebra.  Coefficients are Fractions or
:class:`~racg_hecke.surd.Surd` values; no floating point is involved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .coxeter import BallBasis, CoxeterSystem, Word, enumerate_ball
from .errors import BallOverflowError, InputError, ThicknessError
from .series import ParameterVector, c_sets_with_verdicts, check_factoriality_hypotheses, DEFAULT_MAX_LEN
from .surd import Surd


@dataclass(frozen=True)
class Thickness:
    d: tuple

    def __post_init__(self):
        d = tuple(self.d)
        for x in d:
            if isinstance(x, bool) or int(x) != x:
                raise ThicknessError(f"thickness entries must be integers, got {x!r}")
            if x < 2:
                raise ThicknessError(f"thickness entries must be at least 2, got {x}")
        object.__setattr__(self, "d", tuple(int(x) for x in d))

    def __len__(self):
        return len(self.d)

    @property
    def constant(self) -> bool:
        return len(set(self.d)) <= 1


def as_thickness(d) -> Thickness:
    return d if isinstance(d, Thickness) else Thickness(tuple(d))


def thickness_to_parameters(d) -> ParameterVector:
    """``q_s = 1 / d_s`` as exact Fractions."""
    return ParameterVector(tuple(Fraction(1, x) for x in as_thickness(d).d))


class IwahoriElement:
    """A finite combination ``sum_w c_w 1_{BwB}`` with exact coefficients."""

    __slots__ = ("support",)

    def __init__(self, support=None):
        self.support = {tuple(w): c for w, c in (support or {}).items() if c != 0}

    @classmethod
    def cell(cls, w: Word, coeff=1) -> "IwahoriElement":
        return cls({tuple(w): coeff})

    def __add__(self, other):
        out = dict(self.support)
        for w, c in other.support.items():
            out[w] = out.get(w, 0) + c
        return IwahoriElement(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, k) -> "IwahoriElement":
        return IwahoriElement({w: c * k for w, c in self.support.items()})

    def __eq__(self, other):
        if not isinstance(other, IwahoriElement):
            return NotImplemented
        return self.support == other.support

    def __repr__(self):
        return f"IwahoriElement({self.support!r})"

    def coefficient(self, w: Word):
        return self.support.get(tuple(w), 0)

    def to_json(self, system: CoxeterSystem) -> dict:
        return {system.word_str(w): str(c) for w, c in sorted(self.support.items(), key=lambda kv: (len(kv[0]), kv[0]))}


def _radius(ball) -> int:
    return ball.radius if isinstance(ball, BallBasis) else int(ball)


def _cell_left(system: CoxeterSystem, d: Thickness, s: int, x: IwahoriElement, radius: int) -> IwahoriElement:
    out: dict = {}
    for w, c in x.support.items():
        sw = system.left_multiply(s, w)
        if len(sw) > radius:
            raise BallOverflowError(f"product leaves the ball of radius {radius} at {system.word_str(sw)}", sw)
        if len(sw) > len(w):
            out[sw] = out.get(sw, 0) + c
        else:
            out[w] = out.get(w, 0) + c * (d.d[s] - 1)
            out[sw] = out.get(sw, 0) + c * d.d[s]
    return IwahoriElement(out)


def iwahori_product(system: CoxeterSystem, d, x: IwahoriElement, y: IwahoriElement, ball) -> IwahoriElement:
    """Convolution product, expanding each ``1_{BuB}`` of ``x`` letter by letter.

    ``ball`` is a :class:`BallBasis` or a radius; a support word longer than
    the radius raises :class:`BallOverflowError`.
    """
    d = as_thickness(d)
    if len(d) != system.rank:
        raise InputError(f"expected {system.rank} thickness entries, got {len(d)}")
    radius = _radius(ball)
    for w in itertools.chain(x.support, y.support):
        if len(w) > radius:
            raise BallOverflowError(f"factor support {system.word_str(w)} is outside the ball", w)
    out = IwahoriElement()
    for u, cu in x.support.items():
        # 1_{BuB} = 1_{Bs_1B} ... 1_{Bs_nB} for a reduced expression u = s_1 ... s_n
        part = y
        for s in reversed(u):
            part = _cell_left(system, d, s, part, radius)
        out = out + part.scale(cu)
    return out


def sqrt_q(d: Thickness, w: Word) -> Surd:
    """``sqrt(q_w) = prod_s d_s^{-l_s(w)/2}`` exactly."""
    out = Surd.rational(1)
    for s in w:
        out = out * Surd.sqrt(Fraction(1, d.d[s]))
    return out


def phi_isomorphism(system: CoxeterSystem, d, w: Word) -> IwahoriElement:
    """Image of ``T_w``: ``(-1)^{|w|} sqrt(q_w) 1_{BwB}``."""
    d = as_thickness(d)
    w = tuple(w)
    if not system.is_canonical(w):
        raise InputError(f"word {w} is not canonical")
    coeff = sqrt_q(d, w) * (-1 if len(w) % 2 else 1)
    return IwahoriElement.cell(w, coeff)


def phi_of(system: CoxeterSystem, d, element: dict) -> IwahoriElement:
    """Image of ``sum_w c_w T_w`` given as ``{w: c_w}``."""
    out = IwahoriElement()
    for w, c in element.items():
        out = out + phi_isomorphism(system, d, w).scale(c)
    return out


def hecke_left_product(system: CoxeterSystem, d, s: int, element: dict) -> dict:
    """``T_s * sum_w c_w T_w`` in the abstract Hecke algebra with ``q_s = 1/d_s``.

    ``T_s T_w = T_{sw}`` if ``|sw| > |w|`` and ``T_{sw} + p_s T_w`` otherwise,
    ``p_s = (q_s - 1) / sqrt(q_s)``.
    """
    d = as_thickness(d)
    q = Fraction(1, d.d[s])
    p = Surd.rational(q - 1) / Surd.sqrt(q)
    out: dict = {}
    for w, c in element.items():
        sw = system.left_multiply(s, w)
        out[sw] = out.get(sw, 0) + c
        if len(sw) < len(w):
            out[w] = out.get(w, 0) + p * c
    return {w: c for w, c in out.items() if c != 0}


@dataclass
class IwahoriReport:
    checked: int
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"checked": self.checked, "violations": self.violations}


def iwahori_check(system: CoxeterSystem, d, radius: int = 5) -> IwahoriReport:
    """Verify the isomorphism and the structure constants on a ball, exactly.

    * ``phi(T_s) phi(T_w) = phi(T_s T_w)`` for every ``s`` and ``w`` with ``sw``
      in the ball (both length-increasing and length-decreasing cases);
    * ``1_{BsB}^2 = (d_s - 1) 1_{BsB} + d_s 1_B`` and
      ``phi(T_s)^2 = phi(p_s T_s + 1)``;
    * the coefficient of ``1_B`` in ``1_{BwB} 1_{Bw^-1 B}`` is positive.
    """
    d = as_thickness(d)
    ball = enumerate_ball(system, radius)
    bad, checked = [], 0
    name = system.word_str
    for s in system.generators:
        phis = phi_isomorphism(system, d, (s,))
        for w in ball.words:
            sw = system.left_multiply(s, w)
            if len(sw) > radius:
                continue
            lhs = iwahori_product(system, d, phis, phi_isomorphism(system, d, w), radius)
            rhs = phi_of(system, d, hecke_left_product(system, d, s, {w: 1}))
            checked += 1
            if lhs != rhs:
                bad.append({"kind": "homomorphism", "generator": system.names[s], "word": name(w)})
        cell = IwahoriElement.cell((s,))
        sq = iwahori_product(system, d, cell, cell, radius)
        want = cell.scale(d.d[s] - 1) + IwahoriElement.cell((), d.d[s])
        checked += 1
        if sq != want:
            bad.append({"kind": "quadratic", "generator": system.names[s], "got": sq.to_json(system)})
        checked += 1
        if iwahori_product(system, d, phis, phis, radius) != phi_of(system, d, hecke_left_product(system, d, s, {(s,): 1})):
            bad.append({"kind": "quadratic-transport", "generator": system.names[s]})
    for w in ball.words:
        if 2 * len(w) > radius:
            break
        prod = iwahori_product(system, d, IwahoriElement.cell(w), IwahoriElement.cell(system.inverse(w)), radius)
        checked += 1
        if not prod.coefficient(()) > 0:
            bad.append({"kind": "positivity", "word": name(w), "value": str(prod.coefficient(()))})
    return IwahoriReport(checked, bad)


# -- spherical representations ------------------------------------------------


def example_family_verdict(system: CoxeterSystem, d) -> dict | None:
    """Closed-form summability of ``sum_w q_w`` for the three worked families.

    Recognises ``(Z/2)^2 * Z/2`` (one commuting pair), ``(Z/2)^2 * (Z/2)^2``
    (two disjoint commuting pairs) and the free product ``(Z/2)^{*k}`` with
    constant thickness.  Exact rational arithmetic; None for other shapes.
    """
    d = as_thickness(d)
    q = [Fraction(1, x) for x in d.d]
    pairs = sorted(system.commuting)
    n = system.rank
    if n == 3 and len(pairs) == 1:
        s, t = pairs[0]
        (u,) = set(range(3)) - {s, t}
        value = q[u] * ((1 + q[s]) * (1 + q[t]) - 1)
        return {"family": "(Z/2)^2 * Z/2", "criterion": "q_u((1+q_s)(1+q_t)-1) < 1",
                "value": str(value), "summable": value < 1}
    if n == 4 and len(pairs) == 2 and not set(pairs[0]) & set(pairs[1]):
        (s, t), (u, v) = pairs
        value = ((1 + q[s]) * (1 + q[t]) - 1) * ((1 + q[u]) * (1 + q[v]) - 1)
        return {"family": "(Z/2)^2 * (Z/2)^2",
                "criterion": "((1+d_s)(1+d_t)/(d_s d_t) - 1)((1+d_u)(1+d_v)/(d_u d_v) - 1) < 1",
                "value": str(value), "summable": value < 1}
    if not pairs and n >= 2 and d.constant:
        return {"family": f"Z/2^*{n}", "criterion": "d > k - 1", "value": str(d.d[0]),
                "summable": d.d[0] > n - 1}
    return None


@dataclass
class SphericalReport:
    thickness: tuple
    q: tuple
    C: list
    names: tuple
    constant_thickness_note: str | None
    example: dict | None
    warnings: list

    @property
    def decomposition(self) -> list:
        parts = ["type II_inf factor representation"]
        for e in self.C:
            parts.append("St_" + "(" + ",".join(f"{n}:{'+' if x > 0 else '-'}" for n, x in zip(self.names, e)) + ")")
        return parts

    @property
    def has_steinberg(self) -> bool:
        return bool(self.C)

    def to_json(self) -> dict:
        return {
            "thickness": dict(zip(self.names, self.thickness)),
            "q": {n: str(x) for n, x in zip(self.names, self.q)},
            "r": 2,
            "C": [{n: int(x) for n, x in zip(self.names, e)} for e in self.C],
            "decomposition": self.decomposition,
            "factor": not self.C,
            "constant_thickness_note": self.constant_thickness_note,
            "example_family": self.example,
            "warnings": list(self.warnings),
        }


def spherical_report(system: CoxeterSystem, d, max_len: int | None = None) -> SphericalReport:
    """Decomposition of the Iwahori quasi-regular representation.

    The set C is taken at exponent ``r/2`` with ``r = 2``.  When C is empty the
    representation is a type II_inf factor; otherwise one Steinberg summand
    appears per ``eps`` in C.
    """
    check_factoriality_hypotheses(system)
    d = as_thickness(d)
    if len(d) != system.rank:
        raise InputError(f"expected {system.rank} thickness entries, got {len(d)}")
    q = thickness_to_parameters(d)
    C, _, verdicts, _ = c_sets_with_verdicts(system, q, 2.0, max_len or DEFAULT_MAX_LEN)
    warnings = ["the set C uses exponent r/2 with r fixed to 2 (Hilbert space case)"]
    for e, v in verdicts.items():
        if v is not None and v.boundary:
            warnings.append(f"eps={dict(zip(system.names, e))} inconclusive-boundary; " + "; ".join(v.notes))
    note = None
    if d.constant:
        note = "constant thickness: the K-spherical quasi-regular representation is also a type II_inf factor"
    example = example_family_verdict(system, d)
    if example is not None and example["summable"] != ((1,) * system.rank in C):
        warnings.append("closed-form family criterion disagrees with the computed set C")
    return SphericalReport(d.d, q.q, C, system.names, note, example, warnings)

"""Exact arithmetic in the span of square roots of rationals.

A :class:`Surd` is a finite sum ``sum_n c_n * sqrt(n)`` with rational ``c_n``
and distinct squarefree positive integers ``n``.  Square roots of squarefree
integers are linearly independent over Q, so this representation is unique
and equality is structural.  It is closed under addition and multiplication,
which is all that square roots of products of Hecke parameters require.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational


def _squarefree_split(n: int) -> tuple:
    """``n = k^2 * m`` with ``m`` squarefree; returns ``(k, m)``."""
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    k, m, p = 1, 1, 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            m *= p
        p += 1 if p == 2 else 2
    return k, m * n


def rational_sqrt(x) -> Fraction | None:
    """The exact square root of a non-negative rational, or None if irrational."""
    x = Fraction(x)
    if x < 0:
        return None
    a, b = x.numerator, x.denominator
    ra, rb = math.isqrt(a), math.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


class Surd:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for n, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[int(n)] = clean.get(int(n), Fraction(0)) + c
        self.terms = {n: c for n, c in clean.items() if c}

    @classmethod
    def rational(cls, x) -> "Surd":
        return cls({1: Fraction(x)})

    @classmethod
    def sqrt(cls, x) -> "Surd":
        """``sqrt(x)`` for a non-negative rational ``x``."""
        x = Fraction(x)
        if x < 0:
            raise ValueError("square root of a negative rational")
        if x == 0:
            return cls()
        # sqrt(a/b) = sqrt(a b) / b
        k, m = _squarefree_split(x.numerator * x.denominator)
        return cls({m: Fraction(k, x.denominator)})

    @staticmethod
    def _coerce(other):
        if isinstance(other, Surd):
            return other
        if isinstance(other, (int, Rational)):
            return Surd.rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for n, c in other.terms.items():
            out[n] = out.get(n, Fraction(0)) + c
        return Surd(out)

    __radd__ = __add__

    def __neg__(self):
        return Surd({n: -c for n, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                g = math.gcd(a, b)
                n = (a // g) * (b // g)
                out[n] = out.get(n, Fraction(0)) + ca * cb * g
        return Surd(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) != 1:
            raise ZeroDivisionError("division only by a single nonzero term") if not other.terms \
                else NotImplementedError("division by a sum of surds")
        (n, c), = other.terms.items()
        # 1 / (c sqrt(n)) = sqrt(n) / (c n)
        return self * Surd({n: 1 / (c * n)})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        out, base = Surd.rational(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __float__(self):
        return float(sum(float(c) * math.sqrt(n) for n, c in self.terms.items()))

    def is_rational(self) -> bool:
        return set(self.terms) <= {1}

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.terms.get(1, Fraction(0))

    def __repr__(self):
        if not self.terms:
            return "Surd(0)"
        return f"Surd({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for n in sorted(self.terms):
            c = self.terms[n]
            parts.append(str(c) if n == 1 else f"{c}*sqrt({n})")
        return " + ".join(parts)

"""Word arithmetic for right-angled Coxeter systems.

Elements are stored as canonical words: the ShortLex-least reduced expression
with respect to the generator order (generator ``i`` is the letter ``i``).
Canonical words are plain tuples of ints, so equality of group elements is
equality of tuples and words can be used directly as dict keys.

The normal form is maintained by appending one letter at a time.  Appending
``s`` to a canonical word ``w`` either cancels the last occurrence of ``s``
that every later letter commutes with, or inserts ``s`` at the leftmost
position, at or after the point where ``s`` stops commuting with the suffix,
at which it precedes a larger letter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, InputError

Word = tuple  # canonical tuple of generator indices

DEFAULT_BALL_CAP = 10**7


@dataclass(frozen=True)
class LetterStatistics:
    s_length: dict
    s_position: dict


@dataclass(frozen=True)
class CoxeterSystem:
    """A right-angled Coxeter system.

    ``names[i]`` is the label of generator ``i``; the index order is the
    ShortLex letter order.  ``commuting`` holds the pairs ``(i, j)``, ``i < j``,
    with ``m_ij = 2``; every other pair of distinct generators is free.
    """

    names: tuple
    commuting: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        if len(set(names)) != len(names):
            raise InputError(f"generator names must be unique: {names}")
        pairs = set()
        for pair in self.commuting:
            i, j = (int(x) for x in pair)
            if i == j:
                raise InputError(f"generator {names[i] if 0 <= i < len(names) else i} cannot commute with itself")
            if not (0 <= i < len(names) and 0 <= j < len(names)):
                raise InputError(f"commuting pair {pair!r} references an unknown generator")
            pairs.add((min(i, j), max(i, j)))
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "commuting", frozenset(pairs))
        masks = [0] * len(names)
        for i, j in pairs:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        object.__setattr__(self, "_comm", tuple(masks))

    # -- construction -------------------------------------------------------

    @classmethod
    def from_names(cls, names: Sequence[str], commuting: Iterable[Sequence[str]] = ()):
        pos = {str(n): i for i, n in enumerate(names)}
        pairs = []
        for pair in commuting:
            if len(pair) != 2:
                raise InputError(f"commuting entries must be pairs, got {pair!r}")
            try:
                pairs.append((pos[str(pair[0])], pos[str(pair[1])]))
            except KeyError as exc:
                raise InputError(f"unknown generator {exc.args[0]!r} in commuting pair") from None
        return cls(tuple(names), frozenset(pairs))

    @classmethod
    def from_json(cls, data: dict):
        if "generators" not in data:
            raise InputError("system JSON needs a 'generators' list")
        return cls.from_names(data["generators"], data.get("commuting", []))

    def to_json(self) -> dict:
        return {
            "generators": list(self.names),
            "commuting": [[self.names[i], self.names[j]] for i, j in sorted(self.commuting)],
        }

    @classmethod
    def free_product(cls, k: int):
        """``Z/2 * ... * Z/2`` with ``k`` factors."""
        return cls(tuple(f"s{i}" for i in range(k)))

    @classmethod
    def from_commuting_blocks(cls, blocks: Sequence[int]):
        """Free product of elementary abelian groups ``(Z/2)^b`` for b in blocks."""
        names, pairs, start = [], set(), 0
        for b in blocks:
            idx = range(start, start + b)
            names.extend(f"s{i}" for i in idx)
            pairs.update(itertools.combinations(idx, 2))
            start += b
        return cls(tuple(names), frozenset(pairs))

    # -- structure ----------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def generators(self) -> range:
        return range(len(self.names))

    def commutes(self, s: int, t: int) -> bool:
        return bool(self._comm[s] >> t & 1)

    def commute_mask(self, s: int) -> int:
        return self._comm[s]

    def coxeter_graph_edges(self) -> list:
        """Edges of the Coxeter graph, i.e. the non-commuting pairs."""
        return [(i, j) for i, j in itertools.combinations(self.generators, 2) if not self.commutes(i, j)]

    def is_irreducible(self) -> bool:
        n = self.rank
        if n == 0:
            return False
        seen, stack = {0}, [0]
        while stack:
            s = stack.pop()
            for t in range(n):
                if t != s and t not in seen and not self.commutes(s, t):
                    seen.add(t)
                    stack.append(t)
        return len(seen) == n

    def is_finite(self) -> bool:
        """True iff all generators pairwise commute."""
        return len(self.commuting) == self.rank * (self.rank - 1) // 2

    def commuting_cliques(self, cap: int | None = None) -> list:
        """All cliques (including the empty one) of the commuting graph.

        Cliques of the commuting graph are exactly the spherical subsets of S.
        Enumerated by Bron-Kerbosch; each clique is a sorted tuple.
        """
        if cap is not None and self.rank > cap:
            raise CapacityError(f"clique enumeration refused: {self.rank} generators exceed cap {cap}")
        out = [()]

        def extend(clique, candidates):
            for k, v in enumerate(candidates):
                new = clique + (v,)
                out.append(new)
                extend(new, [u for u in candidates[k + 1:] if self.commutes(u, v)])

        extend((), list(self.generators))
        return out

    def letter_name(self, s: int) -> str:
        return self.names[s]

    def word_str(self, w: Sequence[int]) -> str:
        if not w:
            return "e"
        return "".join(self.names[s] for s in w) if all(len(n) == 1 for n in self.names) \
            else ".".join(self.names[s] for s in w)

    def parse_word(self, text: str) -> Word:
        """Parse ``"e"``, ``"s.t.u"`` or (single-character names) ``"stu"``."""
        text = text.strip()
        if text in ("", "e"):
            return ()
        pos = {n: i for i, n in enumerate(self.names)}
        tokens = text.split(".") if "." in text or not all(len(n) == 1 for n in self.names) else list(text)
        try:
            return self.normalize(pos[t] for t in tokens)
        except KeyError as exc:
            raise InputError(f"unknown generator {exc.args[0]!r} in word {text!r}") from None

    # -- word arithmetic ----------------------------------------------------

    def _check_letter(self, s) -> int:
        if not isinstance(s, (int, np.integer)) or not 0 <= s < self.rank:
            raise InputError(f"unknown generator index {s!r}")
        return int(s)

    def _append(self, w: list, s: int) -> None:
        # in place: w <- canonical(w s)
        comm = self._comm[s]
        p = len(w)
        while p > 0:
            x = w[p - 1]
            if x == s:
                del w[p - 1]
                return
            if not comm >> x & 1:
                break
            p -= 1
        while p < len(w) and w[p] < s:
            p += 1
        w.insert(p, s)

    def normalize(self, raw: Iterable[int]) -> Word:
        # _append inlined: this is the hot loop
        comms, n = self._comm, len(self.names)
        w: list = []
        for s in raw:
            if s.__class__ is not int or not 0 <= s < n:
                s = self._check_letter(s)
            comm = comms[s]
            p = len(w)
            cancelled = False
            while p:
                x = w[p - 1]
                if x == s:
                    del w[p - 1]
                    cancelled = True
                    break
                if not comm >> x & 1:
                    break
                p -= 1
            if cancelled:
                continue
            while p < len(w) and w[p] < s:
                p += 1
            w.insert(p, s)
        return tuple(w)

    def multiply(self, a: Word, b: Word) -> Word:
        w = list(a)
        for s in b:
            self._append(w, self._check_letter(s))
        return tuple(w)

    def right_multiply(self, w: Word, s: int) -> Word:
        out = list(w)
        self._append(out, self._check_letter(s))
        return tuple(out)

    def left_multiply(self, s: int, w: Word) -> Word:
        return self.normalize((s,) + tuple(w))

    def inverse(self, a: Word) -> Word:
        return self.normalize(reversed(a))

    def is_canonical(self, raw: Sequence[int]) -> bool:
        return self.normalize(raw) == tuple(raw)

    def statistics(self, a: Word) -> LetterStatistics:
        counts = {s: 0 for s in self.generators}
        positions = {}
        for i, s in enumerate(a):
            counts[s] += 1
            if s not in positions:
                positions[s] = self._min_position(a, i)
        return LetterStatistics(counts, positions)

    def _min_position(self, a: Word, i: int) -> int:
        # 1 + number of letters that must precede a[i] in every reduced expression
        need = 1 << a[i]
        before = 0
        for j in range(i - 1, -1, -1):
            x = a[j]
            if need & ~self._comm[x]:
                need |= 1 << x
                before += 1
        return before + 1

    def left_descents(self, a: Word) -> frozenset:
        out, blocked = set(), 0
        for x in a:
            if not blocked >> x & 1 and x not in out:
                out.add(x)
            blocked |= ~self._comm[x]
        return frozenset(out)

    def right_descents(self, a: Word) -> frozenset:
        out, blocked = set(), 0
        for x in reversed(a):
            if not blocked >> x & 1 and x not in out:
                out.add(x)
            blocked |= ~self._comm[x]
        return frozenset(out)

    def descent_sets(self, a: Word) -> tuple:
        return self.left_descents(a), self.right_descents(a)


def shortlex_key(w: Sequence[int]) -> tuple:
    return (len(w), tuple(w))


class BallBasis:
    """The canonical words of length at most ``radius``, in ShortLex order.

    Multiplication tables are computed lazily; entries pointing outside the
    ball are ``-1``.
    """

    def __init__(self, system: CoxeterSystem, words: list, radius: int):
        self.system = system
        self.words = words
        self.radius = radius
        self.index = {w: i for i, w in enumerate(words)}
        self.lengths = np.fromiter((len(w) for w in words), dtype=np.int64, count=len(words))
        self._left: dict = {}
        self._right: dict = {}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, w) -> bool:
        return tuple(w) in self.index

    def __iter__(self):
        return iter(self.words)

    def sphere(self, n: int) -> list:
        return [w for w in self.words if len(w) == n]

    def sphere_sizes(self) -> list:
        return np.bincount(self.lengths, minlength=self.radius + 1).tolist()

    def interior(self, k: int = 0) -> np.ndarray:
        """Indices of the words of length at most ``radius - k``."""
        return np.flatnonzero(self.lengths <= self.radius - k)

    def interior_mask(self, k: int = 0) -> np.ndarray:
        return self.lengths <= self.radius - k

    def left_table(self, s: int) -> np.ndarray:
        """``out[i]`` is the index of ``s * words[i]`` or -1."""
        if s not in self._left:
            sys_, idx = self.system, self.index
            self._left[s] = np.fromiter(
                (idx.get(sys_.left_multiply(s, w), -1) for w in self.words), dtype=np.int64, count=len(self))
        return self._left[s]

    def right_table(self, s: int) -> np.ndarray:
        if s not in self._right:
            sys_, idx = self.system, self.index
            self._right[s] = np.fromiter(
                (idx.get(sys_.right_multiply(w, s), -1) for w in self.words), dtype=np.int64, count=len(self))
        return self._right[s]

    def left_descent_mask(self, s: int) -> np.ndarray:
        """True where ``|s w| < |w|``."""
        table = self.left_table(s)
        out = np.zeros(len(self), dtype=bool)
        ok = table >= 0
        out[ok] = self.lengths[table[ok]] < self.lengths[ok]
        # s w outside the ball means |s w| = radius + 1 > |w|
        return out

    def right_descent_mask(self, s: int) -> np.ndarray:
        table = self.right_table(s)
        out = np.zeros(len(self), dtype=bool)
        ok = table >= 0
        out[ok] = self.lengths[table[ok]] < self.lengths[ok]
        return out

    @cached_property
    def inverse_permutation(self) -> np.ndarray:
        """``out[i]`` is the index of ``words[i]^-1`` (balls are inverse closed)."""
        inv = self.system.inverse
        return np.fromiter((self.index[inv(w)] for w in self.words), dtype=np.int64, count=len(self))

    def letter_counts(self) -> np.ndarray:
        """Matrix of s-lengths, shape ``(len(ball), rank)``."""
        out = np.zeros((len(self), self.system.rank), dtype=np.int64)
        for i, w in enumerate(self.words):
            for s in w:
                out[i, s] += 1
        return out


def enumerate_ball(system: CoxeterSystem, radius: int, cap: int = DEFAULT_BALL_CAP) -> BallBasis:
    """Breadth-first enumeration of all elements of length at most ``radius``.

    Refuses (``CapacityError``) as soon as the extrapolated ball size exceeds
    ``cap``; spheres are extrapolated geometrically from the last two sizes.
    """
    if radius < 0:
        raise InputError(f"radius must be non-negative, got {radius}")
    words = [()]
    sphere = [()]
    prev_size = 1
    total = 1
    for n in range(radius):
        if n > 0:
            growth = len(sphere) / prev_size
            estimate = total + sum(len(sphere) * growth**k for k in range(1, radius - n + 1))
            if estimate > cap:
                raise CapacityError(
                    f"ball of radius {radius} estimated at {int(estimate)} elements, above cap {cap}")
        nxt = set()
        for w in sphere:
            rd = system.right_descents(w)
            for s in system.generators:
                if s not in rd:
                    nxt.add(system.right_multiply(w, s))
        prev_size = len(sphere)
        sphere = sorted(nxt)
        total += len(sphere)
        if total > cap:
            raise CapacityError(f"ball of radius {radius} exceeds cap {cap}")
        words.extend(sphere)
        if not sphere:
            break
    return BallBasis(system, words, radius)

"""Hypothesis strategies for small right-angled Coxeter systems."""

import itertools

from hypothesis import strategies as st

from racg_hecke import CoxeterSystem


@st.composite
def systems(draw, min_rank=1, max_rank=4):
    n = draw(st.integers(min_rank, max_rank))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return CoxeterSystem(tuple("stuvwxyz"[:n]), frozenset(chosen))


@st.composite
def irreducible_systems(draw, min_rank=3, max_rank=4):
    S = draw(systems(min_rank, max_rank).filter(lambda S: S.is_irreducible()))
    return S


@st.composite
def system_and_word(draw, max_rank=4, max_len=8):
    S = draw(systems(1, max_rank))
    w = draw(st.lists(st.integers(0, S.rank - 1), max_size=max_len))
    return S, tuple(w)


@st.composite
def system_and_words(draw, k=2, max_rank=4, max_len=6):
    S = draw(systems(1, max_rank))
    ws = [tuple(draw(st.lists(st.integers(0, S.rank - 1), max_size=max_len))) for _ in range(k)]
    return (S, *ws)

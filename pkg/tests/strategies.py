"""Stratégies hypothesis partagées."""

from __future__ import annotations

from hypothesis import strategies as st

from superloc.exact import cq
from superloc.qrep import CSRep

LAMBDAS = ["1+2i", "1-2i", "-1+2i", "-1-2i", "3i", "-3i", "2", "5i"]


def gaussians(bound: int = 4):
    return st.builds(cq, st.integers(-bound, bound), st.integers(-bound, bound))


@st.composite
def super_functions(draw, blocks: int = 1, parity: int | None = None, envelope=None, max_terms: int = 3, max_power: int = 2):
    from superloc.superalg import SuperFunction

    masks = st.integers(0, (1 << (2 * blocks)) - 1)
    if parity is not None:
        masks = masks.filter(lambda o: bin(o).count("1") % 2 == parity)
    terms = []
    for _ in range(draw(st.integers(0, max_terms))):
        even = draw(st.lists(st.integers(0, max_power), min_size=2 * blocks, max_size=2 * blocks))
        terms.append((draw(gaussians()), even, draw(masks)))
    return SuperFunction(blocks, terms, envelope if envelope is not None else [0] * blocks)


@st.composite
def reps(draw, min_blocks: int = 1, max_blocks: int = 3, flips: bool = False):
    m = draw(st.integers(min_blocks, max_blocks))
    lambdas = draw(st.lists(st.sampled_from(LAMBDAS), min_size=m, max_size=m))
    flags = draw(st.lists(st.booleans(), min_size=m, max_size=m)) if flips else None
    return CSRep.from_lambdas(lambdas, flags)

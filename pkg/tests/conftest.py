from __future__ import annotations

import hypothesis.strategies as st
import pytest
from hypothesis import settings

from treecube.oracle import prufer_decode
from treecube.tree_model import Tree

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def trees(draw, min_n: int = 2, max_n: int = 12) -> Tree:
    """Uniform labeled trees via random Prüfer sequences."""
    n = draw(st.integers(min_n, max_n))
    seq = draw(st.lists(st.integers(0, n - 1), min_size=n - 2, max_size=n - 2))
    return prufer_decode(seq, n)


def path_tree(n: int) -> Tree:
    return Tree.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_tree(m: int) -> Tree:
    return Tree.from_edges(m + 1, [(0, i) for i in range(1, m + 1)])


@pytest.fixture
def marked_pair_tree():
    """Nine-vertex spine 0..8 with leaves 9 (on 1) and 10 (on 6); the marked
    pair is (2, 3) and the candidate set is {9, 10, 5, 8}."""
    edges = [(i, i + 1) for i in range(8)] + [(1, 9), (6, 10)]
    return Tree.from_edges(11, edges), (9, 10, 5, 8), (2, 3)

"""Exact metric dimension by exhaustive search, and small-tree enumeration.

The subset search runs in a compiled extension when one was built; set
``TREECUBE_PURE=1`` to force the pure-Python kernel.
"""
from __future__ import annotations

import heapq
import itertools
import os
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ..tree_model import Tree, power_distance

if os.environ.get("TREECUBE_PURE"):
    from ._kernel_py import first_resolving_subset
    KERNEL = "python"
else:
    try:
        from ._kernel import first_resolving_subset
        KERNEL = "cython"
    except ImportError:  # extension not built
        from ._kernel_py import first_resolving_subset
        KERNEL = "python"

DEFAULT_BUDGET = 10**8
MAX_ALL = 10
MAX_DEDUP = 12


class BudgetExceeded(RuntimeError):
    def __init__(self, checks: int, k: int):
        self.checks = checks
        self.k = k
        super().__init__(f"subset budget exhausted after {checks} checks (searching size {k})")


@dataclass(frozen=True)
class GraphDistances:
    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("distance matrix must be square")
        if np.any(np.diag(d) != 0) or np.any(d != d.T):
            raise ValueError("distance matrix must be symmetric with zero diagonal")
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @classmethod
    def of_tree(cls, t: Tree, power: int = 1) -> GraphDistances:
        d = t.distances
        return cls(power_distance(d, power) if power != 1 else d)


def brute_metric_dimension(
    g: GraphDistances | np.ndarray, budget: int = DEFAULT_BUDGET
) -> tuple[int, tuple[int, ...]]:
    """Smallest resolving set size and the lexicographically first such set."""
    if not isinstance(g, GraphDistances):
        g = GraphDistances(np.asarray(g))
    if g.n < 2:
        raise ValueError("metric dimension needs at least two vertices")
    codes = np.ascontiguousarray(g.d, dtype=np.int32)
    spent = 0
    for k in range(1, g.n):
        witness, checks, exceeded = first_resolving_subset(codes, k, budget - spent)
        spent += checks
        if witness is not None:
            return k, tuple(witness)
        if exceeded:
            raise BudgetExceeded(spent, k)
    # n - 1 vertices always resolve; unreachable for a valid metric
    raise AssertionError("no resolving set found")


def cube_dimension(t: Tree, budget: int = DEFAULT_BUDGET) -> tuple[int, tuple[int, ...]]:
    return brute_metric_dimension(GraphDistances.of_tree(t, 3), budget)


def tree_dimension(t: Tree, budget: int = DEFAULT_BUDGET) -> tuple[int, tuple[int, ...]]:
    return brute_metric_dimension(GraphDistances.of_tree(t, 1), budget)


# --- enumeration -----------------------------------------------------------


def prufer_decode(seq: Sequence[int], n: int) -> Tree:
    """Labeled tree on ``0..n-1`` for a sequence of length ``n - 2``."""
    if len(seq) != n - 2:
        raise ValueError(f"sequence length {len(seq)} does not match n={n}")
    degree = [1] * n
    for a in seq:
        degree[a] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for a in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, a))
        degree[a] -= 1
        if degree[a] == 1:
            heapq.heappush(leaves, a)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return Tree.from_edges(n, edges)


def canonical_form(t: Tree) -> str:
    """Isomorphism invariant: smallest AHU encoding rooted at a centre."""
    ecc = t.distances.max(axis=1)
    centres = [int(c) for c in np.flatnonzero(ecc == ecc.min())]

    def encode(v: int, parent: int) -> str:
        kids = sorted(encode(w, v) for w in t.adjacency[v] if w != parent)
        return "(" + "".join(kids) + ")"

    return min(encode(c, -1) for c in centres)


def enumerate_trees(n: int, mode: str = "all") -> Iterator[Tree]:
    """Every labeled tree on n vertices (``all``) or one per isomorphism class
    (``dedup``)."""
    if mode == "all":
        if not 2 <= n <= MAX_ALL:
            raise ValueError(f"labeled enumeration supports 2 <= n <= {MAX_ALL}")
        for seq in itertools.product(range(n), repeat=n - 2):
            yield prufer_decode(seq, n)
    elif mode == "dedup":
        if not 2 <= n <= MAX_DEDUP:
            raise ValueError(f"unlabeled enumeration supports 2 <= n <= {MAX_DEDUP}")
        if n == 2:
            yield Tree.from_edges(2, [(0, 1)])
            return
        import networkx as nx

        for g in nx.nonisomorphic_trees(n):
            yield Tree.from_edges(n, g.edges())
    else:
        raise ValueError(f"unknown mode {mode!r}")


def random_tree(n: int, seed: int) -> Tree:
    """Uniform labeled tree from a seeded generator (reproducible)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    return prufer_decode(rng.integers(0, n, size=n - 2).tolist(), n)

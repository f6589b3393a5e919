"""Property sweeps over populations of trees.

Predicate equivalence and the condition biconditional run on stacks of
distance matrices (one numpy pass per chunk of trees).  Bound, construction
and formula checks need the exact oracle and run tree by tree.  Chunks are
processed in a fixed order and every chunk seeds its own generator from
``(seed, chunk index)``, so results do not depend on the number of workers.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from . import oracle
from .bounds import beta_tree, construct_resolving_set_cube, lower_bound_cube, upper_bound_cube
from .resolvability import closed_form_table, condition_table, direct_table, separation_table
from .tree_model import Tree, classify

CHUNK = 2048
SETS_PER_TREE = 100
MAX_EXAMPLES = 5

SUITES = ("equivalence", "biconditional", "sandwich", "cube_at_least_tree",
          "tree_formula", "construction")


def decode_edges(seq: Sequence[int], n: int) -> list[tuple[int, int]]:
    """Edge list of the labeled tree with Prüfer sequence ``seq``."""
    return list(oracle.prufer_decode(seq, n).edges)


def distance_stack(edge_lists: Sequence[Sequence[tuple[int, int]]], n: int) -> np.ndarray:
    """All-pairs tree distances for many trees on ``n`` vertices at once."""
    B = len(edge_lists)
    big = n + 1
    D = np.full((B, n, n), big, dtype=np.int32)
    idx = np.arange(n)
    D[:, idx, idx] = 0
    if n > 1:
        e = np.asarray(edge_lists, dtype=np.intp).reshape(B, n - 1, 2)
        b = np.repeat(np.arange(B), n - 1)
        D[b, e[..., 0].ravel(), e[..., 1].ravel()] = 1
        D[b, e[..., 1].ravel(), e[..., 0].ravel()] = 1
    for k in range(n):
        np.minimum(D, D[:, :, k : k + 1] + D[:, k : k + 1, :], out=D)
    return D


def equivalence_mismatch(D: np.ndarray) -> np.ndarray:
    """Per tree: does the closed form disagree with the direct test anywhere?"""
    bad = closed_form_table(D) != direct_table(D)
    return bad.reshape(bad.shape[0], -1).any(axis=1)


def random_sets(rng: np.random.Generator, B: int, n: int, count: int) -> np.ndarray:
    """``(B, count, n)`` 0/1 membership of nonempty random vertex sets; the
    size is uniform on ``1..n`` and the members uniform given the size."""
    sizes = rng.integers(1, n + 1, size=(B, count, 1))
    ranks = np.argsort(rng.random((B, count, n)), axis=-1).argsort(axis=-1)
    return (ranks < sizes).astype(np.int32)


def biconditional_mismatch(D: np.ndarray, members: np.ndarray) -> np.ndarray:
    """Per tree: does the five-condition verdict differ from the direct
    resolving test for any of the given sets?"""
    _, ok = condition_table(D)
    _, sep = separation_table(D, 3)
    by_cond = (members @ ok.astype(np.int32) > 0).all(axis=-1)
    by_sep = (members @ sep.astype(np.int32) > 0).all(axis=-1)
    return (by_cond != by_sep).any(axis=-1)


@dataclass
class SuiteCounts:
    checked: int = 0
    violations: int = 0
    examples: list = field(default_factory=list)

    def record(self, ok: bool, edges=None) -> None:
        self.checked += 1
        if not ok:
            self.violations += 1
            if edges is not None and len(self.examples) < MAX_EXAMPLES:
                self.examples.append([list(e) for e in edges])

    def merge(self, other: SuiteCounts) -> None:
        self.checked += other.checked
        self.violations += other.violations
        room = MAX_EXAMPLES - len(self.examples)
        self.examples.extend(other.examples[: max(room, 0)])

    def to_dict(self) -> dict:
        return {"checked": self.checked, "violations": self.violations,
                "examples": self.examples}


@dataclass
class SweepReport:
    population: dict
    trees: int = 0
    paths: int = 0
    exact_skipped: int = 0
    augmentations: int = 0
    budget_exceeded: bool = False
    suites: dict = field(default_factory=lambda: {s: SuiteCounts() for s in SUITES})

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.suites.values())

    def merge(self, other: SweepReport) -> None:
        self.trees += other.trees
        self.paths += other.paths
        self.exact_skipped += other.exact_skipped
        self.augmentations += other.augmentations
        self.budget_exceeded |= other.budget_exceeded
        for s in SUITES:
            self.suites[s].merge(other.suites[s])

    def to_dict(self) -> dict:
        return {
            "population": self.population,
            "trees": self.trees,
            "paths": self.paths,
            "exact_skipped": self.exact_skipped,
            "augmentations": self.augmentations,
            "budget_exceeded": self.budget_exceeded,
            "violations": self.violations,
            "suites": {s: self.suites[s].to_dict() for s in SUITES},
        }


def check_tree(t: Tree, rep: SweepReport, cap: int, budget: int) -> None:
    """Oracle-backed checks for a single tree, accumulated into ``rep``."""
    edges = t.edges
    path = t.is_path()
    rep.paths += path
    exact = tree_exact = None
    if t.n <= cap and t.n >= 2:
        if rep.budget_exceeded:
            rep.exact_skipped += 1
        else:
            try:
                exact, _ = oracle.cube_dimension(t, budget)
                tree_exact, _ = oracle.tree_dimension(t, budget)
            except oracle.BudgetExceeded:
                rep.budget_exceeded = True
                rep.exact_skipped += 1
                exact = tree_exact = None
    else:
        rep.exact_skipped += 1
    if exact is not None:
        rep.suites["cube_at_least_tree"].record(exact >= tree_exact, edges)
    if path:
        return
    cl = classify(t)
    bt = beta_tree(t, cl)
    lo, hi = lower_bound_cube(t, cl), upper_bound_cube(t, cl)
    built = construct_resolving_set_cube(t, cl)
    rep.augmentations += built.augmented
    rep.suites["construction"].record(not built.augmented and len(built.S) <= hi, edges)
    if exact is not None:
        rep.suites["tree_formula"].record(bt == tree_exact, edges)
        rep.suites["sandwich"].record(lo <= exact <= hi, edges)


def _process_chunk(args) -> SweepReport:
    n, seqs, seed, index, suites, cap, budget, sets_per_tree = args
    rep = SweepReport(population={})
    edge_lists = [decode_edges(s, n) for s in seqs]
    rep.trees = len(edge_lists)
    if n >= 3 and ("equivalence" in suites or "biconditional" in suites):
        D = distance_stack(edge_lists, n)
        if "equivalence" in suites:
            bad = equivalence_mismatch(D)
            for e, b in zip(edge_lists, bad.tolist()):
                rep.suites["equivalence"].record(not b, e)
        if "biconditional" in suites:
            rng = np.random.default_rng([seed, index])
            bad = biconditional_mismatch(D, random_sets(rng, len(seqs), n, sets_per_tree))
            for e, b in zip(edge_lists, bad.tolist()):
                rep.suites["biconditional"].record(not b, e)
    if {"sandwich", "cube_at_least_tree", "tree_formula", "construction"} & set(suites):
        for e in edge_lists:
            check_tree(Tree.from_edges(n, e), rep, cap, budget)
    return rep


def exhaustive_sequences(n: int) -> Iterator[tuple[int, ...]]:
    if not 2 <= n <= oracle.MAX_ALL:
        raise ValueError(f"exhaustive sweeps support 2 <= n <= {oracle.MAX_ALL}")
    return itertools.product(range(n), repeat=n - 2)


def random_sequences(n: int, count: int, seed: int) -> list[tuple[int, ...]]:
    """``count`` Prüfer sequences from one seeded stream (uniform labeled trees)."""
    if n < 2 or count < 0:
        raise ValueError("need n >= 2 and a nonnegative count")
    rng = np.random.default_rng(seed)
    return [tuple(r) for r in rng.integers(0, n, size=(count, n - 2)).tolist()]


def run_sweep(
    n: int,
    sequences,
    population: dict,
    seed: int = 0,
    suites: Sequence[str] = SUITES,
    cap: int = 16,
    budget: int = oracle.DEFAULT_BUDGET,
    jobs: int = 1,
    sets_per_tree: int = SETS_PER_TREE,
    chunk: int = CHUNK,
) -> SweepReport:
    unknown = set(suites) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suites {sorted(unknown)}")
    report = SweepReport(population=dict(population))
    it = iter(sequences)

    def chunks():
        for i in itertools.count():
            block = list(itertools.islice(it, chunk))
            if not block:
                return
            yield (n, block, seed, i, tuple(suites), cap, budget, sets_per_tree)

    if jobs <= 1:
        results = map(_process_chunk, chunks())
        for r in results:
            report.merge(r)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for r in ex.map(_process_chunk, chunks()):
                report.merge(r)
    return report


def sweep_exhaustive(n: int, **kw) -> SweepReport:
    return run_sweep(n, exhaustive_sequences(n), {"mode": "exhaustive", "n": n}, **kw)


def sweep_random(n: int, count: int, seed: int, **kw) -> SweepReport:
    pop = {"mode": "random", "n": n, "count": count, "seed": seed}
    return run_sweep(n, random_sequences(n, count, seed), pop, seed=seed, **kw)


def sandwich_population(
    trees: Sequence[Tree], cap: int = 16, budget: int = oracle.DEFAULT_BUDGET,
    rep: Optional[SweepReport] = None,
) -> SweepReport:
    """Oracle-backed suites on an explicit list of trees."""
    rep = rep or SweepReport(population={"mode": "explicit"})
    for t in trees:
        rep.trees += 1
        check_tree(t, rep, cap, budget)
    return rep

"""Metric dimension of a tree, bounds for its cube, and an explicit resolving set.

All tie-breaks pick the smallest vertex label.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Optional

from .resolvability import is_resolving_set, unresolved_pairs
from .tree_model import LONGLEG, MIDLEG, PENDANT, Classification, Tree, classify, power_distance

log = logging.getLogger(__name__)

DEFAULT_EXACT_CAP = 16

MIDLEG_FILL = "midleg-fill"
LONGLEG_DIST3 = "longleg-dist3"
PENDANT_FILL = "pendant-fill"
EXTRA_A_I = "extra-a-i"
EXTRA_A_II = "extra-a-ii"
EXTRA_B = "extra-b"
AUGMENT = "augment"


class PathTreeError(ValueError):
    """The tree is a path; the leg-counting formulas do not apply."""


def _require_non_path(t: Tree, cl: Classification | None = None) -> Classification:
    if t.is_path():
        raise PathTreeError(f"tree on {t.n} vertices is a path (its dimension is 1)")
    return cl or classify(t)


def beta_tree(t: Tree, cl: Classification | None = None) -> int:
    cl = _require_non_path(t, cl)
    return sum(pr.total - 1 for pr in cl.profiles.values())


def tree_metric_basis(t: Tree, cl: Classification | None = None) -> tuple[int, ...]:
    """Leaf of every leg of every major stem except its smallest-leaf leg."""
    cl = _require_non_path(t, cl)
    out = []
    for v in sorted(cl.major_stems):
        legs = sorted(cl.legs_of(v), key=lambda leg: leg.leaf)
        out.extend(leg.leaf for leg in legs[1:])
    return tuple(sorted(out))


def _midleg_surplus(cl: Classification) -> int:
    return sum(pr.m - 1 for pr in cl.profiles.values() if pr.m >= 2)


def lower_bound_cube(t: Tree, cl: Classification | None = None) -> int:
    cl = _require_non_path(t, cl)
    with_mid = [pr.m for pr in cl.profiles.values() if pr.m >= 1]
    return beta_tree(t, cl) + sum(with_mid) - len(with_mid)


def upper_bound_cube(t: Tree, cl: Classification | None = None) -> int:
    cl = _require_non_path(t, cl)
    big = sum(1 for pr in cl.profiles.values() if pr.m >= 2)
    return beta_tree(t, cl) + _midleg_surplus(cl) + len(cl.major_stems) + 1 - big


@dataclass
class ConstructionTrace:
    entries: dict[int, tuple[str, Optional[int]]] = field(default_factory=dict)

    def add(self, vertex: int, rule: str, stem: int | None) -> None:
        if vertex in self.entries:
            raise AssertionError(f"vertex {vertex} inserted twice")
        self.entries[vertex] = (rule, stem)

    def by_rule(self, rule: str) -> list[int]:
        return sorted(v for v, (r, _) in self.entries.items() if r == rule)

    def to_table(self) -> str:
        rows = ["vertex  rule            stem"]
        for v in sorted(self.entries):
            rule, stem = self.entries[v]
            rows.append(f"{v:>6}  {rule:<14}  {'-' if stem is None else stem}")
        return "\n".join(rows)

    def to_list(self) -> list[dict]:
        return [
            {"vertex": v, "rule": r, "stem": s}
            for v, (r, s) in sorted(self.entries.items())
        ]


@dataclass
class Construction:
    S: tuple[int, ...]
    trace: ConstructionTrace
    augmented: bool


def _fill_stems(cl: Classification, trace: ConstructionTrace) -> None:
    for v in sorted(cl.major_stems):
        pr = cl.profiles[v]
        legs = cl.legs_of(v)
        pend = sorted((lg for lg in legs if lg.kind == PENDANT), key=lambda lg: lg.leaf)
        mids = sorted((lg for lg in legs if lg.kind == MIDLEG), key=lambda lg: lg.leaf)
        longs = sorted((lg for lg in legs if lg.kind == LONGLEG), key=lambda lg: lg.vertices[2])
        if pr.m >= 1:
            for lg in mids[1:]:
                for w in lg.vertices:
                    trace.add(w, MIDLEG_FILL, v)
            for lg in longs:
                trace.add(lg.vertices[2], LONGLEG_DIST3, v)
            for lg in pend:
                trace.add(lg.leaf, PENDANT_FILL, v)
        elif pr.p >= 1:
            for lg in pend[1:]:
                trace.add(lg.leaf, PENDANT_FILL, v)
            for lg in longs:
                trace.add(lg.vertices[2], LONGLEG_DIST3, v)
        else:
            for lg in longs[1:]:
                trace.add(lg.vertices[2], LONGLEG_DIST3, v)


def _insert_extras(t: Tree, cl: Classification, trace: ConstructionTrace) -> None:
    stems = sorted(cl.major_stems)
    prof = cl.profiles
    with_long = [v for v in stems if prof[v].l >= 1]
    plain_small = [v for v in stems if prof[v].l == 0 and prof[v].m <= 1]

    if with_long:
        light = [v for v in with_long if prof[v].m <= 1]
        if light:
            for i, v in enumerate(light):
                # long legs whose distance-3 vertex is already in S
                legs = sorted(
                    (lg for lg in cl.legs_of(v)
                     if lg.kind == LONGLEG and lg.vertices[2] in trace.entries),
                    key=lambda lg: lg.vertices[2],
                )
                leg = legs[0]
                if i == 0:
                    trace.add(leg.vertices[0], EXTRA_A_I, v)
                trace.add(leg.vertices[1], EXTRA_A_I, v)
            rule = EXTRA_A_I
        else:
            trace.add(with_long[0], EXTRA_A_II, with_long[0])
            rule = EXTRA_A_II
        for v in plain_small:
            trace.add(v, rule, v)
        return

    heavy = [v for v in stems if prof[v].m >= 2]
    if heavy:
        trace.add(heavy[0], EXTRA_B, heavy[0])
    else:
        for v in stems:
            outside = [w for w in t.adjacency[v] if w not in cl.leg_vertices(v)]
            if outside:
                trace.add(outside[0], EXTRA_B, v)
                break
        else:
            # spider: every neighbour of the only stem is on a leg, so use
            # the first vertex of its unpicked midleg (a star needs nothing)
            v = stems[0]
            mids = sorted((lg for lg in cl.legs_of(v) if lg.kind == MIDLEG), key=lambda lg: lg.leaf)
            if mids:
                trace.add(mids[0].vertices[0], EXTRA_B, v)
    for v in stems:
        if prof[v].m <= 1 and v not in trace.entries:
            trace.add(v, EXTRA_B, v)


def _augment(t: Tree, S: list[int], trace: ConstructionTrace) -> bool:
    """Greedy repair: add the vertex separating most colliding pairs."""
    added = False
    c = power_distance(t.distances)
    while True:
        bad = unresolved_pairs(t, S, 3)
        if not bad:
            return added
        best, best_score = -1, -1
        for x in range(t.n):
            if x in trace.entries:
                continue
            score = sum(1 for u, v in bad if x in (u, v) or c[x, u] != c[x, v])
            if score > best_score:
                best, best_score = x, score
        trace.add(best, AUGMENT, None)
        S.append(best)
        added = True
        log.warning("construction augmented with vertex %d on %r", best, t)


def construct_resolving_set_cube(t: Tree, cl: Classification | None = None) -> Construction:
    """Per-stem leg fills plus the extra vertices, verified against T^3.

    If verification fails the set is greedily augmented and the result is
    flagged; that never happens for a correct construction.
    """
    cl = _require_non_path(t, cl)
    trace = ConstructionTrace()
    _fill_stems(cl, trace)
    _insert_extras(t, cl, trace)
    S = sorted(trace.entries)
    augmented = False
    if not S or not is_resolving_set(t, S, 3):
        augmented = _augment(t, S, trace)
    return Construction(S=tuple(sorted(S)), trace=trace, augmented=augmented)


@dataclass
class BoundsReport:
    n: int
    path: bool = False
    beta_tree: Optional[int] = None
    lower: Optional[int] = None
    upper: Optional[int] = None
    constructed_size: Optional[int] = None
    constructed_set: Optional[tuple[int, ...]] = None
    augmented: Optional[bool] = None
    exact: Optional[int] = None
    exact_witness: Optional[tuple[int, ...]] = None
    trace: Optional[ConstructionTrace] = None

    def to_dict(self) -> dict:
        return {
            "variant": "path" if self.path else "tree",
            "n": self.n,
            "beta_tree": self.beta_tree,
            "lower": self.lower,
            "upper": self.upper,
            "constructed_size": self.constructed_size,
            "constructed_set": list(self.constructed_set) if self.constructed_set else None,
            "augmented": self.augmented,
            "exact": self.exact,
            "exact_witness": list(self.exact_witness) if self.exact_witness else None,
            "trace": self.trace.to_list() if self.trace else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def bounds_report(
    t: Tree,
    with_exact: bool = False,
    cap: int = DEFAULT_EXACT_CAP,
    budget: int | None = None,
) -> BoundsReport:
    from . import oracle

    rep = BoundsReport(n=t.n, path=t.is_path())
    if not rep.path:
        cl = classify(t)
        built = construct_resolving_set_cube(t, cl)
        rep.beta_tree = beta_tree(t, cl)
        rep.lower = lower_bound_cube(t, cl)
        rep.upper = upper_bound_cube(t, cl)
        rep.constructed_set = built.S
        rep.constructed_size = len(built.S)
        rep.augmented = built.augmented
        rep.trace = built.trace
    if with_exact and t.n <= cap:
        rep.exact, rep.exact_witness = oracle.cube_dimension(
            t, budget if budget is not None else oracle.DEFAULT_BUDGET
        )
    return rep

"""When does a vertex (or a set) separate two vertices in the cube of a tree?

Two routes are kept side by side: the direct one compares rounded-up
distances, the closed-form one works only from tree distances, the pair's
region and residues mod 3.  They must agree everywhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .tree_model import Region, Tree, components_relative, power_distance

PAIR_CASES = {1: "adjacent", 2: "dist2", 3: "dist3", 4: "dist4", 5: "dist5"}


def pair_case(d: int) -> str:
    return PAIR_CASES.get(d, "far")


def _check_set(t: Tree, S: Iterable[int]) -> tuple[int, ...]:
    S = tuple(int(s) for s in S)
    if not S:
        raise ValueError("candidate set must be nonempty")
    if len(set(S)) != len(S):
        raise ValueError(f"candidate set has duplicates: {S}")
    bad = [s for s in S if not 0 <= s < t.n]
    if bad:
        raise ValueError(f"unknown vertices {bad} (tree has n={t.n})")
    return S


def resolves_in_cube(t: Tree, x: int, u: int, v: int) -> bool:
    if u == v:
        raise ValueError("u and v must differ")
    if x == u or x == v:
        return True
    d = t.distances
    return power_distance(int(d[x, u])) != power_distance(int(d[x, v]))


def _residue_gap_ok(near: int, gap: int) -> bool:
    # distances near < far = near + gap round to different multiples of 3 iff
    r = near % 3
    return gap >= (1, 3, 2)[r]


def resolves_closed_form(t: Tree, x: int, u: int, v: int) -> bool:
    """Same verdict as :func:`resolves_in_cube`, derived case by case."""
    if u == v or x in (u, v):
        raise ValueError("need distinct u, v and x outside {u, v}")
    d = t.distances
    duv = int(d[u, v])
    du, dv = int(d[x, u]), int(d[x, v])
    near = min(du, dv)
    region = components_relative(t, u, v, x)
    if duv <= 3:
        if region is Region.T_UV:
            return duv == 3 and near % 3 == 0
        if duv == 3:
            return True
        if duv == 2:
            return near % 3 in (0, 2)
        return near % 3 == 0
    if du == dv:
        return False
    if region is not Region.T_UV:
        return True
    return _residue_gap_ok(near, abs(du - dv))


def _triple_mask(n: int) -> np.ndarray:
    idx = np.arange(n)
    m = np.ones((n, n, n), dtype=bool)
    m[idx, idx, :] = False
    m[idx, :, idx] = False
    m[:, idx, idx] = False
    return m


def closed_form_table(d: np.ndarray) -> np.ndarray:
    """``out[..., x, u, v]`` = closed-form verdict for every triple.

    Accepts a single ``n x n`` matrix or a stack ``(B, n, n)``.  Entries with
    ``x in {u, v}`` or ``u == v`` are False.
    """
    d = np.asarray(d, dtype=np.int64)
    du = d[..., :, :, None]  # d[x, u]
    dv = d[..., :, None, :]  # d[x, v]
    duv = d[..., None, :, :]
    interior = (dv != du + duv) & (du != dv + duv)
    near = np.minimum(du, dv)
    res = near % 3
    gap = np.abs(du - dv)
    need = np.array([1, 3, 2])[res]

    close_side = (duv == 3) | ((duv == 2) & (res != 1)) | ((duv == 1) & (res == 0))
    close_ans = np.where(interior, (duv == 3) & (res == 0), close_side)
    far_ans = (du != dv) & (~interior | (gap >= need))
    out = np.where(duv <= 3, close_ans, far_ans)
    return out & _triple_mask(d.shape[-1])


def direct_table(d: np.ndarray) -> np.ndarray:
    """``out[..., x, u, v]`` = ceil(d[x,u]/3) != ceil(d[x,v]/3), same mask."""
    c = power_distance(np.asarray(d, dtype=np.int64))
    out = c[..., :, :, None] != c[..., :, None, :]
    return out & _triple_mask(c.shape[-1])


def is_resolving_set(t: Tree, S: Sequence[int], power: int = 3) -> bool:
    """True iff every vertex gets a distinct vector of distances to ``S``."""
    if power not in (1, 3):
        raise ValueError("power must be 1 or 3")
    S = _check_set(t, S)
    d = t.distances
    cols = d[:, list(S)]
    if power == 3:
        cols = power_distance(cols)
    seen = set()
    for row in cols:
        key = row.tobytes()
        if key in seen:
            return False
        seen.add(key)
    return True


def unresolved_pairs(t: Tree, S: Sequence[int], power: int = 3) -> list[tuple[int, int]]:
    """All pairs ``u < v`` sharing a code with respect to ``S``."""
    d = t.distances
    cols = d[:, list(S)] if S else np.zeros((t.n, 0), dtype=d.dtype)
    if power == 3:
        cols = power_distance(cols)
    groups: dict[bytes, list[int]] = {}
    for w, row in enumerate(cols):
        groups.setdefault(row.tobytes(), []).append(w)
    out = []
    for members in groups.values():
        for i, u in enumerate(members):
            out.extend((u, v) for v in members[i + 1 :])
    return sorted(out)


# --- the five-condition characterisation -----------------------------------

CONDITION_DISTANCE = {1: 1, 2: 2, 3: 3, 4: 4, 5: 5}


def condition_holds_for(duv: int, du: int, dv: int) -> bool:
    """Does a landmark at tree distances (du, dv) meet the condition for a
    pair at tree distance ``duv`` (1..5)?

    The landmark's side is read off the distances: it lies behind u or v
    exactly when the gap equals ``duv``.
    """
    gap = abs(du - dv)
    near = min(du, dv)
    r = near % 3
    if duv == 1:
        # the nearer endpoint must sit at a multiple of 3
        return r == 0
    if duv == 2:
        return gap == 2 and r in (0, 2)
    if duv == 3:
        return gap == 3 or r == 0
    if duv == 4:
        # equidistant landmarks never separate a nonadjacent pair
        return gap == 4 or (gap != 0 and r in (0, 2))
    if duv == 5:
        return gap in (5, 3) or r == 0
    raise ValueError("conditions cover tree distances 1..5 only")


@dataclass
class ConditionResult:
    index: int
    passed: bool
    pairs_checked: int
    witness: tuple[int, int] | None = None
    witness_distance: int | None = None

    def to_dict(self) -> dict:
        return {
            "condition": self.index,
            "passed": self.passed,
            "pairs_checked": self.pairs_checked,
            "witness": list(self.witness) if self.witness else None,
            "witness_distance": self.witness_distance,
        }


@dataclass
class ConditionReport:
    S: tuple[int, ...]
    conditions: list[ConditionResult] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.conditions)

    @property
    def first_failure(self) -> int | None:
        return next((c.index for c in self.conditions if not c.passed), None)

    def to_dict(self) -> dict:
        return {
            "set": list(self.S),
            "overall": self.overall,
            "conditions": [c.to_dict() for c in self.conditions],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = [f"S = {list(self.S)}"]
        for c in self.conditions:
            status = "pass" if c.passed else "FAIL"
            tail = f"  witness {c.witness} at d_T={c.witness_distance}" if c.witness else ""
            lines.append(f"condition {c.index}: {status} ({c.pairs_checked} pairs){tail}")
        lines.append(f"overall: {'resolving' if self.overall else 'not resolving'}")
        return "\n".join(lines)


def check_conditions(t: Tree, S: Sequence[int]) -> ConditionReport:
    """Evaluate all five pair conditions; pairs are scanned in ``(u, v)`` order
    and the first failing pair of each condition is kept as witness."""
    S = _check_set(t, S)
    d = t.distances
    members = set(S)
    report = ConditionReport(S=S)
    for k in range(1, 6):
        us, vs = np.nonzero(np.triu(d == k))
        result = ConditionResult(index=k, passed=True, pairs_checked=len(us))
        for u, v in zip(us.tolist(), vs.tolist()):
            if u in members or v in members:
                continue
            if any(condition_holds_for(k, int(d[x, u]), int(d[x, v])) for x in S):
                continue
            result.passed = False
            result.witness = (u, v)
            result.witness_distance = k
            break
        report.conditions.append(result)
    return report


def conditions_hold(t: Tree, S: Sequence[int]) -> bool:
    """Short-circuiting boolean form of :func:`check_conditions`."""
    S = _check_set(t, S)
    d = t.distances
    members = set(S)
    for u in range(t.n):
        for v in range(u + 1, t.n):
            k = int(d[u, v])
            if k > 5 or u in members or v in members:
                continue
            if not any(condition_holds_for(k, int(d[x, u]), int(d[x, v])) for x in S):
                return False
    return True


def condition_table(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised conditions, for one matrix or a ``(B, n, n)`` stack.

    Returns ``(pairs, ok)``: ``pairs`` lists every ``u < v`` and
    ``ok[..., x, i]`` says landmark x meets the condition for pair ``i``.
    Membership of u or v counts as meeting it; pairs farther apart than 5
    carry no condition and are True throughout.
    """
    d = np.asarray(d, dtype=np.int64)
    n = d.shape[-1]
    iu, iv = np.triu_indices(n, 1)
    duv = d[..., iu, iv][..., None, :]
    du, dv = d[..., :, iu], d[..., :, iv]
    gap = np.abs(du - dv)
    r = np.minimum(du, dv) % 3
    ok = np.select(
        [duv == 1, duv == 2, duv == 3, duv == 4, duv == 5],
        [
            r == 0,
            (gap == 2) & (r != 1),
            (gap == 3) | (r == 0),
            (gap == 4) | ((gap != 0) & (r != 1)),
            (gap == 5) | (gap == 3) | (r == 0),
        ],
        default=True,
    )
    xs = np.arange(n)[:, None]
    ok |= (xs == iu) | (xs == iv)
    return np.stack([iu, iv], axis=1), ok


def separation_table(d: np.ndarray, power: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """``(pairs, sep)`` with ``sep[..., x, i]`` True when x separates pair i."""
    d = np.asarray(d, dtype=np.int64)
    c = power_distance(d) if power == 3 else d
    iu, iv = np.triu_indices(d.shape[-1], 1)
    return np.stack([iu, iv], axis=1), c[..., :, iu] != c[..., :, iv]


# --- resolver windows ------------------------------------------------------


@dataclass(frozen=True)
class ResolverWindow:
    """Any ``window`` consecutive vertices walking away from ``anchor`` inside
    the region contain a resolver of the pair.

    ``start`` is the smallest admissible distance from the anchor; ``branches``
    says whether the region is the side beyond the anchor (False) or the
    branches hanging off an interior path vertex (True).
    """

    anchor: int
    window: int
    branches: bool
    start: int = 1
    include_anchor: bool = False


def consecutive_vertex_rule(t: Tree, u: int, v: int) -> list[ResolverWindow]:
    """Where resolvers of a close pair (tree distance 1..5) must be found."""
    d = t.distances
    k = int(d[u, v])
    if k < 1 or k > 5:
        raise ValueError(f"window rules exist only for tree distances 1..5, got {k}")
    p = t.path(u, v)
    if k == 1:
        return [ResolverWindow(u, 3, False), ResolverWindow(v, 3, False)]
    if k == 2:
        return [ResolverWindow(u, 2, False), ResolverWindow(v, 2, False)]
    sides = [ResolverWindow(u, 1, False), ResolverWindow(v, 1, False)]
    if k == 3:
        return sides + [ResolverWindow(p[1], 3, True), ResolverWindow(p[2], 3, True)]
    if k == 4:
        return sides + [ResolverWindow(p[1], 2, True), ResolverWindow(p[3], 2, True)]
    return sides + [
        ResolverWindow(p[1], 1, True, include_anchor=True),
        ResolverWindow(p[4], 1, True, include_anchor=True),
        ResolverWindow(p[2], 3, True),
        ResolverWindow(p[3], 3, True),
    ]

"""Generators for named tree families and the pendant-caterpillar characterisation.

Every generator is deterministic: spine (or centre) vertices get the lowest
labels, then legs are appended in the order their parameters are listed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .tree_model import PENDANT, Classification, Tree, classify

VARIANTS = (
    "caterpillar",
    "lobster",
    "spider",
    "d_regular",
    "dimension_n",
    "central_path_pendant",
)

_ALIASES = {
    "cat": "caterpillar",
    "caterpillar": "caterpillar",
    "lob": "lobster",
    "lobster": "lobster",
    "spider": "spider",
    "dreg": "d_regular",
    "d_regular": "d_regular",
    "dimn": "dimension_n",
    "dimension_n": "dimension_n",
    "cpp": "central_path_pendant",
    "central_path_pendant": "central_path_pendant",
}


class FamilySpecError(ValueError):
    """A family description that does not define a valid tree."""


@dataclass(frozen=True)
class FamilySpec:
    variant: str
    params: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise FamilySpecError(f"unknown family {self.variant!r}")

    def build(self) -> Tree:
        p = self.params
        if self.variant == "caterpillar":
            return gen_caterpillar(p["pendants"], p.get("left", 0), p.get("right", 0))
        if self.variant == "lobster":
            return gen_lobster(
                p["pendants"], p.get("midlegs"), p.get("left", 0), p.get("right", 0),
                p.get("forks"),
            )
        if self.variant == "spider":
            return gen_spider(p["legs"])
        if self.variant == "d_regular":
            return gen_d_regular(p["d"], p["t"])
        if self.variant == "dimension_n":
            return gen_dimension_n(p["n"])
        return gen_central_path_pendant(p["pendants"])


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise FamilySpecError(f"{what}: expected comma-separated integers, got {text!r}") from None


def parse_family_spec(text: str) -> FamilySpec:
    """Parse strings such as ``spider:1,1,3``, ``dreg:3,2``, ``dimn:8`` or
    ``cat:spine=5;pendants=2,0,1,0,2;left=2``."""
    name, sep, body = text.strip().partition(":")
    variant = _ALIASES.get(name.strip().lower())
    if variant is None or not sep:
        raise FamilySpecError(
            f"bad family spec {text!r}; expected <family>:<params> with family in "
            + ", ".join(sorted(_ALIASES))
        )
    if variant == "spider":
        return FamilySpec(variant, {"legs": _ints(body, "spider legs")})
    if variant == "d_regular":
        vals = _ints(body, "dreg")
        if len(vals) != 2:
            raise FamilySpecError("dreg needs exactly two values: d,t")
        return FamilySpec(variant, {"d": vals[0], "t": vals[1]})
    if variant == "dimension_n":
        vals = _ints(body, "dimn")
        if len(vals) != 1:
            raise FamilySpecError("dimn needs exactly one value: n")
        return FamilySpec(variant, {"n": vals[0]})

    fields: dict = {}
    for part in body.split(";"):
        if not part.strip():
            continue
        key, eq, val = part.partition("=")
        key = key.strip()
        if not eq or key not in ("spine", "pendants", "midlegs", "forks", "left", "right"):
            raise FamilySpecError(f"bad field {part!r} in {text!r}")
        vals = _ints(val, key)
        fields[key] = vals if key in ("pendants", "midlegs", "forks") else _single(vals, key)
    if "pendants" not in fields:
        raise FamilySpecError(f"{name} spec needs pendants=...")
    spine = fields.pop("spine", len(fields["pendants"]))
    for key in ("pendants", "midlegs", "forks"):
        if key in fields and len(fields[key]) != spine:
            raise FamilySpecError(f"{key} lists {len(fields[key])} values for spine={spine}")
    if variant == "caterpillar" and {"midlegs", "forks"} & set(fields):
        raise FamilySpecError("caterpillars have no midlegs or forks; use lob:")
    if variant == "central_path_pendant" and set(fields) - {"pendants"}:
        raise FamilySpecError("cpp takes pendants=... only")
    return FamilySpec(variant, fields)


def _single(vals: list[int], key: str) -> int:
    if len(vals) != 1:
        raise FamilySpecError(f"{key} takes one integer")
    return vals[0]


class _Builder:
    def __init__(self, n0: int = 0):
        self.n = n0
        self.edges: list[tuple[int, int]] = []

    def new(self) -> int:
        self.n += 1
        return self.n - 1

    def hang(self, at: int, length: int) -> list[int]:
        """Attach a path of ``length`` new vertices at ``at``."""
        out, prev = [], at
        for _ in range(length):
            w = self.new()
            self.edges.append((prev, w))
            out.append(w)
            prev = w
        return out

    def tree(self) -> Tree:
        return Tree.from_edges(self.n, self.edges)


def _spine(b: _Builder, length: int) -> list[int]:
    sp = [b.new() for _ in range(length)]
    b.edges.extend(zip(sp, sp[1:]))
    return sp


def _check_counts(values: Sequence[int], what: str) -> None:
    if not values:
        raise FamilySpecError("spine length must be at least 1")
    if any(v < 0 for v in values):
        raise FamilySpecError(f"{what} counts must be nonnegative")


def _end_legs(b: _Builder, sp: list[int], left: int, right: int) -> None:
    for end, length in ((sp[0], left), (sp[-1], right)):
        if length == 1:
            raise FamilySpecError("end legs have length >= 2 (use pendants for length 1)")
        if length < 0:
            raise FamilySpecError("end leg length must be nonnegative")
        if length:
            b.hang(end, length)


def gen_caterpillar(pendants: Sequence[int], left: int = 0, right: int = 0) -> Tree:
    """Spine with ``pendants[i]`` leaves on spine vertex i and optionally one
    longer leg (length >= 2) at each end of the spine."""
    _check_counts(pendants, "pendant")
    b = _Builder()
    sp = _spine(b, len(pendants))
    for v, k in zip(sp, pendants):
        for _ in range(k):
            b.hang(v, 1)
    _end_legs(b, sp, left, right)
    if b.n < 2:
        raise FamilySpecError("family instance has fewer than two vertices")
    return b.tree()


def gen_lobster(
    pendants: Sequence[int],
    midlegs: Optional[Sequence[int]] = None,
    left: int = 0,
    right: int = 0,
    forks: Optional[Sequence[int]] = None,
) -> Tree:
    """Caterpillar plus ``midlegs[i]`` legs of length 2 on spine vertex i.

    ``forks[i] = k >= 2`` also hangs a vertex carrying k leaves on spine
    vertex i (a major stem off the spine, still within distance 2 of it).
    """
    _check_counts(pendants, "pendant")
    size = len(pendants)
    midlegs = list(midlegs) if midlegs is not None else [0] * size
    forks = list(forks) if forks is not None else [0] * size
    if len(midlegs) != size or len(forks) != size:
        raise FamilySpecError("pendants, midlegs and forks must have the spine's length")
    _check_counts(midlegs, "midleg")
    if any(f == 1 or f < 0 for f in forks):
        raise FamilySpecError("a fork carries at least two leaves (0 for none)")
    b = _Builder()
    sp = _spine(b, size)
    for v, k, m, f in zip(sp, pendants, midlegs, forks):
        for _ in range(k):
            b.hang(v, 1)
        for _ in range(m):
            b.hang(v, 2)
        if f:
            (hub,) = b.hang(v, 1)
            for _ in range(f):
                b.hang(hub, 1)
    _end_legs(b, sp, left, right)
    if b.n < 2:
        raise FamilySpecError("family instance has fewer than two vertices")
    return b.tree()


def gen_spider(leg_lengths: Sequence[int]) -> Tree:
    """Centre 0 with one path leg per entry of ``leg_lengths``."""
    if len(leg_lengths) < 3:
        raise FamilySpecError("a spider needs at least three legs")
    if any(k < 1 for k in leg_lengths):
        raise FamilySpecError("spider legs have length >= 1")
    b = _Builder(1)
    for k in leg_lengths:
        b.hang(0, k)
    return b.tree()


def gen_d_regular(d: int, t: int) -> Tree:
    """Root of degree d, internal vertices of degree d, leaves at depth t
    (breadth-first labels)."""
    if d < 3 or t < 1:
        raise FamilySpecError("d-regular trees need d >= 3 and t >= 1")
    b = _Builder(1)
    level = [0]
    for depth in range(t):
        nxt = []
        for v in level:
            for _ in range(d if depth == 0 else d - 1):
                nxt.extend(b.hang(v, 1))
        level = nxt
    return b.tree()


def gen_dimension_n(n: int) -> Tree:
    """Tree whose cube has metric dimension n, following the two-midleg
    construction.

    Major stems v1 and v0 (labels 0 and 3) sit at distance 3 and carry two
    midlegs each.  For each of the ``k = M - 2`` pendant stems w_i a branch
    v0-a-b-c-w_i of length 4 is hung at v0, with an extra leaf u_i on c;
    w_i carries two leaves, except that for even n the first carries three.
    """
    if n < 5:
        raise FamilySpecError("dimension-n trees exist here for n >= 5")
    M = n // 2 - 1 if n % 2 == 0 else (n - 1) // 2
    k = M - 2
    b = _Builder()
    v1, _, _, v0 = _spine(b, 4)
    for stem in (v1, v0):
        b.hang(stem, 2)
        b.hang(stem, 2)
    for i in range(k):
        a, bb, c, w = b.hang(v0, 4)
        b.hang(c, 1)  # u_i
        leaves = 3 if (n % 2 == 0 and i == 0) else 2
        for _ in range(leaves):
            b.hang(w, 1)
    return b.tree()


def gen_central_path_pendant(pendants: Sequence[int]) -> Tree:
    """Pendant-only caterpillar; ``pendants[i]`` leaves on spine vertex i."""
    return gen_caterpillar(pendants)


def random_pendant_caterpillar(rng: np.random.Generator, max_n: int = 14,
                               max_pendants: int = 3) -> Tree:
    """Random tree of the characterisation's class: a spine whose end vertices
    carry at least two leaves and whose other vertices carry 0..max_pendants."""
    if max_n < 5:
        raise ValueError("need max_n >= 5 (two end stems with two leaves each)")
    while True:
        length = int(rng.integers(1, max_n - 3))
        counts = rng.integers(0, max_pendants + 1, size=length)
        counts[0] = rng.integers(2, max_pendants + 1)
        counts[-1] = rng.integers(2, max_pendants + 1)
        # a lone spine vertex with two leaves is a path, not a stem
        if length + int(counts.sum()) <= max_n and not (length == 1 and counts[0] < 3):
            return gen_central_path_pendant(counts.tolist())


def family_interval(spec: FamilySpec, t: Tree | None = None) -> tuple[int, int]:
    """Interval for the cube's metric dimension stated for each family."""
    from .bounds import beta_tree

    t = t if t is not None else spec.build()
    if spec.variant == "dimension_n":
        n = spec.params["n"]
        return n, n
    cl = classify(t)
    b = beta_tree(t, cl)
    heavy = [pr.m for pr in cl.profiles.values() if pr.m >= 2]
    mid = sum(heavy) - len(heavy)
    if spec.variant in ("caterpillar", "central_path_pendant"):
        return b, b + 3
    if spec.variant == "lobster":
        return b + mid, b + mid + 3
    if spec.variant == "spider":
        if all(k == 1 for k in spec.params["legs"]):
            return b + 1, b + 1
        return b + mid, b + mid + 2
    d, depth = spec.params["d"], spec.params["t"]
    if depth <= 2:
        return b, b + d
    return b, b + d * (d - 1) ** (depth - 3) * (d - 2)


# --- characterisation for pendant caterpillars ------------------------------


@dataclass(frozen=True)
class CharacterizationResult:
    eligible: bool
    satisfied: bool
    failing_condition: Optional[int]
    path: tuple[int, ...] = ()
    stems: tuple[int, ...] = ()  # the k1, k2, k3 stems when they exist

    def __iter__(self):
        return iter((self.eligible, self.satisfied, self.failing_condition))


def _diametral_paths(t: Tree) -> list[list[int]]:
    d = t.distances
    diam = int(d.max())
    ends = [(a, b) for a in range(t.n) for b in range(a + 1, t.n) if d[a, b] == diam]
    paths = []
    for a, b in ends:
        p = t.path(a, b)
        paths.append(min(p, p[::-1]))
    return sorted(paths)


def central_path(t: Tree, cl: Classification | None = None) -> Optional[list[int]]:
    """Lexicographically smallest longest leaf-to-leaf path containing every
    stem, or None when no longest path does."""
    cl = cl or classify(t)
    for p in _diametral_paths(t):
        on = set(p)
        if all(s in on for s in cl.stems):
            return p
    return None


def check_characterization(t: Tree) -> CharacterizationResult:
    """Eligibility (pendant-only legs, all stems on one longest path) and the
    three stem-position conditions for the cube and the tree to share their
    metric dimension.

    Positions are distances from v_1, the first stem on the central path.
    """
    if t.n < 3 or t.is_path():
        return CharacterizationResult(False, False, None)
    cl = classify(t)
    if not cl.stems or any(leg.kind != PENDANT for leg in cl.legs):
        return CharacterizationResult(False, False, None)
    p = central_path(t, cl)
    if p is None:
        return CharacterizationResult(False, False, None)

    spine = p[1:-1]  # v_1 .. v_n; the ends of p are the leaves x_1, x_n
    pos = {v: i for i, v in enumerate(spine)}
    last = len(spine) - 1
    stems = sorted(pos[s] for s in cl.stems)
    major = sorted(pos[s] for s in cl.major_stems)

    def fail(k: int, chosen=()) -> CharacterizationResult:
        return CharacterizationResult(True, False, k, tuple(p), tuple(spine[i] for i in chosen))

    # condition 1: major stems after v_1 (v_n allowed) at offsets 2, 1, 0
    # (mod 3) from v_1, each the nearest after the previous one with a step
    # of 2 (mod 3)
    chosen = []
    prev = 0
    for _ in range(3):
        nxt = next((q for q in major if q > prev and (q - prev) % 3 == 2), None)
        if nxt is None:
            return fail(1, chosen)
        chosen.append(nxt)
        prev = nxt
    k1, k2, k3 = chosen

    # condition 2: no stem at 1 (mod 3) from v_1 strictly before v_k1, and
    # none at 1 (mod 3) from v_n strictly between v_k3 and v_n
    if any(0 < q < k1 and q % 3 == 1 for q in stems):
        return fail(2, chosen)
    if any(k3 < q < last and (last - q) % 3 == 1 for q in stems):
        return fail(2, chosen)

    # condition 3: no stem v_m beyond v_k2 whose next major stem v_k is at
    # 1 (mod 3) while every major stem from v_k on is at 0 (mod 3) from v_k
    for m in stems:
        if m <= k2:
            continue
        k = next((q for q in major if q > m), None)
        if k is None or (k - m) % 3 != 1:
            continue
        if all((r - k) % 3 == 0 for r in major if r >= k):
            return fail(3, chosen)
    return CharacterizationResult(True, True, None, tuple(p), tuple(spine[i] for i in chosen))


def check_mod3_pair_necessity(t: Tree) -> bool:
    """Is some pair of major stems at a distance not divisible by 3?"""
    cl = classify(t)
    major = sorted(cl.major_stems)
    if len(major) < 2:
        raise ValueError("need at least two major stems")
    d = t.distances
    return any(d[a, b] % 3 != 0 for a, b in itertools.combinations(major, 2))

"""Trees, tree distances and the stem/leg vocabulary used throughout the package."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

# Above this many vertices the dense distance matrix is refused; use
# Tree.distances_from for single-source queries instead.
DENSE_LIMIT = 2000

LEAF = "leaf"
PATH_VERTEX = "path_vertex"
CORE = "core"

PENDANT = "pendant"
MIDLEG = "midleg"
LONGLEG = "longleg"


class TreeError(ValueError):
    """Input does not describe a tree."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Tree:
    """Immutable tree on vertices ``0..n-1``.

    Build through :meth:`from_edges` or :func:`parse_tree`; both validate.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Tree:
        if n < 2:
            raise TreeError("a tree needs at least two vertices")
        adj: list[set[int]] = [set() for _ in range(n)]
        norm = []
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise TreeError(f"edge ({u}, {v}) has a label outside 0..{n - 1}")
            if u == v:
                raise TreeError(f"self-loop at {u}")
            if v in adj[u]:
                raise TreeError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
            norm.append((min(u, v), max(u, v)))
        if len(norm) != n - 1:
            raise TreeError(f"{n} vertices need {n - 1} edges, got {len(norm)}")
        seen = _reachable(adj, 0)
        if len(seen) != n:
            raise TreeError("graph is disconnected")
        return cls(
            n=n,
            adjacency=tuple(tuple(sorted(a)) for a in adj),
            edges=tuple(sorted(norm)),
        )

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @cached_property
    def distances(self) -> np.ndarray:
        """Dense ``n x n`` hop-count matrix (read-only)."""
        return all_pairs_distances(self)

    def distances_from(self, source: int) -> list[int]:
        dist = [-1] * self.n
        dist[source] = 0
        queue = deque([source])
        while queue:
            w = queue.popleft()
            for y in self.adjacency[w]:
                if dist[y] < 0:
                    dist[y] = dist[w] + 1
                    queue.append(y)
        return dist

    def path(self, u: int, v: int) -> list[int]:
        """Vertices of the unique u-v path, endpoints included."""
        d = self.distances
        out = [u]
        w = u
        while w != v:
            w = next(y for y in self.adjacency[w] if d[y, v] == d[w, v] - 1)
            out.append(w)
        return out

    def is_path(self) -> bool:
        return max(self.degrees) <= 2

    def relabel(self, perm: Sequence[int]) -> Tree:
        """Tree with vertex ``v`` renamed to ``perm[v]``."""
        return Tree.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Tree) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Tree(n={self.n}, edges={list(self.edges)})"


def _reachable(adj, start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        w = stack.pop()
        for y in adj[w]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def parse_tree(text: str) -> Tree:
    """Parse an edge list (one ``u v`` pair per line, ``#`` comments allowed).

    Labels may be any nonnegative integers; they are compacted to ``0..n-1``
    in order of first appearance.
    """
    return parse_tree_labeled(text)[0]


def parse_tree_labeled(text: str) -> tuple[Tree, dict[int, int]]:
    """Like :func:`parse_tree`, also returning the input-label -> vertex map.

    Labels that are exactly ``0..n-1`` are kept; any other label set is
    compacted in order of first appearance.
    """
    labels: dict[int, int] = {}
    parent: list[int] = []  # union-find over compacted labels
    adj: list[set[int]] = []
    edges = []

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def intern(raw: int) -> int:
        if raw not in labels:
            labels[raw] = len(labels)
            parent.append(labels[raw])
            adj.append(set())
        return labels[raw]

    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 2:
            raise TreeError(f"expected two vertex labels, got {body!r}", lineno)
        try:
            a, b = (int(p) for p in parts)
        except ValueError:
            raise TreeError(f"labels must be integers, got {body!r}", lineno) from None
        if a < 0 or b < 0:
            raise TreeError("labels must be nonnegative", lineno)
        if a == b:
            raise TreeError(f"self-loop at {a}", lineno)
        u, v = intern(a), intern(b)
        if v in adj[u]:
            raise TreeError(f"duplicate edge ({a}, {b})", lineno)
        ru, rv = find(u), find(v)
        if ru == rv:
            raise TreeError(f"edge ({a}, {b}) closes a cycle", lineno)
        parent[ru] = rv
        adj[u].add(v)
        adj[v].add(u)
        edges.append((u, v))

    if not labels:
        raise TreeError("no edges found")
    if len(edges) != len(labels) - 1:
        raise TreeError("graph is disconnected")
    if set(labels) == set(range(len(labels))):
        # labels already 0..n-1: keep them so output ids match the input
        inv = {v: raw for raw, v in labels.items()}
        edges = [(inv[u], inv[v]) for u, v in edges]
        labels = {raw: raw for raw in labels}
    return Tree.from_edges(len(labels), edges), labels


def all_pairs_distances(t: Tree) -> np.ndarray:
    """Hop counts between every pair of vertices, one BFS per source."""
    if t.n > DENSE_LIMIT:
        raise ValueError(
            f"n={t.n} exceeds the dense limit {DENSE_LIMIT}; use Tree.distances_from"
        )
    d = np.empty((t.n, t.n), dtype=np.int32)
    for s in range(t.n):
        d[s] = t.distances_from(s)
    d.setflags(write=False)
    return d


def power_distance(d_tree, r: int = 3):
    """Distance in the r-th power of the tree: ``ceil(d_tree / r)``.

    Works elementwise on numpy arrays.
    """
    return -(-d_tree // r)


@dataclass(frozen=True)
class Leg:
    stem: int
    vertices: tuple[int, ...]  # stem-neighbour first, leaf last

    @property
    def length(self) -> int:
        return len(self.vertices)

    @property
    def kind(self) -> str:
        if self.length == 1:
            return PENDANT
        if self.length == 2:
            return MIDLEG
        return LONGLEG

    @property
    def leaf(self) -> int:
        return self.vertices[-1]


@dataclass(frozen=True)
class StemProfile:
    p: int
    m: int
    l: int

    @property
    def total(self) -> int:
        return self.p + self.m + self.l


@dataclass(frozen=True)
class Classification:
    roles: tuple[str, ...]
    stems: frozenset[int]
    major_stems: frozenset[int]
    minor_stems: frozenset[int]
    legs: tuple[Leg, ...]
    profiles: dict[int, StemProfile] = field(hash=False)

    def legs_of(self, stem: int) -> list[Leg]:
        return [leg for leg in self.legs if leg.stem == stem]

    def leg_vertices(self, stem: int) -> set[int]:
        return {w for leg in self.legs_of(stem) for w in leg.vertices}

    @property
    def cores(self) -> list[int]:
        return [v for v, r in enumerate(self.roles) if r == CORE]

    def summary(self) -> dict:
        return {
            "cores": self.cores,
            "stems": sorted(self.stems),
            "major_stems": sorted(self.major_stems),
            "minor_stems": sorted(self.minor_stems),
            "profiles": {
                str(v): {"p": pr.p, "m": pr.m, "l": pr.l}
                for v, pr in sorted(self.profiles.items())
            },
            "legs": [
                {"stem": leg.stem, "vertices": list(leg.vertices), "kind": leg.kind}
                for leg in self.legs
            ],
        }


def classify(t: Tree) -> Classification:
    if t.n < 2:
        raise ValueError("classification needs n >= 2")
    deg = t.degrees
    roles = tuple(LEAF if k == 1 else PATH_VERTEX if k == 2 else CORE for k in deg)

    legs = []
    for leaf in range(t.n):
        if deg[leaf] != 1:
            continue
        walk = [leaf]
        prev, cur = leaf, t.adjacency[leaf][0]
        while deg[cur] == 2:
            walk.append(cur)
            a, b = t.adjacency[cur]
            prev, cur = cur, (b if a == prev else a)
        if deg[cur] >= 3:
            legs.append(Leg(stem=cur, vertices=tuple(reversed(walk))))
        # a walk ending at another leaf means the whole tree is a path: no leg
    legs.sort(key=lambda leg: (leg.stem, leg.leaf))

    count: dict[int, list[int]] = {}
    for leg in legs:
        c = count.setdefault(leg.stem, [0, 0, 0])
        c[(PENDANT, MIDLEG, LONGLEG).index(leg.kind)] += 1
    stems = frozenset(count)
    major = frozenset(v for v, c in count.items() if sum(c) >= 2)
    profiles = {v: StemProfile(*count[v]) for v in sorted(major)}
    return Classification(
        roles=roles,
        stems=stems,
        major_stems=major,
        minor_stems=stems - major,
        legs=tuple(legs),
        profiles=profiles,
    )


class Region(enum.Enum):
    """Where a third vertex sits relative to a pair ``(u, v)``."""

    T_U = "T_u"
    T_V = "T_v"
    T_UV = "T_uv"


def components_relative(t: Tree, u: int, v: int, x: int) -> Region:
    """``T_U`` if x reaches v through u, ``T_V`` symmetrically, else ``T_UV``.

    ``T_UV`` (interior of the u-v path or hanging off it) is empty when u, v
    are adjacent.
    """
    if u == v or x == u or x == v:
        raise ValueError("need distinct u, v and x outside {u, v}")
    d = t.distances
    if d[x, v] == d[x, u] + d[u, v]:
        return Region.T_U
    if d[x, u] == d[x, v] + d[u, v]:
        return Region.T_V
    return Region.T_UV


def to_dot(
    t: Tree,
    basis: Iterable[int] = (),
    extras: Iterable[int] = (),
    name: str = "T",
) -> str:
    """Graphviz source; labels show the role initial, basis red, extras blue."""
    roles = classify(t).roles
    basis, extras = set(basis), set(extras)
    lines = [f"graph {name} {{"]
    for v in range(t.n):
        attrs = [f'label="{v}:{roles[v][0]}"']
        if v in basis:
            attrs.append('style=filled fillcolor="red"')
        elif v in extras:
            attrs.append('style=filled fillcolor="blue" fontcolor="white"')
        lines.append(f"  {v} [{' '.join(attrs)}];")
    for u, v in t.edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"

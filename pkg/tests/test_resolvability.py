from __future__ import annotations

import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from treecube.bounds import construct_resolving_set_cube
from treecube.families import gen_caterpillar
from treecube.oracle import enumerate_trees
from treecube.resolvability import (
    ResolverWindow,
    check_conditions,
    closed_form_table,
    condition_holds_for,
    condition_table,
    conditions_hold,
    consecutive_vertex_rule,
    direct_table,
    is_resolving_set,
    pair_case,
    resolves_closed_form,
    resolves_in_cube,
    separation_table,
    unresolved_pairs,
)
from treecube.tree_model import Region, Tree, components_relative

from .conftest import path_tree, star_tree, trees


# --- direct predicate ------------------------------------------------------


@pytest.mark.parametrize("x, u, v, expected", [(0, 1, 2, False), (0, 2, 3, False)])
def test_resolves_in_cube_on_p4(x, u, v, expected):
    assert resolves_in_cube(path_tree(4), x, u, v) is expected


def test_resolves_in_cube_on_p7():
    assert resolves_in_cube(path_tree(7), 0, 2, 4)


def test_landmark_at_pair_vertex_always_resolves():
    t = path_tree(4)
    assert resolves_in_cube(t, 1, 1, 2)


# --- closed form -----------------------------------------------------------


def test_closed_form_adjacent_residue_zero():
    # x behind u at distance 3
    assert resolves_closed_form(path_tree(5), 0, 3, 4)


def test_closed_form_distance_two_residue_one():
    # x behind u at distance 1
    assert not resolves_closed_form(path_tree(4), 0, 1, 3)


def test_closed_form_interior_pair_at_distance_six():
    # frozen from the direct oracle: ceil(1/3) = 1 differs from ceil(5/3) = 2
    t = path_tree(7)
    assert components_relative(t, 0, 6, 1) is Region.T_UV
    assert resolves_in_cube(t, 1, 0, 6) is True
    assert resolves_closed_form(t, 1, 0, 6) is True


@pytest.mark.parametrize("n", range(2, 8))
def test_closed_form_matches_direct_exhaustively(n):
    for t in enumerate_trees(n, "all"):
        assert np.array_equal(closed_form_table(t.distances), direct_table(t.distances))


@given(trees(min_n=3, max_n=14), st.data())
def test_scalar_closed_form_matches_direct(t, data):
    x, u, v = data.draw(st.permutations(range(t.n)))[:3]
    assert resolves_closed_form(t, x, u, v) == resolves_in_cube(t, x, u, v)


@given(trees(min_n=2, max_n=12))
def test_tables_match_scalars(t):
    cf = closed_form_table(t.distances)
    for x, u, v in itertools.product(range(t.n), repeat=3):
        if len({x, u, v}) == 3:
            assert cf[x, u, v] == resolves_closed_form(t, x, u, v)
        else:
            assert not cf[x, u, v]


def test_tables_accept_stacks():
    ts = [path_tree(6), star_tree(5), gen_caterpillar([2, 2])]
    D = np.stack([t.distances for t in ts])
    assert np.array_equal(closed_form_table(D), direct_table(D))
    pairs, ok = condition_table(D)
    for b, t in enumerate(ts):
        assert np.array_equal(ok[b], condition_table(t.distances)[1])
    assert pairs.shape == (15, 2)


@pytest.mark.parametrize("d, name", [(1, "adjacent"), (3, "dist3"), (7, "far")])
def test_pair_case(d, name):
    assert pair_case(d) == name


# --- resolving sets --------------------------------------------------------


def test_path_endpoint_resolves_path():
    assert is_resolving_set(path_tree(4), [0], power=1)


def test_one_leaf_does_not_resolve_star():
    assert not is_resolving_set(star_tree(3), [1], power=1)


def test_two_leaves_do_not_resolve_star_cube():
    # the cube of K1,3 is K4
    t = star_tree(3)
    assert not is_resolving_set(t, [1, 2], power=3)
    assert unresolved_pairs(t, [1, 2], power=3) == [(0, 3)]
    assert is_resolving_set(t, [1, 2, 3], power=3)


def test_invalid_sets_are_rejected():
    with pytest.raises(ValueError):
        is_resolving_set(path_tree(3), [5])
    with pytest.raises(ValueError):
        is_resolving_set(path_tree(3), [0], power=2)


@given(trees(min_n=3, max_n=12), st.data())
def test_cube_resolving_set_resolves_tree(t, data):
    S = data.draw(st.lists(st.integers(0, t.n - 1), min_size=1, unique=True))
    if is_resolving_set(t, S, 3):
        assert is_resolving_set(t, S, 1)


@given(trees(min_n=3, max_n=12), st.data())
def test_resolution_is_monotone(t, data):
    S = data.draw(st.lists(st.integers(0, t.n - 1), min_size=1, unique=True))
    extra = data.draw(st.integers(0, t.n - 1))
    if is_resolving_set(t, S, 3):
        assert is_resolving_set(t, sorted(set(S) | {extra}), 3)


@given(trees(min_n=4, max_n=12), st.data())
def test_resolving_set_takes_all_but_one_sibling_leaf(t, data):
    S = data.draw(st.lists(st.integers(0, t.n - 1), min_size=1, unique=True))
    if not is_resolving_set(t, S, 3):
        return
    for v in range(t.n):
        leaves = [w for w in t.adjacency[v] if t.degree(w) == 1]
        # sibling leaves are twins, so all but one must be chosen
        assert len([w for w in leaves if w not in S]) <= 1


def _components_without(t: Tree, x: int) -> list[set[int]]:
    comps = []
    for start in t.adjacency[x]:
        seen, stack = {start}, [start]
        while stack:
            a = stack.pop()
            for b in t.adjacency[a]:
                if b != x and b not in seen:
                    seen.add(b)
                    stack.append(b)
        comps.append(seen)
    return comps


@given(trees(min_n=4, max_n=12), st.data())
def test_resolving_set_misses_at_most_one_component(t, data):
    S = set(data.draw(st.lists(st.integers(0, t.n - 1), min_size=1, unique=True)))
    if not is_resolving_set(t, sorted(S), 3):
        return
    for x in range(t.n):
        missed = [c for c in _components_without(t, x) if not c & S]
        assert len(missed) <= 1


@given(trees(min_n=5, max_n=12), st.data())
def test_interior_resolver_at_distance_three_hangs_off_inner_path(t, data):
    u, v = data.draw(st.permutations(range(t.n)))[:2]
    d = t.distances
    if d[u, v] != 3:
        return
    p = t.path(u, v)
    for x in range(t.n):
        if x in p or components_relative(t, u, v, x) is not Region.T_UV:
            continue
        if resolves_in_cube(t, x, u, v):
            # nearest path vertex is one of the two inner vertices
            near = min(p, key=lambda w: d[x, w])
            assert near in (p[1], p[2])
            assert min(d[x, u], d[x, v]) % 3 == 0


# --- pair conditions -------------------------------------------------------


def test_marked_pair_tree_fails_condition_one(marked_pair_tree):
    t, S, pair = marked_pair_tree
    rep = check_conditions(t, S)
    assert [c.passed for c in rep.conditions] == [False, True, True, True, True]
    assert rep.conditions[0].witness == pair
    assert rep.first_failure == 1
    assert not rep.overall
    assert not is_resolving_set(t, S, 3)


def test_full_vertex_set_passes_all_conditions():
    t = gen_caterpillar([2, 0, 1, 3])
    rep = check_conditions(t, range(t.n))
    assert rep.overall and all(c.passed for c in rep.conditions)


def test_construction_output_passes_conditions():
    rng = np.random.default_rng(10)
    counts = [2, *rng.integers(0, 3, 2).tolist(), 2]
    t = gen_caterpillar(counts)
    t = t if t.n == 10 else gen_caterpillar([2, 1, 1, 2])
    assert t.n == 10
    built = construct_resolving_set_cube(t)
    assert is_resolving_set(t, built.S, 3)
    assert check_conditions(t, built.S).overall


@pytest.mark.parametrize("n", range(3, 8))
def test_conditions_match_resolution_exhaustively(n):
    for t in enumerate_trees(n, "all"):
        for k in (1, 2):
            for S in itertools.combinations(range(n), k):
                assert conditions_hold(t, S) == is_resolving_set(t, S, 3)


@given(trees(min_n=3, max_n=14), st.data())
def test_condition_report_matches_resolution(t, data):
    S = data.draw(st.lists(st.integers(0, t.n - 1), min_size=1, unique=True))
    rep = check_conditions(t, S)
    assert rep.overall == conditions_hold(t, S) == is_resolving_set(t, S, 3)
    assert len(rep.conditions) == 5


@given(trees(min_n=3, max_n=12))
def test_condition_table_matches_scalar(t):
    d = t.distances
    pairs, ok = condition_table(d)
    for i, (u, v) in enumerate(pairs.tolist()):
        k = int(d[u, v])
        for x in range(t.n):
            if x in (u, v) or k > 5:
                assert ok[x, i]
            else:
                assert ok[x, i] == condition_holds_for(k, int(d[x, u]), int(d[x, v]))


@given(trees(min_n=3, max_n=12))
def test_separation_table_matches_direct(t):
    pairs, sep = separation_table(t.distances, 3)
    for i, (u, v) in enumerate(pairs.tolist()):
        for x in range(t.n):
            assert sep[x, i] == resolves_in_cube(t, x, u, v)


def test_condition_holds_for_rejects_far_pairs():
    with pytest.raises(ValueError):
        condition_holds_for(6, 1, 7)


def test_report_serialisation(marked_pair_tree):
    t, S, _ = marked_pair_tree
    rep = check_conditions(t, S)
    data = json.loads(rep.to_json())
    assert data["overall"] is False
    assert data["conditions"][0]["witness"] == [2, 3]
    assert data["set"] == sorted(S) or data["set"] == list(S)
    text = rep.to_text()
    assert "condition 1: FAIL" in text and "not resolving" in text


# --- resolver windows ------------------------------------------------------


def test_window_examples():
    t = path_tree(12)
    assert [w.window for w in consecutive_vertex_rule(t, 5, 6)] == [3, 3]
    assert [w.window for w in consecutive_vertex_rule(t, 4, 6)] == [2, 2]
    rules = consecutive_vertex_rule(t, 3, 7)
    assert any(w.branches and w.window == 2 for w in rules)
    with pytest.raises(ValueError):
        consecutive_vertex_rule(t, 0, 6)


def _beyond(t: Tree, anchor: int, other: int, start: int, window: int) -> list[int]:
    d = t.distances
    return [
        x for x in range(t.n)
        if d[x, other] == d[x, anchor] + d[anchor, other]
        and start <= d[x, anchor] < start + window
    ]


@given(trees(min_n=6, max_n=14), st.data())
def test_side_windows_always_contain_a_resolver(t, data):
    d = t.distances
    u, v = data.draw(st.permutations(range(t.n)))[:2]
    k = int(d[u, v])
    if k not in (1, 2):
        return
    for rule in consecutive_vertex_rule(t, u, v):
        assert isinstance(rule, ResolverWindow)
        other = v if rule.anchor == u else u
        # any window of consecutive distances along one branch beyond the
        # anchor holds a resolver, as long as the branch reaches that far
        for start in range(rule.start, int(d[rule.anchor].max()) + 1):
            xs = _beyond(t, rule.anchor, other, start, rule.window)
            reach = {int(d[x, rule.anchor]) for x in xs}
            if len(reach) < rule.window:
                continue
            # consecutive vertices on a single downward path
            for x in xs:
                if d[x, rule.anchor] != start + rule.window - 1:
                    continue
                chain = [w for w in t.path(rule.anchor, x) if d[w, rule.anchor] >= start]
                assert any(resolves_in_cube(t, w, u, v) for w in chain)

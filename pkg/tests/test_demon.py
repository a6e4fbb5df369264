import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hatters import _kernels, demon
from hatters import constructions as cons
from hatters.game import GameSpec, SpecError, Strategy, is_demonic, random_table_strategy, rule_cube
from hatters.graphcore import (
    Graph, VertexOrder, degeneracy_order, make_complete, make_cycle, make_path,
    make_tree_random, subdivide,
)


def brute_dominant(cube, s):
    """Enumerate every cube with sides k - s."""
    k, t = cube.shape[-1], cube.ndim - 1
    sides = list(itertools.combinations(range(k), k - s))
    out = set()
    for d in range(k):
        for choice in itertools.product(sides, repeat=t):
            if all(cube[x + (d,)] for x in itertools.product(*choice)):
                out.add(d)
                break
    return frozenset(out)


@given(st.integers(0, 2), st.integers(2, 5), st.integers(1, 2), st.integers(0, 2**32 - 1))
@settings(max_examples=150, deadline=None)
def test_dominant_matches_brute_force(t, k, s, seed):
    if s >= k:
        return
    rng = np.random.default_rng(seed)
    # bias toward dense preimages so dominant colors actually occur
    weights = rng.dirichlet(np.ones(k) * 0.3)
    flat = np.zeros((k ** t, k), dtype=bool)
    for i in range(k ** t):
        flat[i, rng.choice(k, size=s, replace=False, p=weights)] = True
    cube = flat.reshape((k,) * t + (k,))
    assert demon.dominant_colors(cube, s) == brute_dominant(cube, s)


def test_dominant_constant_rule():
    cube = np.zeros((4, 4, 4), dtype=bool)
    cube[..., 2] = True
    assert demon.dominant_colors(cube, 1) == {2}


@pytest.mark.parametrize("seed", range(30))
def test_tree_demonic_is_demonic(seed):
    rng = np.random.default_rng(seed)
    t = make_tree_random(int(rng.integers(1, 9)), seed)
    spec = GameSpec.uniform(t, 3)
    strat = random_table_strategy(spec, seed)
    c = demon.tree_demonic(t, strat, 3)
    assert is_demonic(spec, strat, c)


def test_tree_demonic_multi_guess_and_forest():
    forest = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4)])
    spec = GameSpec.uniform(forest, 7, 2)
    for seed in range(10):
        strat = random_table_strategy(spec, seed)
        assert is_demonic(spec, strat, demon.tree_demonic(forest, strat, 7, 2))


def test_tree_demonic_backends_agree():
    if _kernels.tree_demon is None:
        pytest.skip("compiled kernels not built")
    for seed in range(40):
        t = make_tree_random(6, seed)
        spec = GameSpec.uniform(t, 7, 2)
        strat = random_table_strategy(spec, seed)
        a = demon.tree_demonic(t, strat, 7, 2, backend="python")
        b = demon.tree_demonic(t, strat, 7, 2, backend="cython")
        assert a == b


def test_tree_demonic_preconditions():
    t = make_path(3)
    strat = random_table_strategy(GameSpec.uniform(t, 2), 0)
    with pytest.raises(demon.DemonError):
        demon.tree_demonic(t, strat, 2)
    with pytest.raises(demon.DemonError):
        demon.tree_demonic(make_cycle(3), random_table_strategy(GameSpec.uniform(make_cycle(3), 3), 0), 3)


def test_tree_demonic_respects_root_color():
    t = make_path(4)
    spec = GameSpec.uniform(t, 3)
    strat = random_table_strategy(spec, 11)
    dom = demon.rule_dominant_colors(strat[0], 3)
    for c in set(range(3)) - dom:
        col = demon.tree_demonic(t, strat, 3, c=c)
        assert col[0] == c and is_demonic(spec, strat, col)


def test_partition_subdivision():
    g, orig, new = subdivide(make_complete(4))
    spec = GameSpec.uniform(g, 5)
    for seed in range(10):
        strat = random_table_strategy(spec, seed)
        c = demon.partition_demonic(g, orig, new, strat, 5, 1, 2,
                                    demon.independent_demon, demon.independent_demon)
        assert is_demonic(spec, strat, c)
        assert all(c[v] < 2 for v in orig)


def test_partition_rejects_bad_parameters():
    g, orig, new = subdivide(make_complete(3))
    strat = random_table_strategy(GameSpec.uniform(g, 4), 0)
    with pytest.raises(SpecError):  # s1 = 4 is not below K = 4
        demon.partition_demonic(g, orig, new, strat, 4, 1, 2,
                                demon.independent_demon, demon.independent_demon)
    with pytest.raises(SpecError):
        demon.partition_demonic(g, orig, new[:-1], strat, 4, 1, 2,
                                demon.independent_demon, demon.independent_demon)


def test_bipolar_demon_on_trees():
    t = make_tree_random(6, 2)
    order, col = degeneracy_order(t)
    assert col == 2
    # red-or-copy of the last neighbor is bi-polar for that order
    spec = GameSpec.uniform(t, 3)
    rules = [cons.red_or_copy_rule(t, v, max(t.adj[v], key=lambda u: order.position[u]), 3)
             for v in range(t.n)]
    strat = Strategy(rules).tabulate()
    c = demon.bipolar_demonic(t, order, strat, 3)
    assert is_demonic(spec, strat, c)


def test_bipolar_needs_enough_colors():
    g = make_complete(3)
    strat = cons.clique_sum_strategy(3, 3).tabulate()
    with pytest.raises(demon.DemonError):
        demon.bipolar_demonic(g, VertexOrder.of(g, [0, 1, 2]), strat, 3)


def test_red_or_copy_bipolar_iff_w_last():
    g = make_cycle(4)
    spec = GameSpec.uniform(g, 4)
    for perm in itertools.permutations(range(4)):
        order = VertexOrder.of(g, perm)
        for v in range(4):
            for w in g.adj[v]:
                rule = cons.red_or_copy_rule(g, v, w, 4)
                last = max(g.adj[v], key=lambda u: order.position[u]) == w
                assert demon.is_bipolar(spec, v, rule, order) == last


def test_exhaustive_search_finds_first():
    spec = GameSpec.uniform(make_path(3), 3)
    strat = random_table_strategy(spec, 0)
    c = demon.exhaustive_demonic_search(spec, strat)
    assert is_demonic(spec, strat, c)
    assert all(not is_demonic(spec, strat, d) for d in spec.colorings() if d < c)
    assert demon.exhaustive_demonic_search(cons.clique_sum_spec(3), cons.clique_sum_strategy(3)) is None


def test_cube_helpers():
    cube = demon.Cube(({0, 1}, {2}))
    assert (1, 2) in cube and (2, 2) not in cube
    assert list(cube) == [(0, 2), (1, 2)]
    assert cube.intersect(demon.Cube(({1}, {2, 3}))) == demon.Cube(({1}, {2}))
    assert cube.intersect(demon.Cube(({3}, {2}))) is None
    assert rule_cube(random_table_strategy(GameSpec.uniform(make_path(2), 3), 0)[0], 3).shape == (3, 3)

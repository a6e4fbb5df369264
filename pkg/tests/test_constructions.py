import itertools

import numpy as np
import pytest

from hatters import constructions as cons
from hatters.game import (
    GameSpec, SpecError, evaluate, strategy_from_json, strategy_to_json, verify_winning,
)
from hatters.graphcore import make_complete, make_cycle, make_path, make_tree_random, nonisomorphic_trees


@pytest.mark.parametrize("n", range(2, 6))
def test_clique_sum_exactly_one_correct(n):
    spec = cons.clique_sum_spec(n)
    strat = cons.clique_sum_strategy(n)
    for c in itertools.product(range(n), repeat=n):
        assert evaluate(spec, strat, c) == {sum(c) % n}


def test_clique_sum_loses_with_extra_color():
    spec = cons.clique_sum_spec(3, 4)
    assert not verify_winning(spec, cons.clique_sum_strategy(3, 4))


def test_tree_power_small_cases():
    palette, strat = cons.tree_power_strategy(make_path(2))
    assert palette == (2, 2)
    assert verify_winning(GameSpec(make_path(2), palette), strat)
    t = make_tree_random(7, seed=4)
    palette, strat = cons.tree_power_strategy(t)
    assert palette == tuple(2 ** d for d in t.degrees)
    assert verify_winning(GameSpec(t, palette), strat)


def test_tree_power_rejects_non_trees():
    with pytest.raises(SpecError):
        cons.tree_power_strategy(make_cycle(4))


def test_kn_admissible_examples():
    spec = GameSpec.uniform(make_complete(2), 3, admissible=[(0, 0), (1, 1), (0, 1)])
    assert verify_winning(spec, cons.kn_admissible_strategy(2, 3, spec.admissible))
    rng = np.random.default_rng(7)
    for _ in range(20):
        A = [tuple(int(x) for x in rng.integers(0, 4, 3)) for _ in range(7)]
        A = list(dict.fromkeys(A))
        spec = GameSpec.uniform(make_complete(3), 4, admissible=A)
        assert verify_winning(spec, cons.kn_admissible_strategy(3, 4, A))


def test_kn_admissible_rejects_large_A():
    A = list(itertools.product(range(2), repeat=2))
    with pytest.raises(SpecError):
        cons.kn_admissible_strategy(2, 2, A)


def test_kstar_k1_exhaustive():
    spec, strat = cons.kstar_strategy(1)
    assert spec.n == 3 and verify_winning(spec, strat)


def test_kstar_guard():
    with pytest.raises(SpecError):
        cons.kstar_strategy(3)


def test_kstar_leaf_rule_and_A():
    ks = cons.KStar(2)
    assert ks.n_leaves == 560 and ks.K == 4
    # leaf j guesses the rank of the clique coloring inside its subset
    j = 100
    S = ks.subsets[j]
    for pos, x in enumerate(S):
        assert ks.leaf_rule(j).guess(ks.clique_colorings[x]) == (pos,)
    rng = np.random.default_rng(1)
    for _ in range(200):
        leaves = rng.integers(0, 4, ks.n_leaves)
        assert len(ks.unguessed(leaves)) <= 3


def test_kstar_batch_matches_scalar():
    ks = cons.KStar(2)
    strat = ks.strategy()
    rng = np.random.default_rng(2)
    cols = rng.integers(0, 4, size=(5, 2 + ks.n_leaves))
    correct, _ = ks.evaluate_batch(cols)
    for row, got in zip(cols, correct):
        assert len(evaluate(ks.spec, strat, tuple(int(x) for x in row))) == got


def test_rule_descriptors_roundtrip():
    spec = cons.clique_sum_spec(3)
    strat = cons.clique_sum_strategy(3)
    data = strategy_to_json(strat, 1)
    assert data[0]["rule"] == "clique_sum"
    back = strategy_from_json(data, spec, cons.rule_from_descriptor)
    for c in itertools.product(range(3), repeat=3):
        assert evaluate(spec, back, c) == evaluate(spec, strat, c)


def test_red_or_copy_rule():
    g = make_cycle(4)
    rule = cons.red_or_copy_rule(g, 0, 3, 4)
    assert rule.neighbors == (1, 3)
    assert rule.guess((0, 2)) == (0,)
    assert rule.guess((2, 3)) == (3,)


def test_clique_witness():
    g = make_cycle(3)
    spec = GameSpec.uniform(g, 3)
    assert verify_winning(spec, cons.clique_witness(g, 3))
    assert cons.clique_witness(make_cycle(5), 3) is None
    t = nonisomorphic_trees(5)[0]
    assert verify_winning(GameSpec.uniform(t, 2), cons.clique_witness(t, 2))

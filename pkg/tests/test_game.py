import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hatters.game import (
    FuncRule, GameSpec, SpecError, Strategy, TableRule, coloring_from_json, coloring_to_json,
    constant_strategy, decode_view, encode_view, evaluate, is_demonic, random_table_strategy,
    restrict, rule_cube, rule_from_cube, strategy_from_json, strategy_to_json, tabulate_rule,
    verify_winning,
)
from hatters.graphcore import make_complete, make_cycle, make_path


@given(st.lists(st.integers(1, 5), min_size=0, max_size=5).flatmap(
    lambda r: st.tuples(st.just(r), st.tuples(*[st.integers(0, x - 1) for x in r]))))
def test_view_code_roundtrip(case):
    radices, view = case
    code = encode_view(view, radices)
    assert 0 <= code < int(np.prod(radices, dtype=np.int64))
    assert decode_view(code, radices) == tuple(view)


def test_smallest_neighbor_is_least_significant():
    assert encode_view((1, 0), (3, 3)) == 1
    assert encode_view((0, 1), (3, 3)) == 3


def test_spec_validation():
    g = make_path(2)
    with pytest.raises(SpecError):
        GameSpec(g, (2,))
    with pytest.raises(SpecError):
        GameSpec.uniform(g, 2, s=2)
    with pytest.raises(SpecError):
        GameSpec.uniform(g, 2, admissible=[(0, 2)])
    with pytest.raises(SpecError):
        GameSpec.uniform(g, 2, admissible=[(0, 1), (0, 1)])
    spec = GameSpec.uniform(g, 3, admissible=[(1, 1), (0, 2)])
    assert list(spec.colorings()) == [(0, 2), (1, 1)]


def test_table_rule_checks():
    with pytest.raises(SpecError):
        TableRule((1,), (3,), [0, 1])
    with pytest.raises(SpecError):
        TableRule((1,), (2,), [[0, 0], [1, -1]])
    r = TableRule((1,), (2,), [[1, 0], [1, -1]])
    assert r.guess((0,)) == (0, 1) and r.guess((1,)) == (1,)


def test_evaluate_k2_parity():
    # on K_2 with 2 colors: vertex 0 guesses "same", vertex 1 "different"
    g = make_complete(2)
    spec = GameSpec.uniform(g, 2)
    strat = Strategy([TableRule((1,), (2,), [0, 1]), TableRule((0,), (2,), [1, 0])])
    for c in itertools.product(range(2), repeat=2):
        assert len(evaluate(spec, strat, c)) == 1
    assert verify_winning(spec, strat)


def test_counterexample_is_lexicographically_first():
    spec = GameSpec.uniform(make_cycle(4), 3)
    strat = constant_strategy(spec, (0,))
    res = verify_winning(spec, strat)
    assert not res and res.coloring == (1, 1, 1, 1)
    assert is_demonic(spec, strat, res.coloring)


def test_verify_agrees_with_brute_force():
    spec = GameSpec.uniform(make_path(4), 3)
    for seed in range(20):
        strat = random_table_strategy(spec, seed)
        brute = next((c for c in spec.colorings() if is_demonic(spec, strat, c)), None)
        res = verify_winning(spec, strat)
        assert (brute is None) == bool(res)
        if brute is not None:
            assert res.coloring == brute


def test_verify_threads_same_answer():
    spec = GameSpec.uniform(make_cycle(5), 3)
    for seed in range(5):
        strat = random_table_strategy(spec, seed)
        assert verify_winning(spec, strat) == verify_winning(spec, strat, threads=2)


def test_admissible_verification_only_scans_A():
    spec = GameSpec.uniform(make_complete(2), 3, admissible=[(0, 0)])
    assert verify_winning(spec, constant_strategy(spec, (0,)))


def test_restrict_matches_func_rule():
    spec = GameSpec.uniform(make_complete(4), 3)
    rule = random_table_strategy(spec, 3)[0]  # reads 1, 2, 3
    fixed = {2: 1}
    r = restrict(rule, fixed)
    assert r.neighbors == (1, 3)
    for a, b in itertools.product(range(3), repeat=2):
        assert r.guess((a, b)) == rule.guess((a, 1, b))
    f = restrict(FuncRule(rule.neighbors, rule.radices, rule.guess), fixed)
    assert tabulate_rule(f) == r


def test_cube_roundtrip():
    spec = GameSpec.uniform(make_complete(3), 4, 2)
    rule = random_table_strategy(spec, 1)[0]
    cube = rule_cube(rule, 4)
    assert cube.shape == (4, 4, 4) and (cube.sum(axis=-1) == 2).all()
    assert rule_from_cube(rule.neighbors, cube) == rule


def test_json_roundtrip():
    spec = GameSpec.uniform(make_cycle(4), 3, 2)
    strat = random_table_strategy(spec, 5)
    back = strategy_from_json(strategy_to_json(strat, 2), spec)
    assert all(a == b for a, b in zip(back.rules, strat.rules))
    assert coloring_from_json(coloring_to_json((2, 0, 1))) == (2, 0, 1)


def test_strategy_check_rejects_wrong_graph():
    spec = GameSpec.uniform(make_cycle(4), 3)
    strat = random_table_strategy(GameSpec.uniform(make_path(4), 3), 0)
    with pytest.raises(SpecError):
        strat.check(spec)

import json
from pathlib import Path

import pytest

from hatters.game import GameSpec, SearchBudget, SpaceTooLarge, verify_winning
from hatters.graphcore import Graph, make_complete, make_cycle, make_empty, make_path
from hatters.solver import (
    NOT_WINNABLE, UNKNOWN, WINNABLE, decide_winnable, decide_winnable_admissible, hat_number,
    naive_winnable,
)

FIXTURE = json.loads((Path(__file__).parent / "fixtures" / "oracle_small.json").read_text())


@pytest.mark.parametrize("case", FIXTURE, ids=lambda c: f"n{c['n']}-{c['edges']}-k{c['k']}")
def test_solver_matches_frozen_oracle(case, quick_budget):
    spec = GameSpec.uniform(Graph.from_edges(case["n"], case["edges"]), case["k"])
    res = decide_winnable(spec, quick_budget)
    assert res.decided
    assert (res.verdict == WINNABLE) == case["winnable"]
    if res.verdict == WINNABLE:
        assert verify_winning(spec, res.strategy)


@pytest.mark.parametrize("g,k,expected", [
    (make_complete(2), 2, True), (make_complete(2), 3, False), (make_path(3), 3, False),
    (make_complete(3), 3, True), (make_empty(1), 2, False),
])
def test_oracle_small_cases(g, k, expected):
    assert naive_winnable(GameSpec.uniform(g, k)) is expected


def test_hat_number_examples():
    assert hat_number(make_complete(3), k_max=4).value == 3
    assert hat_number(make_path(3), k_max=3).value == 2
    assert hat_number(make_empty(1), k_max=3).value == 1
    hn = hat_number(make_cycle(4), budget=SearchBudget(time_limit=30))
    assert hn.value == 3 and not hn.anomaly
    assert hn.to_json()["mu"] == 3


def test_hat_number_interval_on_unknown():
    hn = hat_number(make_cycle(4), k_max=3, budget=SearchBudget(node_limit=1))
    assert hn.lower == 2 and hn.upper == 4 and hn.value is None


def test_multi_guess_small():
    # K_2 with two guesses each: 4 colors are winnable, 5 are not
    assert decide_winnable(GameSpec.uniform(make_complete(2), 4, 2)).verdict == WINNABLE
    assert decide_winnable(GameSpec.uniform(make_complete(2), 5, 2)).verdict == NOT_WINNABLE


def test_symmetry_preserves_verdicts(quick_budget):
    for g, k in [(make_cycle(4), 3), (make_path(4), 3), (make_complete(3), 3), (make_cycle(4), 4)]:
        spec = GameSpec.uniform(g, k)
        a = decide_winnable(spec, quick_budget)
        b = decide_winnable(spec, quick_budget, symmetry=True)
        assert a.verdict == b.verdict


def test_components_split():
    g = Graph.from_edges(5, [(0, 1), (0, 2), (1, 2)])
    res = decide_winnable(GameSpec.uniform(g, 3))
    assert res.verdict == WINNABLE and verify_winning(GameSpec.uniform(g, 3), res.strategy)
    assert decide_winnable(GameSpec.uniform(g, 4)).verdict == NOT_WINNABLE


def test_budget_exhaustion_is_unknown():
    res = decide_winnable(GameSpec.uniform(make_cycle(4), 3), SearchBudget(node_limit=1))
    assert res.verdict == UNKNOWN and not res.decided


def test_threads_same_verdict():
    for g, k in [(make_cycle(4), 3), (make_path(4), 3)]:
        spec = GameSpec.uniform(g, k)
        one = decide_winnable(spec)
        two = decide_winnable(spec, SearchBudget(threads=2))
        assert one.verdict == two.verdict


def test_admissible_examples():
    K2 = make_complete(2)
    for K in (2, 3, 5):
        spec = GameSpec.uniform(K2, K, admissible=[(0, 0), (1, 1), (0, 1)])
        assert decide_winnable_admissible(spec).verdict == WINNABLE
    full = GameSpec.uniform(K2, 2, admissible=[(0, 0), (0, 1), (1, 0), (1, 1)])
    assert decide_winnable_admissible(full).verdict == WINNABLE
    one = GameSpec.uniform(make_cycle(5), 4, admissible=[(3, 1, 0, 2, 2)])
    assert decide_winnable_admissible(one).verdict == WINNABLE
    # K_1 with 2 admissible colorings cannot be won with one guess
    two = GameSpec.uniform(make_empty(1), 3, admissible=[(0,), (1,)])
    assert decide_winnable_admissible(two).verdict == NOT_WINNABLE


def test_space_guard():
    with pytest.raises(SpaceTooLarge):
        decide_winnable(GameSpec.uniform(make_complete(12), 5))

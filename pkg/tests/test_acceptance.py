"""The thirteen acceptance criteria, each at its stated size and tolerance.

Every test records one PASS/FAIL line (shown in the terminal summary, and
printed directly when run with ``-s`` or as a script).
"""

import json
import time
from pathlib import Path

import pytest

from conftest import ACCEPTANCE_LINES
from hatters import constructions as cons
from hatters.bounds import chromatic_threshold_bound
from hatters.game import GameSpec, SearchBudget, verify_winning
from hatters.graphcore import Graph, make_complete
from hatters.solver import NOT_WINNABLE, UNKNOWN, WINNABLE, decide_winnable
from hatters.suites import run_suite

SEED = 0
FIXTURE = Path(__file__).parent / "fixtures" / "oracle_small.json"


def record(num: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def suite_line(rep) -> str:
    extra = f", {len(rep.failures)} listed failures" if rep.failures else ""
    return f"{rep.checks} checks, {rep.failed} failed{extra} ({rep.seconds:.1f}s)"


def test_01_clique_exactness():
    t0 = time.monotonic()
    wins = [bool(verify_winning(cons.clique_sum_spec(n), cons.clique_sum_strategy(n)))
            for n in range(2, 7)]
    t_verify = time.monotonic() - t0
    t0 = time.monotonic()
    refuted = [decide_winnable(GameSpec.uniform(make_complete(n), n + 1)).verdict for n in (2, 3)]
    t_solve = time.monotonic() - t0
    ok = all(wins) and refuted == [NOT_WINNABLE] * 2 and t_verify < 1 and t_solve < 10
    record(1, "clique exactness", ok,
           f"sum strategy wins K2..K6 {wins} in {t_verify:.2f}s; K2/k3, K3/k4 -> {refuted} "
           f"in {t_solve:.2f}s")


def test_02_tree_upper_bound():
    rep = run_suite("tree_demonic", 200, SEED)
    ok = rep.passed and rep.checks == 200 * 200 + 3 and rep.seconds < 30
    record(2, "trees, 200 x 200 strategies at k=3 + solver on P2/P3/K13", ok, suite_line(rep))


def test_03_multi_guess_trees():
    rep = run_suite("multi_guess", 100, SEED)
    ok = rep.passed and rep.details["trees"] == 8 and rep.checks == 800
    record(3, "multi-guess trees s=2 k=7, n<=5", ok, suite_line(rep))


def test_04_dominant_colors():
    rep = run_suite("dominant", 10_000, SEED)
    ok = rep.passed and rep.checks == 10_000
    record(4, "dominant-color lemmas on 10^4 rules", ok,
           f"{suite_line(rep)}, {rep.details['rules_at_limit']} rules at the limit")


def test_05_subdivision():
    rep = run_suite("subdivision", 200, SEED)
    ok = rep.passed and rep.checks == 400
    record(5, "subdivided K3/K4 with K=5", ok, suite_line(rep))


def test_06_tree_plus_independent():
    rep = run_suite("composition", 200, SEED)
    ok = rep.passed and rep.checks == 200
    record(6, "tree + pendant composition, K=7", ok, suite_line(rep))


def test_07_bipolar():
    rep = run_suite("bipolar", None, SEED)
    ok = rep.passed and rep.details["red_or_copy_agreements"] > 0
    record(7, "bi-polar demon and is_bipolar", ok,
           f"{suite_line(rep)}, {rep.details['red_or_copy_agreements']} copy-rule orders")


def test_08_degree_sequence():
    rep = run_suite("tree_power", None, SEED)
    # trees on 2..8 vertices: 1+1+2+3+6+11+23, all within 10^6 colorings
    ok = rep.passed and rep.details["trees"] == 47
    record(8, "2^deg palettes win on trees n<=8", ok, suite_line(rep))


def test_09_admissible_cliques():
    rep = run_suite("admissible", 200, SEED, SearchBudget(time_limit=30))
    ok = rep.passed and rep.checks == 2 * 200 * 16
    record(9, "admissible K_n, |A|=2^n-1, n<=4, K<=5", ok, suite_line(rep))


def test_10_kstar():
    rep = run_suite("kstar", 100_000, SEED)
    d = rep.details
    ok = rep.passed and d["k2_samples"] == 100_000 and d["max_A"] <= 3
    record(10, "k-star: k=1 exhaustive, k=2 on 10^5 sampled colorings", ok,
           f"{suite_line(rep)}, max |A| = {d['max_A']}, "
           f"{d['no_leaf_correct']} colorings with no leaf correct")


def test_11_bounds_consistency():
    threshold_ok = all(chromatic_threshold_bound(n, n) == n for n in range(2, 40))
    rep = run_suite("bounds", None, SEED, SearchBudget(time_limit=3))
    d = rep.details
    ok = threshold_ok and rep.passed and d["exact_mu"] > 0
    record(11, "bounds >= mu on the <=5-vertex corpus", ok,
           f"{suite_line(rep)}; exact mu for {d['exact_mu']}/{d['graphs']} graphs, "
           f"the rest checked against the proven lower end")


def test_12_oracle_cross_validation():
    cases = json.loads(FIXTURE.read_text())
    budget = SearchBudget(time_limit=30)
    mismatches = []
    for c in cases:
        spec = GameSpec.uniform(Graph.from_edges(c["n"], c["edges"]), c["k"])
        verdict = decide_winnable(spec, budget).verdict
        if verdict == UNKNOWN or (verdict == WINNABLE) != c["winnable"]:
            mismatches.append((c["edges"], c["k"], verdict))
    live = run_suite("oracle", None, SEED, budget)
    ok = not mismatches and len(cases) == 20 and live.passed
    record(12, "solver vs enumeration oracle, connected n<=4, k<=3", ok,
           f"{len(cases)} frozen cases, {len(mismatches)} mismatches; live rerun {suite_line(live)}")


def test_13_stretch():
    rep = run_suite("stretch", None, SEED, SearchBudget(time_limit=90))
    d = rep.details
    ok = rep.failed == 0  # Unknown is acceptable here
    record(13, "stretch: C5/k=3 and C4/k=4 refuted", ok,
           f"C5 k=3 {d['C5_k3']['verdict']}, C4 k=4 {d['C4_k4']['verdict']} ({rep.seconds:.1f}s)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))

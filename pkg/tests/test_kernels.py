"""The compiled kernels and their pure-Python twins must agree exactly."""

import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from hatters import _kernels, _pykernels, solver
from hatters.game import GameSpec, random_table_strategy, verify_winning
from hatters.graphcore import make_complete, make_complete_bipartite, make_cycle, make_path

ck = pytest.importorskip("hatters._ckernels", reason="compiled kernels not built")

CASES = [
    (make_complete(2), 2, 1), (make_path(3), 3, 1), (make_cycle(4), 3, 1),
    (make_complete(3), 3, 1), (make_complete_bipartite(1, 3), 3, 1), (make_path(4), 3, 1),
    (make_path(3), 4, 2), (make_complete(2), 4, 2), (make_complete(2), 5, 2),
]


def _search(mod, inst, init=(), forbids=(), node_limit=10**7):
    sets = np.zeros(inst.C * inst.P, dtype=np.uint8)
    arr = lambda xs, i: np.array([p[i] for p in xs], dtype=np.int64)
    status, nodes = mod.solve_search(
        inst.spec.n, len(inst.colorings), inst.spec.guesses, inst.P, inst.cell_pal,
        inst.cell_of, inst.col_of, inst.mem_ptr, inst.mem_idx,
        arr(init, 0), arr(init, 1), arr(forbids, 0), arr(forbids, 1), node_limit, 60.0, sets)
    return int(status), int(nodes), sets.tobytes()


@pytest.mark.parametrize("g,k,s", CASES)
def test_search_parity(g, k, s):
    inst = solver._instance(GameSpec.uniform(g, k, s))
    assert _search(_pykernels, inst) == _search(ck, inst)


@pytest.mark.parametrize("g,k,s", CASES[:5])
def test_search_parity_with_seeds_and_limits(g, k, s):
    inst = solver._instance(GameSpec.uniform(g, k, s))
    for init, forbids in [([(0, 0)], []), ([], [(0, 0), (1, 1)])]:
        assert _search(_pykernels, inst, init, forbids) == _search(ck, inst, init, forbids)
    assert _search(_pykernels, inst, node_limit=3) == _search(ck, inst, node_limit=3)


def _flat(spec, strat):
    from hatters.game import _flatten
    return _flatten(spec, strat)


@pytest.mark.parametrize("seed", range(10))
def test_scan_parity(seed):
    spec = GameSpec.uniform(make_cycle(5), 3)
    strat = random_table_strategy(spec, seed)
    args = _flat(spec, strat)
    total = spec.coloring_count()
    assert (_pykernels.first_demonic_range(*args, 0, total)
            == ck.first_demonic_range(*args, 0, total))
    cols = np.random.default_rng(seed).integers(0, 3, size=(50, 5))
    assert (_pykernels.first_demonic_list(*args, cols)
            == ck.first_demonic_list(*args, np.ascontiguousarray(cols, dtype=np.int64)))


def test_backend_selection_env():
    code = "from hatters import _kernels; print(_kernels.BACKEND)"
    env = dict(os.environ, HATTERS_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
    assert _kernels.BACKEND == ("python" if os.environ.get("HATTERS_PURE") == "1" else "cython")


def test_pure_backend_end_to_end(monkeypatch):
    monkeypatch.setenv("HATTERS_PURE", "1")
    k = importlib.reload(_kernels)
    try:
        assert k.BACKEND == "python"
        monkeypatch.setattr(solver, "_kernels", k)
        res = solver.decide_winnable(GameSpec.uniform(make_cycle(4), 3))
        assert res.verdict == solver.WINNABLE
        assert verify_winning(GameSpec.uniform(make_cycle(4), 3), res.strategy)
    finally:
        monkeypatch.delenv("HATTERS_PURE")
        importlib.reload(_kernels)

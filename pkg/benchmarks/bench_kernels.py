"""Compiled vs pure-Python kernels on the three hot paths.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Both backends get identical inputs; results are compared before timing is
reported, so a mismatch aborts the run.
"""

from __future__ import annotations

import argparse
import json
import statistics
import time

import numpy as np

from hatters import _pykernels, solver
from hatters import constructions as cons
from hatters.demon import tree_demonic
from hatters.game import GameSpec, _flatten, random_table_strategy
from hatters.graphcore import make_complete, make_cycle, make_path, make_tree_random

try:
    from hatters import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None


def _best(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times), result


def bench_scan(mod, repeat):
    # a winning strategy, so the whole space is scanned
    spec = cons.clique_sum_spec(6)
    args = _flatten(spec, cons.clique_sum_strategy(6).tabulate())
    return _best(lambda: mod.first_demonic_range(*args, 0, spec.coloring_count()), repeat)


def bench_search(mod, repeat, spec):
    inst = solver._instance(spec)

    def run():
        sets = np.zeros(inst.C * inst.P, dtype=np.uint8)
        empty = np.zeros(0, dtype=np.int64)
        status, nodes = mod.solve_search(
            spec.n, len(inst.colorings), spec.guesses, inst.P, inst.cell_pal, inst.cell_of,
            inst.col_of, inst.mem_ptr, inst.mem_idx, empty, empty, empty, empty,
            10**7, 600.0, sets)
        return status, nodes, sets.tobytes()

    return _best(run, repeat)


def bench_tree(backend, repeat):
    trees = [make_tree_random(8, seed) for seed in range(40)]
    strats = [random_table_strategy(GameSpec.uniform(t, 7, 2), i) for i, t in enumerate(trees)]
    return _best(lambda: [tree_demonic(t, s, 7, 2, backend=backend)
                          for t, s in zip(trees, strats)], repeat)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write results here")
    args = ap.parse_args()
    if _ckernels is None:
        raise SystemExit("compiled kernels not built; run: pip install -e . --no-build-isolation")

    rows = []
    cases = [
        ("scan K6 sum strategy (6^6 colorings)", lambda m: bench_scan(m, args.repeat)),
        ("search P4 k=3 (refute)", lambda m: bench_search(m, args.repeat, GameSpec.uniform(make_path(4), 3))),
        ("search C4 k=3 (win)", lambda m: bench_search(m, args.repeat, GameSpec.uniform(make_cycle(4), 3))),
        ("search K3 k=4 (refute)", lambda m: bench_search(m, args.repeat, GameSpec.uniform(make_complete(3), 4))),
    ]
    for name, fn in cases:
        py, c = fn(_pykernels), fn(_ckernels)
        if py[2] != c[2]:
            raise SystemExit(f"{name}: backends disagree")
        rows.append((name, py[0], c[0]))
    py, c = bench_tree("python", args.repeat), bench_tree("cython", args.repeat)
    if py[2] != c[2]:
        raise SystemExit("tree demon: backends disagree")
    rows.append(("tree demon, 40 trees n=8 s=2 k=7", py[0], c[0]))

    print(f"{'kernel':40s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, tp, tc in rows:
        print(f"{name:40s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([{"kernel": n, "python_s": tp, "cython_s": tc} for n, tp, tc in rows],
                      fh, indent=2)


if __name__ == "__main__":
    main()

"""Exact decision procedure for "the Bears can win", plus a naive oracle.

The search assigns guess sets to (vertex, view) cells.  It always branches
on the not-yet-won coloring with the fewest remaining ways to be won and
tries the vertices that could win it in ascending order; after a branch
fails, that (cell, color) pair is forbidden for the siblings, so the
branches are disjoint.  A counting bound prunes nodes where the open cells
cannot possibly cover the colorings still unwon.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .game import (
    GameSpec, SearchBudget, SpaceTooLarge, SpecError, Strategy, TableRule,
    constant_strategy, verify_winning, weights,
)
from .constructions import clique_witness
from .graphcore import Graph

MAX_COLORINGS = 10**7
MAX_CELLS = 10**6

WINNABLE = "winnable"
NOT_WINNABLE = "not_winnable"
UNKNOWN = "unknown"
_STATUS = {1: WINNABLE, 0: NOT_WINNABLE, 2: UNKNOWN}


@dataclass
class SolveResult:
    verdict: str
    strategy: Strategy | None = None
    nodes: int = 0
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def decided(self) -> bool:
        return self.verdict != UNKNOWN


@dataclass
class _Instance:
    spec: GameSpec
    colorings: np.ndarray          # (M, n)
    cell_base: list[int]
    cell_pal: np.ndarray
    cell_of: np.ndarray            # (M*n,)
    col_of: np.ndarray
    mem_ptr: np.ndarray
    mem_idx: np.ndarray
    P: int

    @property
    def C(self) -> int:
        return len(self.cell_pal)


def _instance(spec: GameSpec) -> _Instance:
    M = spec.coloring_count()
    if M > MAX_COLORINGS:
        raise SpaceTooLarge("colorings", M, MAX_COLORINGS)
    n = spec.n
    cell_base, C = [], 0
    for v in range(n):
        cell_base.append(C)
        C += spec.view_count(v)
    if C > MAX_CELLS:
        raise SpaceTooLarge("table cells", C, MAX_CELLS)
    P = max(spec.palette, default=1)
    if spec.admissible is not None:
        cols = np.array(sorted(spec.admissible), dtype=np.int64).reshape(M, n)
    else:
        grids = np.meshgrid(*(np.arange(a) for a in spec.palette), indexing="ij")
        cols = np.stack([g.ravel() for g in grids], axis=1) if n else np.zeros((1, 0), np.int64)
    cell_of = np.zeros((M, n), dtype=np.int64)
    for v in range(n):
        w = weights(spec.radices(v))
        code = np.zeros(M, dtype=np.int64)
        for u, wu in zip(spec.graph.adj[v], w):
            code += cols[:, u] * wu
        cell_of[:, v] = cell_base[v] + code
    cell_pal = np.repeat(np.array(spec.palette, dtype=np.int64),
                         [spec.view_count(v) for v in range(n)])
    keys = (cell_of * P + cols).ravel()
    order = np.argsort(keys, kind="stable")
    counts = np.bincount(keys, minlength=C * P)
    mem_ptr = np.zeros(C * P + 1, dtype=np.int64)
    mem_ptr[1:] = np.cumsum(counts)
    mem_idx = (order // n).astype(np.int64) if n else np.zeros(0, np.int64)
    return _Instance(spec, cols, cell_base, cell_pal, cell_of.ravel().copy(),
                     cols.ravel().astype(np.int64).copy(), mem_ptr, mem_idx, P)


def _certificate(inst: _Instance, sets: np.ndarray) -> Strategy:
    spec, s, P = inst.spec, inst.spec.guesses, inst.P
    rules = []
    for v in range(spec.n):
        views, a = spec.view_count(v), spec.palette[v]
        block = sets[inst.cell_base[v] * P:(inst.cell_base[v] + views) * P].reshape(views, P)[:, :a]
        table = np.full((views, s), -1, dtype=np.int32)
        for code in range(views):
            chosen = [int(x) for x in np.flatnonzero(block[code])]
            for x in range(a):  # pad with the smallest unused colors
                if len(chosen) >= s:
                    break
                if x not in chosen:
                    chosen.append(x)
            table[code, :len(chosen)] = sorted(chosen)
        rules.append(TableRule(spec.graph.adj[v], spec.radices(v), table))
    return Strategy(rules)


def _run(inst: _Instance, init, forbids, node_limit, time_limit):
    sets = np.zeros(inst.C * inst.P, dtype=np.uint8)
    ic = np.array([c for c, _ in init], dtype=np.int64)
    ix = np.array([x for _, x in init], dtype=np.int64)
    fc = np.array([c for c, _ in forbids], dtype=np.int64)
    fx = np.array([x for _, x in forbids], dtype=np.int64)
    status, nodes = _kernels.solve_search(
        inst.spec.n, len(inst.colorings), inst.spec.guesses, inst.P, inst.cell_pal,
        inst.cell_of, inst.col_of, inst.mem_ptr, inst.mem_idx, ic, ix, fc, fx,
        node_limit, time_limit, sets)
    return int(status), int(nodes), sets


def _root_branches(inst: _Instance, init):
    """The first coloring the search would branch on, and its branch cells."""
    spec, n = inst.spec, inst.spec.n
    covered = set()
    for cell, x in init:
        lo, hi = inst.mem_ptr[cell * inst.P + x], inst.mem_ptr[cell * inst.P + x + 1]
        covered.update(int(j) for j in inst.mem_idx[lo:hi])
    assigned = {c for c, _ in init}
    best = None
    for j in range(len(inst.colorings)):
        if j in covered:
            continue
        opts = [v for v in range(n)
                if spec.guesses > 1 or int(inst.cell_of[j * n + v]) not in assigned]
        if best is None or len(opts) < len(best[1]):
            best = (j, opts)
    if best is None:
        return []
    j, opts = best
    return [(int(inst.cell_of[j * n + v]), int(inst.col_of[j * n + v])) for v in opts]


def _worker(args):
    spec, init, forbids, node_limit, time_limit = args
    return _run(_instance(spec), init, forbids, node_limit, time_limit)


def decide_winnable(spec: GameSpec, budget: SearchBudget | None = None,
                    symmetry: bool = False) -> SolveResult:
    """Decide whether some strategy wins every admissible coloring.

    ``symmetry`` fixes vertex 0's guess on the all-zero view to color 0.
    That is sound only on the full coloring space (renaming vertex 0's
    colors maps winning strategies to winning strategies), so it is ignored
    when an admissible set is given.
    """
    budget = budget or SearchBudget()
    t0 = time.monotonic()
    if spec.admissible is None:
        parts = _components(spec.graph)
        if len(parts) > 1:
            return _decide_components(spec, parts, budget, symmetry, t0)
    inst = _instance(spec)
    notes = []
    init = []
    if symmetry and spec.admissible is None and spec.n:
        init.append((0, 0))
        notes.append("symmetry: vertex 0 guesses 0 on the all-zero view")
    elif symmetry:
        notes.append("symmetry ignored: admissible set given")

    if budget.threads > 1:
        status, nodes, sets = _parallel(inst, init, budget)
    else:
        status, nodes, sets = _run(inst, init, [], budget.node_limit, budget.time_limit)
    verdict = _STATUS[status]
    strat = None
    if verdict == WINNABLE:
        strat = _certificate(inst, sets)
        check = verify_winning(spec, strat)
        if not check:
            raise AssertionError(f"solver certificate loses on {check.coloring}")
    return SolveResult(verdict, strat, nodes, time.monotonic() - t0, notes)


def _components(g: Graph) -> list[list[int]]:
    seen, parts = set(), []
    for r in range(g.n):
        if r in seen:
            continue
        seen.add(r)
        part, stack = [], [r]
        while stack:
            v = stack.pop()
            part.append(v)
            for u in g.adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        parts.append(sorted(part))
    return parts


def _decide_components(spec: GameSpec, parts, budget: SearchBudget, symmetry: bool,
                       t0: float) -> SolveResult:
    """Winnable iff some component is: demonic colorings of components combine."""
    g, s = spec.graph, spec.guesses
    parts = sorted(parts, key=lambda p: (len(p), p))
    notes = [f"split into {len(parts)} components"]
    nodes, unknown = 0, False
    for part in parts:
        left = budget.time_limit - (time.monotonic() - t0)
        if left <= 0:
            unknown = True
            break
        sub, keep = g.induced_subgraph(part)
        sub_spec = GameSpec(sub, tuple(spec.palette[v] for v in keep), s)
        res = decide_winnable(sub_spec, SearchBudget(budget.node_limit, left, budget.threads),
                              symmetry)
        nodes += res.nodes
        if res.verdict == WINNABLE:
            rules = list(constant_strategy(spec, range(s)).rules)
            for i, rule in enumerate(res.strategy.rules):
                rules[keep[i]] = TableRule(tuple(keep[u] for u in rule.neighbors),
                                           rule.radices, rule.table)
            strat = Strategy(rules)
            if not verify_winning(spec, strat):
                raise AssertionError("lifted component certificate loses")
            notes.append(f"component {part} is winnable")
            return SolveResult(WINNABLE, strat, nodes, time.monotonic() - t0, notes)
        unknown |= res.verdict == UNKNOWN
    verdict = UNKNOWN if unknown else NOT_WINNABLE
    return SolveResult(verdict, None, nodes, time.monotonic() - t0, notes)


def _parallel(inst: _Instance, init, budget: SearchBudget):
    branches = _root_branches(inst, init)
    if not branches:
        return _run(inst, init, [], budget.node_limit, budget.time_limit)
    jobs = []
    for b, (cell, x) in enumerate(branches):
        jobs.append((inst.spec, init + [(cell, x)], branches[:b],
                     budget.node_limit, budget.time_limit))
    with ProcessPoolExecutor(max_workers=budget.threads) as pool:
        results = list(pool.map(_worker, jobs))
    nodes = sum(r[1] for r in results) + 1
    for status, _, sets in results:  # lowest winning branch, for determinism
        if status == 1:
            return 1, nodes, sets
    if any(r[0] == 2 for r in results):
        return 2, nodes, results[0][2]
    return 0, nodes, results[0][2]


def decide_winnable_admissible(spec: GameSpec, budget: SearchBudget | None = None) -> SolveResult:
    if spec.admissible is None:
        raise SpecError("spec has no admissible set")
    return decide_winnable(spec, budget)


@dataclass
class HatNumber:
    """Result of scanning palette sizes ``s+1 .. k_max``.

    ``lower`` is the largest palette proven winnable (``s`` is always
    winnable: guess every color).  ``upper`` is one below the smallest
    refuted palette, capped at ``n*s``: with more colors the expected number
    of correct guesses ``n*s/k`` drops below one.  Using the smallest
    refuted palette relies on monotonicity (a strategy for ``k`` colors,
    with guesses of color ``k-1`` sent anywhere, wins with ``k-1``); the
    scan still decides larger palettes and flags any winnable one above a
    refutation as an anomaly.
    """

    lower: int
    upper: int
    verdicts: dict[int, str]
    anomaly: bool = False
    nodes: int = 0

    @property
    def value(self) -> int | None:
        return self.lower if self.upper == self.lower else None

    def to_json(self) -> dict:
        return {"mu": self.value, "lower": self.lower, "upper": self.upper,
                "anomaly": self.anomaly, "nodes": self.nodes,
                "verdicts": {str(k): v for k, v in self.verdicts.items()}}


def hat_number(g: Graph, s: int = 1, k_max: int | None = None,
               budget: SearchBudget | None = None, symmetry: bool = False) -> HatNumber:
    """``mu_s(g)`` by deciding every ``k = s+1 .. k_max`` (default ``n*s + 1``).

    With one guess, palettes up to the clique number are settled by a
    verified clique witness instead of the search.
    """
    budget = budget or SearchBudget()
    k_max = k_max if k_max is not None else g.n * s + 1
    verdicts: dict[int, str] = {}
    nodes = 0
    for k in range(s + 1, k_max + 1):
        spec = GameSpec.uniform(g, k, s)
        if s == 1:  # a k-clique playing the sum strategy settles k at once
            witness = clique_witness(g, k)
            if witness is not None and verify_winning(spec, witness):
                verdicts[k] = WINNABLE
                continue
        res = decide_winnable(spec, budget, symmetry=symmetry)
        verdicts[k] = res.verdict
        nodes += res.nodes
    winnable = [k for k, v in verdicts.items() if v == WINNABLE]
    refuted = [k for k, v in verdicts.items() if v == NOT_WINNABLE]
    anomaly = bool(refuted) and any(k > min(refuted) for k in winnable)
    lower = max(winnable, default=s)
    upper = max(g.n * s, s)
    if refuted:
        upper = min(upper, min(refuted) - 1)
    return HatNumber(lower, max(upper, lower), verdicts, anomaly, nodes)


# -- naive oracle ----------------------------------------------------------------
#
# Deliberately shares nothing with the search above: no counting bound, no
# dynamic branching, no forbidding.  Cells are taken in a fixed order (first
# appearance along the lexicographic list of colorings), each tries its guess
# sets in order, and the only pruning is "a coloring whose cells are all
# filled is missed by everyone".


def _oracle_layout(spec: GameSpec):
    n = spec.n
    cols = list(spec.colorings())
    base, C = [], 0
    for v in range(n):
        base.append(C)
        C += spec.view_count(v)
    cells_of = []
    for c in cols:
        row = []
        for v in range(n):
            w = weights(spec.radices(v))
            row.append(base[v] + sum(c[u] * wu for u, wu in zip(spec.graph.adj[v], w)))
        cells_of.append(row)
    owner = [v for v in range(n) for _ in range(spec.view_count(v))]
    order, pos = [], {}
    for row in cells_of:
        for cell in row:
            if cell not in pos:
                pos[cell] = len(order)
                order.append(cell)
    # colorings become checkable once their last cell (in order) is filled
    due: list[list[int]] = [[] for _ in order]
    for j, row in enumerate(cells_of):
        due[max(pos[cell] for cell in row)].append(j)
    return cols, cells_of, owner, order, due


def naive_winnable(spec: GameSpec, node_limit: int = 5 * 10**7) -> bool | None:
    """Independent oracle for winnability; ``None`` when ``node_limit`` runs out.

    Before enumerating, vertex-deleted subgraphs are tried on the full
    coloring space: a winning strategy there extends to the whole graph
    (the extra vertices guess anything), so it settles ``True`` cheaply.
    """
    n, s = spec.n, spec.guesses
    if n == 0:
        return True
    if spec.admissible is None and n > 1:
        for drop in range(n):
            keep = [v for v in range(n) if v != drop]
            sub, _ = spec.graph.induced_subgraph(keep)
            sub_spec = GameSpec(sub, tuple(spec.palette[v] for v in keep), s)
            if naive_winnable(sub_spec, node_limit) is True:
                return True
    cols, cells_of, owner, order, due = _oracle_layout(spec)
    options = {cell: list(itertools.combinations(range(spec.palette[owner[cell]]), s))
               for cell in order}
    pos = {cell: p for p, cell in enumerate(order)}
    value: dict[int, tuple[int, ...]] = {}
    nodes = 0

    def failing(i):
        """Positions blamed for the first coloring due at ``i`` that everyone misses."""
        for j in due[i]:
            c = cols[j]
            if not any(c[v] in value[cells_of[j][v]] for v in range(n)):
                return {pos[cell] for cell in cells_of[j]} - {i}
        return None

    # conflict-directed backjumping over positions in `order`
    L = len(order)
    choice = [-1] * L
    conflict: list[set[int]] = [set() for _ in range(L)]
    i = 0
    while i < L:
        choice[i] += 1
        if choice[i] < len(options[order[i]]):
            nodes += 1
            if nodes > node_limit:
                return None
            value[order[i]] = options[order[i]][choice[i]]
            blame = failing(i)
            if blame is None:
                i += 1
            else:
                conflict[i] |= blame
            continue
        # every option of position i failed: jump to the latest culprit
        blame = conflict[i]
        if not blame:
            return False
        h = max(blame)
        conflict[h] |= blame - {h}
        for p in range(h + 1, i + 1):
            choice[p] = -1
            conflict[p] = set()
            value.pop(order[p], None)
        i = h
    return True

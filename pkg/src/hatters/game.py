"""Game specifications, strategies and exhaustive evaluation.

A coloring is a plain tuple of ints, one color per vertex.  A strategy is a
profile of per-vertex rules; each rule maps the *view* of its vertex (the
colors of its neighbors in ascending vertex order) to a guess set.

Views are encoded as mixed-radix integers whose least significant digit is
the smallest neighbor: ``code = sum(view[i] * prod(radices[:i]))``.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from . import _kernels
from .graphcore import Graph

Coloring = tuple[int, ...]

MAX_TABLE_CELLS = 10**7
MAX_SCAN_COLORINGS = 10**9


class SpecError(ValueError):
    pass


class SpaceTooLarge(RuntimeError):
    """Raised instead of starting an enumeration that cannot finish."""

    def __init__(self, what: str, required: int, limit: int):
        super().__init__(f"{what}: {required} exceeds the limit {limit}")
        self.required = required
        self.limit = limit


def _default_secs() -> float:
    try:
        return float(os.environ.get("HATTERS_BUDGET_SECS", "60"))
    except ValueError:
        return 60.0


@dataclass(frozen=True)
class SearchBudget:
    node_limit: int = 10**8
    time_limit: float = field(default_factory=_default_secs)
    threads: int = 1

    def __post_init__(self):
        if self.node_limit <= 0 or self.time_limit <= 0 or self.threads <= 0:
            raise ValueError("budget fields must be positive")


@dataclass(frozen=True)
class GameSpec:
    """Graph, per-vertex palette sizes, guess count, optional admissible set."""

    graph: Graph
    palette: tuple[int, ...]
    guesses: int = 1
    admissible: tuple[Coloring, ...] | None = None

    def __post_init__(self):
        palette = tuple(int(a) for a in self.palette)
        object.__setattr__(self, "palette", palette)
        if len(palette) != self.graph.n:
            raise SpecError("one palette size per vertex required")
        if any(a < 1 for a in palette):
            raise SpecError("palette sizes must be positive")
        if self.guesses < 1:
            raise SpecError("at least one guess required")
        if palette and self.guesses >= min(palette):
            raise SpecError(
                f"s={self.guesses} guesses against a palette of {min(palette)} wins trivially")
        if self.admissible is not None:
            adm = tuple(tuple(int(x) for x in c) for c in self.admissible)
            for c in adm:
                if not respects(palette, c):
                    raise SpecError(f"admissible coloring {c} violates the palettes")
            if len(set(adm)) != len(adm):
                raise SpecError("admissible colorings must be distinct")
            object.__setattr__(self, "admissible", adm)

    @classmethod
    def uniform(cls, graph: Graph, k: int, s: int = 1, admissible=None) -> "GameSpec":
        return cls(graph, (k,) * graph.n, s, admissible)

    @property
    def n(self) -> int:
        return self.graph.n

    def radices(self, v: int) -> tuple[int, ...]:
        return tuple(self.palette[u] for u in self.graph.adj[v])

    def view_count(self, v: int) -> int:
        return math.prod(self.radices(v))

    def coloring_count(self) -> int:
        if self.admissible is not None:
            return len(self.admissible)
        return math.prod(self.palette)

    def colorings(self) -> Iterable[Coloring]:
        """Admissible colorings in lexicographic order."""
        if self.admissible is not None:
            return iter(sorted(self.admissible))
        return itertools.product(*(range(a) for a in self.palette))


def respects(palette: Sequence[int], c: Sequence[int]) -> bool:
    return len(c) == len(palette) and all(0 <= x < a for x, a in zip(c, palette))


# -- view encoding -----------------------------------------------------------

def weights(radices: Sequence[int]) -> tuple[int, ...]:
    w, acc = [], 1
    for r in radices:
        w.append(acc)
        acc *= r
    return tuple(w)


def encode_view(view: Sequence[int], radices: Sequence[int]) -> int:
    code, acc = 0, 1
    for x, r in zip(view, radices):
        code += x * acc
        acc *= r
    return code


def decode_view(code: int, radices: Sequence[int]) -> tuple[int, ...]:
    out = []
    for r in radices:
        code, x = divmod(code, r)
        out.append(x)
    return tuple(out)


# -- rules and strategies ----------------------------------------------------

def _normalize(guess: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(set(int(x) for x in guess)))


class TableRule:
    """Dense guess table for one vertex.

    ``table`` has shape ``(n_views, width)``; row ``code`` lists the guessed
    colors in ascending order, padded with ``-1``.
    """

    __slots__ = ("neighbors", "radices", "table")

    def __init__(self, neighbors: Sequence[int], radices: Sequence[int], table):
        self.neighbors = tuple(neighbors)
        self.radices = tuple(radices)
        arr = np.asarray(table, dtype=np.int32)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.shape[0] != math.prod(self.radices):
            raise SpecError(f"table has {arr.shape[0]} rows, expected {math.prod(self.radices)}")
        if arr.shape[1] < 1 or (arr[:, 0] < 0).any():
            raise SpecError("every guess set must be non-empty")
        arr = np.sort(np.where(arr < 0, np.iinfo(np.int32).max, arr), axis=1)
        arr[arr == np.iinfo(np.int32).max] = -1
        if arr.shape[1] > 1:
            a, b = arr[:, :-1], arr[:, 1:]
            if ((a == b) & (a >= 0)).any():
                raise SpecError("duplicate colors in a guess set")
        arr.setflags(write=False)
        self.table = arr

    @property
    def width(self) -> int:
        return self.table.shape[1]

    def guess_code(self, code: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.table[code] if x >= 0)

    def guess(self, view: Sequence[int]) -> tuple[int, ...]:
        return self.guess_code(encode_view(view, self.radices))

    def __eq__(self, other):
        return (isinstance(other, TableRule) and self.neighbors == other.neighbors
                and self.radices == other.radices and np.array_equal(self.table, other.table))

    def __repr__(self):
        return f"TableRule(neighbors={self.neighbors}, views={self.table.shape[0]}, width={self.width})"


class FuncRule:
    """Procedural rule: ``fn(view) -> iterable of colors``.

    ``descriptor`` is the JSON-able name of the rule (used by the CLI when
    the view space is too large to tabulate).
    """

    __slots__ = ("neighbors", "radices", "fn", "descriptor")

    def __init__(self, neighbors: Sequence[int], radices: Sequence[int],
                 fn: Callable[[tuple[int, ...]], Iterable[int]], descriptor: dict | None = None):
        self.neighbors = tuple(neighbors)
        self.radices = tuple(radices)
        self.fn = fn
        self.descriptor = descriptor

    def guess(self, view: Sequence[int]) -> tuple[int, ...]:
        return _normalize(self.fn(tuple(view)))

    def guess_code(self, code: int) -> tuple[int, ...]:
        return self.guess(decode_view(code, self.radices))

    def __repr__(self):
        return f"FuncRule(neighbors={self.neighbors}, descriptor={self.descriptor})"


Rule = Union[TableRule, FuncRule]


def tabulate_rule(rule: Rule, width: int | None = None) -> TableRule:
    if isinstance(rule, TableRule) and (width is None or width == rule.width):
        return rule
    views = math.prod(rule.radices)
    if views > MAX_TABLE_CELLS:
        raise SpaceTooLarge("view space", views, MAX_TABLE_CELLS)
    rows = [rule.guess_code(code) for code in range(views)]
    w = width or max((len(r) for r in rows), default=1)
    table = np.full((views, w), -1, dtype=np.int32)
    for i, r in enumerate(rows):
        if len(r) > w:
            raise SpecError(f"guess set {r} wider than {w}")
        table[i, :len(r)] = r
    return TableRule(rule.neighbors, rule.radices, table)


def rule_cube(rule: Rule, palette: int) -> np.ndarray:
    """Boolean guess indicator with one axis per neighbor plus a color axis.

    ``out[x_0, ..., x_{t-1}, c]`` is true when ``c`` is guessed on view ``x``.
    """
    tab = tabulate_rule(rule).table
    ind = np.zeros((tab.shape[0], palette + 1), dtype=bool)
    rows = np.repeat(np.arange(tab.shape[0]), tab.shape[1])
    ind[rows, tab.ravel()] = True  # -1 padding lands in the extra column
    ind = ind[:, :palette]
    t = len(rule.radices)
    cube = ind.reshape(tuple(reversed(rule.radices)) + (palette,))
    return cube.transpose(tuple(range(t - 1, -1, -1)) + (t,))


def rule_from_cube(neighbors: Sequence[int], cube: np.ndarray) -> TableRule:
    t = cube.ndim - 1
    radices = cube.shape[:t]
    flat = cube.transpose(tuple(range(t - 1, -1, -1)) + (t,)).reshape(-1, cube.shape[-1])
    width = max(int(flat.sum(axis=1).max(initial=1)), 1)
    table = np.full((flat.shape[0], width), -1, dtype=np.int32)
    for i, row in enumerate(flat):
        cols = np.flatnonzero(row)
        table[i, :len(cols)] = cols
    return TableRule(neighbors, radices, table)


class Strategy:
    """A profile of per-vertex rules."""

    __slots__ = ("rules",)

    def __init__(self, rules: Sequence[Rule]):
        self.rules = tuple(rules)

    def __len__(self):
        return len(self.rules)

    def __getitem__(self, v: int) -> Rule:
        return self.rules[v]

    @property
    def is_table(self) -> bool:
        return all(isinstance(r, TableRule) for r in self.rules)

    def guess(self, v: int, c: Sequence[int]) -> tuple[int, ...]:
        rule = self.rules[v]
        return rule.guess(tuple(c[u] for u in rule.neighbors))

    def tabulate(self, width: int | None = None) -> "Strategy":
        return Strategy([tabulate_rule(r, width) for r in self.rules])

    def check(self, spec: GameSpec) -> None:
        """Raise :class:`SpecError` unless the rules fit ``spec``."""
        if len(self.rules) != spec.n:
            raise SpecError("strategy has the wrong number of rules")
        for v, rule in enumerate(self.rules):
            if rule.neighbors != spec.graph.adj[v]:
                raise SpecError(f"rule {v} does not read exactly N({v})")
            if rule.radices != spec.radices(v):
                raise SpecError(f"rule {v} has radices {rule.radices}, expected {spec.radices(v)}")
            if isinstance(rule, TableRule):
                if rule.width > spec.guesses:
                    raise SpecError(f"rule {v} guesses more than s={spec.guesses} colors")
                if (rule.table >= spec.palette[v]).any():
                    raise SpecError(f"rule {v} guesses outside its palette")


def constant_strategy(spec: GameSpec, guess: Iterable[int] = (0,)) -> Strategy:
    g = _normalize(guess)
    rules = []
    for v in range(spec.n):
        views = spec.view_count(v)
        table = np.tile(np.array(g, dtype=np.int32), (views, 1))
        rules.append(TableRule(spec.graph.adj[v], spec.radices(v), table))
    return Strategy(rules)


def random_table_strategy(spec: GameSpec, seed=0) -> Strategy:
    """Independent uniform ``s``-subsets for every (vertex, view) cell."""
    rng = np.random.default_rng(seed)
    total = sum(spec.view_count(v) for v in range(spec.n))
    if total > MAX_TABLE_CELLS:
        raise SpaceTooLarge("table cells", total, MAX_TABLE_CELLS)
    s = spec.guesses
    rules = []
    for v in range(spec.n):
        views, a = spec.view_count(v), spec.palette[v]
        if s == 1:
            table = rng.integers(0, a, size=(views, 1))
        else:
            table = np.sort(np.argsort(rng.random((views, a)), axis=1)[:, :s], axis=1)
        rules.append(TableRule(spec.graph.adj[v], spec.radices(v), table))
    return Strategy(rules)


def restrict(rule: Rule, fixed: Mapping[int, int]) -> Rule:
    """Pin some neighbor colors; the result reads only the remaining neighbors.

    ``fixed`` maps neighbor vertex -> color.  Table rules stay tables.
    """
    pos = {u: i for i, u in enumerate(rule.neighbors)}
    for u, x in fixed.items():
        if u not in pos:
            raise SpecError(f"{u} is not a neighbor")
        if not 0 <= x < rule.radices[pos[u]]:
            raise SpecError(f"color {x} outside the palette of {u}")
    keep = [i for i, u in enumerate(rule.neighbors) if u not in fixed]
    neighbors = tuple(rule.neighbors[i] for i in keep)
    radices = tuple(rule.radices[i] for i in keep)
    if isinstance(rule, TableRule):
        w_old = weights(rule.radices)
        base = sum(fixed[u] * w_old[pos[u]] for u in fixed)
        # old code of every new view, first kept neighbor least significant
        sub = np.zeros(math.prod(radices), dtype=np.int64)
        acc = 1
        for i in keep:
            r = rule.radices[i]
            sub += ((np.arange(sub.size) // acc) % r) * w_old[i]
            acc *= r
        return TableRule(neighbors, radices, rule.table[sub + base])

    inner = rule

    def fn(view, inner=inner, fixed=dict(fixed), keep=keep):
        full = [0] * len(inner.neighbors)
        for u, x in fixed.items():
            full[pos[u]] = x
        for i, x in zip(keep, view):
            full[i] = x
        return inner.guess(full)

    return FuncRule(neighbors, radices, fn)


# -- evaluation --------------------------------------------------------------

def evaluate(spec: GameSpec, strat: Strategy, c: Sequence[int]) -> frozenset[int]:
    """Vertices whose guess set contains their own color."""
    return frozenset(v for v in range(spec.n) if c[v] in strat.guess(v, c))


def is_demonic(spec: GameSpec, strat: Strategy, c: Sequence[int]) -> bool:
    return all(c[v] not in strat.guess(v, c) for v in range(spec.n))


@dataclass(frozen=True)
class Win:
    checked: int

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Counterexample:
    coloring: Coloring

    def __bool__(self):
        return False


def _flatten(spec: GameSpec, strat: Strategy):
    """Pack a table strategy into the flat arrays the scan kernels read."""
    tabs = strat.tabulate(spec.guesses)
    s = spec.guesses
    nb_ptr = [0]
    nb_idx, nb_w, tab_ptr = [], [], [0]
    blocks = []
    for v in range(spec.n):
        rule = tabs[v]
        nb_idx.extend(rule.neighbors)
        nb_w.extend(weights(rule.radices))
        nb_ptr.append(len(nb_idx))
        blocks.append(rule.table.ravel())
        tab_ptr.append(tab_ptr[-1] + rule.table.shape[0] * s)
    i64 = lambda xs: np.asarray(xs, dtype=np.int64)
    guesses = np.concatenate(blocks).astype(np.int32) if blocks else np.zeros(0, np.int32)
    return (i64(spec.palette), i64(nb_ptr), i64(nb_idx), i64(nb_w), i64(tab_ptr), s,
            np.ascontiguousarray(guesses))


def rank_to_coloring(rank: int, palette: Sequence[int]) -> Coloring:
    out = [0] * len(palette)
    for v in range(len(palette) - 1, -1, -1):
        rank, out[v] = divmod(rank, palette[v])
    return tuple(out)


def first_demonic(spec: GameSpec, strat: Strategy, threads: int = 1,
                  limit: int = MAX_SCAN_COLORINGS) -> Coloring | None:
    """Lexicographically first demonic coloring, via the scan kernel."""
    strat.check(spec)
    total = spec.coloring_count()
    if total > limit:
        raise SpaceTooLarge("colorings", total, limit)
    packed = _flatten(spec, strat)
    if spec.admissible is not None:
        cols = np.array(sorted(spec.admissible), dtype=np.int64).reshape(len(spec.admissible), spec.n)
        i = _kernels.first_demonic_list(*packed, cols)
        return None if i < 0 else tuple(int(x) for x in cols[i])
    if total == 0:
        return None
    chunks = max(1, min(threads * 4, total)) if threads > 1 else 1
    bounds = [total * i // chunks for i in range(chunks + 1)]
    if chunks == 1:
        hits = [_kernels.first_demonic_range(*packed, 0, total)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = list(pool.map(lambda ab: _kernels.first_demonic_range(*packed, *ab),
                                 zip(bounds[:-1], bounds[1:])))
    hits = [h for h in hits if h >= 0]
    return rank_to_coloring(min(hits), spec.palette) if hits else None


def verify_winning(spec: GameSpec, strat: Strategy, threads: int = 1,
                   limit: int = MAX_SCAN_COLORINGS) -> Win | Counterexample:
    """Win, or the lexicographically first demonic coloring."""
    c = first_demonic(spec, strat, threads, limit)
    return Win(spec.coloring_count()) if c is None else Counterexample(c)


# -- JSON --------------------------------------------------------------------

def rule_to_json(v: int, rule: Rule, s: int) -> dict:
    if isinstance(rule, FuncRule) and rule.descriptor is not None:
        return {"vertex": v, **rule.descriptor}
    tab = tabulate_rule(rule)
    return {"vertex": v, "s": s, "neighbors": list(tab.neighbors),
            "table": [[int(x) for x in row if x >= 0] for row in tab.table]}


def strategy_to_json(strat: Strategy, s: int) -> list[dict]:
    return [rule_to_json(v, r, s) for v, r in enumerate(strat.rules)]


def strategy_from_json(data: Sequence[dict], spec: GameSpec,
                       rule_factory: Callable[[GameSpec, int, dict], Rule] | None = None) -> Strategy:
    """Inverse of :func:`strategy_to_json`; rule descriptors go to ``rule_factory``."""
    rules: list[Rule | None] = [None] * spec.n
    for item in data:
        v = int(item["vertex"])
        if not 0 <= v < spec.n or rules[v] is not None:
            raise SpecError(f"bad or repeated vertex {v} in strategy JSON")
        if "rule" in item:
            if rule_factory is None:
                raise SpecError(f"no factory for rule {item['rule']!r}")
            rules[v] = rule_factory(spec, v, item)
            continue
        if list(item["neighbors"]) != list(spec.graph.adj[v]):
            raise SpecError(f"neighbors of {v} do not match the graph")
        rows = item["table"]
        width = max((len(r) for r in rows), default=1)
        table = np.full((len(rows), width), -1, dtype=np.int32)
        for i, r in enumerate(rows):
            table[i, :len(r)] = r
        rules[v] = TableRule(spec.graph.adj[v], spec.radices(v), table)
    missing = [v for v, r in enumerate(rules) if r is None]
    if missing:
        raise SpecError(f"strategy JSON lacks vertices {missing}")
    strat = Strategy(rules)
    strat.check(spec)
    return strat


def coloring_to_json(c: Sequence[int]) -> dict:
    return {"colors": [int(x) for x in c]}


def coloring_from_json(data: dict) -> Coloring:
    return tuple(int(x) for x in data["colors"])

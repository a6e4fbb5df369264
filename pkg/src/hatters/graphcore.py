"""Graphs, the families used by the hat game, and ordering/coloring helpers.

Vertices are always ``0..n-1``.  A :class:`Graph` is immutable and keeps its
neighbor lists sorted, so two graphs with the same edge set compare equal.
"""

from __future__ import annotations

import heapq
import json
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0 or len(self.adj) != self.n:
            raise GraphError("adjacency must have one entry per vertex")
        for v, nbrs in enumerate(self.adj):
            if list(nbrs) != sorted(set(nbrs)):
                raise GraphError(f"neighbors of {v} not sorted/unique")
            for u in nbrs:
                if u == v:
                    raise GraphError(f"self-loop at {v}")
                if not 0 <= u < self.n or v not in self.adj[u]:
                    raise GraphError(f"asymmetric adjacency {v}-{u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for n={n}")
            if v in nbrs[u]:
                raise GraphError(f"duplicate edge ({u},{v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adj)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    @property
    def num_edges(self) -> int:
        return sum(self.degrees) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for u in self.adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == self.n

    def is_tree(self) -> bool:
        return self.n >= 1 and self.num_edges == self.n - 1 and self.is_connected()

    def is_independent(self, vertices: Iterable[int]) -> bool:
        vs = set(vertices)
        return all(u not in vs for v in vs for u in self.adj[v])

    def induced_subgraph(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Return ``(H, keep)`` where vertex ``i`` of ``H`` is ``keep[i]`` here."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v]) for u, v in self.edges() if u in index and v in index]
        return Graph.from_edges(len(keep), edges), keep

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        try:
            n = int(data["n"])
            edges = data["edges"]
        except (KeyError, TypeError) as exc:
            raise GraphError(f"graph JSON needs 'n' and 'edges': {exc}") from None
        for e in edges:
            if len(e) != 2:
                raise GraphError(f"edge {e!r} is not a pair")
        return cls.from_edges(n, edges)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


# -- generators --------------------------------------------------------------

def make_empty(n: int) -> Graph:
    return Graph.from_edges(n, [])


def make_complete(n: int) -> Graph:
    if n < 1:
        raise GraphError("K_n needs n >= 1")
    return Graph.from_edges(n, combinations(range(n), 2))


def make_cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycles need n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def make_path(n: int) -> Graph:
    if n < 1:
        raise GraphError("paths need n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def make_complete_bipartite(a: int, b: int) -> Graph:
    """K_{a,b}; the ``a`` side gets indices ``0..a-1``."""
    if a < 1 or b < 1:
        raise GraphError("K_{a,b} needs a, b >= 1")
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def tree_from_prufer(seq: Sequence[int]) -> Graph:
    n = len(seq) + 2
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return Graph.from_edges(n, edges)


def make_tree_random(n: int, seed=0) -> Graph:
    """Uniform labeled tree on ``n`` vertices from a random Prüfer sequence."""
    if n < 1:
        raise GraphError("trees need n >= 1")
    if n == 1:
        return make_empty(1)
    if n == 2:
        return make_path(2)
    rng = np.random.default_rng(seed)
    return tree_from_prufer([int(x) for x in rng.integers(0, n, size=n - 2)])


def make_kstar(k: int, n: int) -> tuple[Graph, list[int], list[int]]:
    """S_{k,n}: a k-clique (vertices ``0..k-1``) plus n leaves seeing the whole clique."""
    if k < 1 or n < 1:
        raise GraphError("S_{k,n} needs k, n >= 1")
    edges = list(combinations(range(k), 2))
    edges += [(i, k + j) for j in range(n) for i in range(k)]
    return Graph.from_edges(k + n, edges), list(range(k)), list(range(k, k + n))


def subdivide(g: Graph) -> tuple[Graph, list[int], list[int]]:
    """Replace every edge by a path of length two.

    Original vertices keep their indices; the vertex subdividing the ``i``-th
    edge of ``g.edges()`` is ``g.n + i``.
    """
    edges = []
    for i, (u, v) in enumerate(g.edges()):
        w = g.n + i
        edges += [(u, w), (v, w)]
    m = g.num_edges
    return Graph.from_edges(g.n + m, edges), list(range(g.n)), list(range(g.n, g.n + m))


def _ahu(adj: Sequence[Sequence[int]], root: int, parent: int = -1) -> str:
    return "(" + "".join(sorted(_ahu(adj, u, root) for u in adj[root] if u != parent)) + ")"


def _tree_code(t: Graph) -> str:
    """Isomorphism invariant of a tree: AHU string rooted at its center(s)."""
    if t.n <= 2:
        return str(t.n)
    deg, layer, left = list(t.degrees), [v for v in range(t.n) if t.degree(v) == 1], t.n
    while left > 2:
        left -= len(layer)
        nxt = []
        for v in layer:
            for u in t.adj[v]:
                deg[u] -= 1
                if deg[u] == 1:
                    nxt.append(u)
        layer = nxt
    return min(_ahu(t.adj, c) for c in layer)


def nonisomorphic_trees(n: int) -> list[Graph]:
    """One tree per isomorphism class on ``n`` vertices, grown leaf by leaf."""
    if n < 1:
        raise GraphError("trees need n >= 1")
    level = {"1": make_empty(1)}
    for m in range(2, n + 1):
        grown: dict[str, Graph] = {}
        for t in level.values():
            for v in range(t.n):
                g = Graph.from_edges(m, t.edges() + [(v, m - 1)])
                grown.setdefault(_tree_code(g), g)
        level = grown
    return [level[c] for c in sorted(level)]


def small_graphs(max_n: int) -> list[Graph]:
    """Every graph on ``1..max_n`` vertices up to isomorphism (``max_n <= 6``).

    Each class is represented by its edge set of least bitmask over all
    relabelings; the list is sorted by order, size, then that mask.
    """
    from itertools import permutations

    if max_n > 6:
        raise GraphError("brute-force canonical forms only up to 6 vertices")
    out = []
    for n in range(1, max_n + 1):
        pairs = list(combinations(range(n), 2))
        index = {p: i for i, p in enumerate(pairs)}
        masks = np.arange(1 << len(pairs), dtype=np.int64)
        canon = masks.copy()
        for perm in permutations(range(n)):
            image = np.zeros_like(masks)
            for i, (u, v) in enumerate(pairs):
                a, b = sorted((perm[u], perm[v]))
                image |= ((masks >> i) & 1) << index[(a, b)]
            np.minimum(canon, image, out=canon)
        reps = sorted(set(canon.tolist()), key=lambda m: (bin(m).count("1"), m))
        for m in reps:
            out.append(Graph.from_edges(n, [p for i, p in enumerate(pairs) if m >> i & 1]))
    return out


# -- orders and coloring -----------------------------------------------------

@dataclass(frozen=True)
class VertexOrder:
    order: tuple[int, ...]
    back_degree: tuple[int, ...]  # indexed by vertex
    position: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.position:
            pos = [0] * len(self.order)
            for i, v in enumerate(self.order):
                pos[v] = i
            object.__setattr__(self, "position", tuple(pos))

    @classmethod
    def of(cls, g: Graph, order: Sequence[int]) -> "VertexOrder":
        order = tuple(int(v) for v in order)
        if sorted(order) != list(range(g.n)):
            raise GraphError("order is not a permutation of the vertices")
        pos = [0] * g.n
        for i, v in enumerate(order):
            pos[v] = i
        back = tuple(sum(pos[u] < pos[v] for u in g.adj[v]) for v in range(g.n))
        return cls(order, back, tuple(pos))

    @property
    def max_back_degree(self) -> int:
        return max(self.back_degree, default=0)


def degeneracy_order(g: Graph) -> tuple[VertexOrder, int]:
    """Smallest-last order and the coloring number ``col(g)``.

    Repeatedly removes a minimum-degree vertex (smallest index on ties) and
    reverses the removal sequence.  The empty graph gets ``col = 1``.
    """
    deg = list(g.degrees)
    removed = [False] * g.n
    heap = [(deg[v], v) for v in range(g.n)]
    heapq.heapify(heap)
    removal = []
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        removal.append(v)
        for u in g.adj[v]:
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    vo = VertexOrder.of(g, removal[::-1])
    return vo, 1 + vo.max_back_degree


@dataclass(frozen=True)
class ChromaticResult:
    value: int | None          # None when the budget ran out
    lower: int
    upper: int
    partition: tuple[tuple[int, ...], ...]  # best proper coloring found
    nodes: int

    @property
    def exact(self) -> bool:
        return self.value is not None


def find_clique(g: Graph, size: int) -> list[int] | None:
    """Some clique on ``size`` vertices (lexicographically first), or ``None``."""
    if size <= 0:
        return []

    def grow(clique: list[int], cand: list[int]) -> list[int] | None:
        if len(clique) == size:
            return clique
        for i, v in enumerate(cand):
            if len(clique) + len(cand) - i < size:
                return None
            found = grow(clique + [v], [u for u in cand[i + 1:] if u in g.adj[v]])
            if found:
                return found
        return None

    return grow([], list(range(g.n)))


class _Exhausted(Exception):
    pass


def _greedy_clique(g: Graph) -> list[int]:
    best: list[int] = []
    for start in range(g.n):
        clique = [start]
        cand = set(g.adj[start])
        while cand:
            v = max(cand, key=lambda u: (len(cand.intersection(g.adj[u])), -u))
            clique.append(v)
            cand &= set(g.adj[v])
        if len(clique) > len(best):
            best = clique
    return best


def _dsatur_try(g: Graph, k: int, colors: list[int], counter: list[int], limit: int, deadline: float) -> bool:
    """Backtracking DSATUR search for a proper ``k``-coloring, in place."""
    n = g.n
    uncolored = [v for v in range(n) if colors[v] < 0]
    if not uncolored:
        return True
    counter[0] += 1
    if counter[0] > limit or (counter[0] & 1023 == 0 and time.monotonic() > deadline):
        raise _Exhausted

    def saturation(v):
        return len({colors[u] for u in g.adj[v] if colors[u] >= 0})

    v = max(uncolored, key=lambda u: (saturation(u), len(g.adj[u]), -u))
    used = {colors[u] for u in g.adj[v] if colors[u] >= 0}
    ceiling = min(k, max(colors, default=-1) + 2)  # new colors only in order
    for c in range(ceiling):
        if c in used:
            continue
        colors[v] = c
        if _dsatur_try(g, k, colors, counter, limit, deadline):
            return True
    colors[v] = -1
    return False


def _classes(colors: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    k = max(colors, default=-1) + 1
    return tuple(tuple(v for v, c in enumerate(colors) if c == i) for i in range(k))


def chromatic_number(g: Graph, budget=None) -> ChromaticResult:
    """Exact chromatic number by branch and bound, with a witness partition.

    ``budget`` is a :class:`hatters.game.SearchBudget` (or ``None`` for the
    defaults).  When the budget is exhausted the result has ``value=None``
    and the best interval found.
    """
    from .game import SearchBudget

    budget = budget or SearchBudget()
    if g.n == 0:
        return ChromaticResult(0, 0, 0, (), 0)
    clique = _greedy_clique(g)
    lower = len(clique)
    counter = [0]
    deadline = time.monotonic() + budget.time_limit

    # seeding the clique with distinct colors is sound: they must differ anyway
    def attempt(k):
        colors = [-1] * g.n
        for i, v in enumerate(clique):
            colors[v] = i
        return colors if _dsatur_try(g, k, colors, counter, budget.node_limit, deadline) else None

    try:
        best = attempt(g.n)
    except _Exhausted:
        return ChromaticResult(None, lower, g.n, tuple((v,) for v in range(g.n)), counter[0])
    upper = max(best) + 1
    try:
        while upper > lower:
            found = attempt(upper - 1)
            if found is None:
                break
            best, upper = found, max(found) + 1
    except _Exhausted:
        return ChromaticResult(None, lower, upper, _classes(best), counter[0])
    return ChromaticResult(upper, upper, upper, _classes(best), counter[0])


def is_proper_partition(g: Graph, parts: Iterable[Iterable[int]]) -> bool:
    parts = [list(p) for p in parts]
    flat = sorted(v for p in parts for v in p)
    return flat == list(range(g.n)) and all(g.is_independent(p) for p in parts)

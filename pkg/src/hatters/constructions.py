"""Explicit winning strategies for the Bears."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, product
from typing import Sequence

import numpy as np

from .game import Coloring, FuncRule, GameSpec, SpecError, Strategy, tabulate_rule
from .graphcore import Graph, find_clique, make_complete, make_kstar


def clique_sum_strategy(n: int, modulus: int | None = None) -> Strategy:
    """Vertex ``i`` of K_n guesses ``(i - sum of the other colors) mod K``.

    ``K`` defaults to ``n``; with ``K = n`` every coloring is won by exactly
    the vertex whose index equals the total color sum mod ``n``.
    """
    if n < 1:
        raise SpecError("n >= 1 required")
    K = n if modulus is None else modulus
    rules = []
    for i in range(n):
        nbrs = tuple(j for j in range(n) if j != i)
        rules.append(FuncRule(nbrs, (K,) * (n - 1),
                              lambda view, i=i: ((i - sum(view)) % K,),
                              {"rule": "clique_sum", "n": n, "modulus": K}))
    return Strategy(rules)


def clique_witness(g: Graph, k: int) -> Strategy | None:
    """Winning strategy for ``g`` with ``k`` colors built on a ``k``-clique.

    The clique plays the sum strategy and ignores everyone else; the other
    vertices guess 0.  ``None`` when ``g`` has no clique on ``k`` vertices.
    """
    clique = find_clique(g, k)
    if clique is None:
        return None
    index = {v: i for i, v in enumerate(clique)}
    rules = []
    for v in range(g.n):
        nbrs = g.adj[v]
        if v in index:
            pos = [j for j, u in enumerate(nbrs) if u in index]
            fn = (lambda view, i=index[v], pos=pos: ((i - sum(view[j] for j in pos)) % k,))
        else:
            fn = (lambda view: (0,))
        rules.append(tabulate_rule(FuncRule(nbrs, (k,) * len(nbrs), fn)))
    return Strategy(rules)


def clique_sum_spec(n: int, modulus: int | None = None) -> GameSpec:
    return GameSpec.uniform(make_complete(n), n if modulus is None else modulus)


# -- trees with palettes 2^deg -------------------------------------------------

def _leaf_elimination(t: Graph) -> tuple[list[tuple[int, int]], int]:
    """Remove the largest-index leaf until one vertex is left.

    Returns the ``(leaf, neighbor)`` steps in removal order and the survivor.
    """
    deg = list(t.degrees)
    alive = [True] * t.n
    steps = []
    for _ in range(t.n - 1):
        v = max(u for u in range(t.n) if alive[u] and deg[u] == 1)
        (w,) = [u for u in t.adj[v] if alive[u]]
        steps.append((v, w))
        alive[v] = False
        deg[w] -= 1
    (root,) = [u for u in range(t.n) if alive[u]]
    return steps, root


def _tree_power_guesses(steps, root, n, c) -> list[int]:
    cur = list(c)
    seen_v, seen_w = [], []
    for v, w in steps:  # colors as seen in the smaller tree: w's color is halved
        seen_v.append(cur[v])
        seen_w.append(cur[w])
        cur[w] //= 2
    guess = [0] * n
    guess[root] = 0  # one-color palette on the last vertex
    for (v, w), cv, cw in zip(reversed(steps), reversed(seen_v), reversed(seen_w)):
        guess[v] = 1 - cw % 2
        guess[w] = 2 * guess[w] + cv
    return guess


def tree_power_strategy(t: Graph) -> tuple[tuple[int, ...], Strategy]:
    """Winning strategy on a tree when vertex ``v`` has ``2**deg(v)`` colors.

    Built by leaf elimination: the detached leaf bets on the parity of its
    neighbor ``w``; ``w`` doubles the guess of the smaller tree and adds the
    leaf's color; the other neighbors of ``w`` read ``c(w) // 2``.
    """
    if not t.is_tree():
        raise SpecError("input is not a tree")
    steps, root = _leaf_elimination(t)
    palette = tuple(2 ** d for d in t.degrees)

    def rule(v):
        nbrs = t.adj[v]

        def fn(view):
            c = [0] * t.n
            for u, x in zip(nbrs, view):
                c[u] = x
            return (_tree_power_guesses(steps, root, t.n, c)[v],)

        return FuncRule(nbrs, tuple(palette[u] for u in nbrs), fn, {"rule": "tree_power"})

    return palette, Strategy([rule(v) for v in range(t.n)])


# -- admissible colorings on cliques -----------------------------------------

def _admissible_maps(n: int, A: Sequence[Coloring]) -> list[dict[tuple[int, ...], int]]:
    """Per-bear lookup tables: bear ``i`` maps the colors of bears ``< i`` to a guess."""
    level = {tuple(a) for a in A}
    maps: list[dict] = [dict() for _ in range(n)]
    for m in range(n, 0, -1):
        groups: dict[tuple[int, ...], list[int]] = {}
        for a in level:
            groups.setdefault(a[:m - 1], []).append(a[m - 1])
        maps[m - 1] = {p: xs[0] for p, xs in groups.items() if len(xs) == 1}
        level = {p for p, xs in groups.items() if len(xs) > 1}
    return maps


def kn_admissible_strategy(n: int, K: int, A: Sequence[Sequence[int]]) -> Strategy:
    """Strategy on K_n winning every coloring in ``A`` when ``|A| <= 2**n - 1``.

    The last bear names the unique extension of the others' colors when it
    exists (else color 0); the remaining bears recurse on the prefixes that
    have two or more extensions.
    """
    A = [tuple(int(x) for x in a) for a in A]
    if len(set(A)) > 2 ** n - 1:
        raise SpecError(f"{len(set(A))} admissible colorings exceed 2^{n}-1")
    for a in A:
        if len(a) != n or not all(0 <= x < K for x in a):
            raise SpecError(f"coloring {a} does not fit K_{n} with {K} colors")
    maps = _admissible_maps(n, A)
    rules = []
    for i in range(n):
        nbrs = tuple(j for j in range(n) if j != i)
        rules.append(FuncRule(nbrs, (K,) * (n - 1),
                              lambda view, i=i: (maps[i].get(tuple(view[:i]), 0),)))
    return Strategy(rules)


# -- k-stars -------------------------------------------------------------------

class KStar:
    """The S_{k,n} construction with ``K = 2**k`` colors.

    Leaves are indexed by the ``(K-1)``-subsets of clique colorings in
    ``itertools.combinations`` order; clique colorings are ranked
    lexicographically (clique vertex 0 most significant).
    """

    def __init__(self, k: int):
        self.k = k
        self.K = 2 ** k
        self.clique_colorings = list(product(range(self.K), repeat=k))
        self.subsets = list(combinations(range(len(self.clique_colorings)), self.K - 1))
        self.n_leaves = len(self.subsets)
        self.graph, self.clique, self.leaves = make_kstar(k, self.n_leaves)
        # leaf_guess[x, j]: guess of leaf j when the clique shows coloring x
        lg = np.full((len(self.clique_colorings), self.n_leaves), self.K - 1, dtype=np.int64)
        for j, S in enumerate(self.subsets):
            for pos, x in enumerate(S):
                lg[x, j] = pos
        self.leaf_guess = lg
        self.spec = GameSpec.uniform(self.graph, self.K)

    def rank(self, clique_colors: Sequence[int]) -> int:
        r = 0
        for x in clique_colors:
            r = r * self.K + x
        return r

    def unguessed(self, leaf_colors: Sequence[int]) -> tuple[int, ...]:
        """Ranks of clique colorings on which no leaf is right."""
        L = np.asarray(leaf_colors, dtype=np.int64)
        return tuple(int(x) for x in np.flatnonzero(~(self.leaf_guess == L).any(axis=1)))

    @lru_cache(maxsize=None)
    def clique_maps(self, unguessed: tuple[int, ...]):
        A = [self.clique_colorings[r] for r in unguessed]
        return _admissible_maps(self.k, A)

    def leaf_rule(self, j: int) -> FuncRule:
        col = self.leaf_guess[:, j]
        return FuncRule(tuple(self.clique), (self.K,) * self.k,
                        lambda view: (int(col[self.rank(view)]),),
                        {"rule": "kstar_leaf", "k": self.k, "subset_rank": j})

    def clique_rule(self, i: int) -> FuncRule:
        k = self.k
        nbrs = tuple(v for v in range(k + self.n_leaves) if v != i)

        def fn(view):
            maps = self.clique_maps(self.unguessed(view[k - 1:]))
            return (maps[i].get(tuple(view[:i]), 0),)

        return FuncRule(nbrs, (self.K,) * len(nbrs), fn, {"rule": "kstar_clique", "k": k})

    def strategy(self) -> Strategy:
        return Strategy([self.clique_rule(i) for i in self.clique]
                        + [self.leaf_rule(j) for j in range(self.n_leaves)])

    def evaluate_batch(self, colorings: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized play on many colorings.

        Returns ``(correct, a_size)``: the number of correct bears and the size
        of the unguessed set the clique computes, per coloring.
        """
        colorings = np.asarray(colorings, dtype=np.int64)
        k = self.k
        clique, leaves = colorings[:, :k], colorings[:, k:]
        ranks = np.zeros(len(colorings), dtype=np.int64)
        for i in range(k):
            ranks = ranks * self.K + clique[:, i]
        leaf_right = (leaves == self.leaf_guess[ranks]).sum(axis=1)
        correct = leaf_right.copy()
        a_size = np.zeros(len(colorings), dtype=np.int64)
        for row in range(len(colorings)):
            A = self.unguessed(leaves[row])
            a_size[row] = len(A)
            maps = self.clique_maps(A)
            c = clique[row]
            for i in range(k):
                if maps[i].get(tuple(int(x) for x in c[:i]), 0) == c[i]:
                    correct[row] += 1
        return correct, a_size


def kstar_strategy(k: int, force: bool = False) -> tuple[GameSpec, Strategy]:
    """S_{k,n} with ``K = 2**k`` colors and ``n = C(K**k, K-1)`` leaves.

    Only ``k <= 2`` is accepted unless ``force`` is set (``k = 3`` already
    needs C(512, 7) leaves).
    """
    if k < 1 or (k > 2 and not force):
        raise SpecError(f"k={k} unsupported (k <= 2 unless forced)")
    ks = KStar(k)
    return ks.spec, ks.strategy()


def rule_from_descriptor(spec: GameSpec, v: int, desc: dict):
    """Rebuild a procedural rule from its JSON descriptor."""
    name = desc["rule"]
    if name == "clique_sum":
        return clique_sum_strategy(int(desc["n"]), int(desc.get("modulus", desc["n"])))[v]
    if name in ("kstar_leaf", "kstar_clique"):
        ks = _kstar_cached(int(desc["k"]))
        if name == "kstar_leaf":
            return ks.leaf_rule(int(desc["subset_rank"]))
        return ks.clique_rule(v)
    if name == "tree_power":
        return tree_power_strategy(spec.graph)[1][v]
    if name == "red_or_copy":
        return red_or_copy_rule(spec.graph, v, int(desc["w"]), spec.palette[v], int(desc["red"]))
    raise SpecError(f"unknown rule {name!r}")


@lru_cache(maxsize=4)
def _kstar_cached(k: int) -> KStar:
    return KStar(k)


__all__ = [
    "KStar", "clique_sum_spec", "clique_sum_strategy", "clique_witness", "kn_admissible_strategy",
    "kstar_strategy", "red_or_copy_rule", "rule_from_descriptor", "tree_power_strategy",
]


def red_or_copy_rule(g: Graph, v: int, w: int, K: int, red: int = 0) -> FuncRule:
    """``v`` answers ``red`` if any neighbor wears it, else the color of neighbor ``w``."""
    nbrs = g.adj[v]
    if w not in nbrs:
        raise SpecError(f"{w} is not a neighbor of {v}")
    i = nbrs.index(w)
    return FuncRule(nbrs, (K,) * len(nbrs),
                    lambda view: (red,) if red in view else (view[i],),
                    {"rule": "red_or_copy", "w": w, "red": red})

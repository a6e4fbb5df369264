"""The Demon's side: dominant colors and demonic-coloring constructions."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .game import (
    Coloring, GameSpec, SpaceTooLarge, SpecError, Strategy, TableRule, is_demonic,
    rule_cube, rule_from_cube,
)
from .graphcore import Graph, VertexOrder


class DemonError(RuntimeError):
    """A construction's precondition failed (or a proof step did not hold)."""


@dataclass(frozen=True)
class Cube:
    components: tuple[frozenset[int], ...]

    def __post_init__(self):
        comps = tuple(frozenset(c) for c in self.components)
        if any(not c for c in comps):
            raise ValueError("cube components must be non-empty")
        object.__setattr__(self, "components", comps)

    def __contains__(self, x) -> bool:
        return len(x) == len(self.components) and all(a in c for a, c in zip(x, self.components))

    def __iter__(self):
        return product(*(sorted(c) for c in self.components))

    def intersect(self, other: "Cube") -> "Cube | None":
        comps = [a & b for a, b in zip(self.components, other.components)]
        return Cube(tuple(comps)) if all(comps) else None


# -- dominant colors -----------------------------------------------------------

def _has_cube(P: np.ndarray, m: int) -> bool:
    """Does the boolean array ``P`` contain a cube with every side of size ``m``?"""
    if P.ndim == 0:
        return bool(P)
    need = m ** (P.ndim - 1)
    rows = [a for a in range(P.shape[0]) if P[a].sum() >= need]
    if len(rows) < m:
        return False
    for choice in combinations(rows, m):
        inter = np.logical_and.reduce(P[list(choice)], axis=0)
        if inter.sum() >= need and _has_cube(inter, m):
            return True
    return False


def dominant_colors(cube: np.ndarray, s: int = 1) -> frozenset[int]:
    """Colors whose guess-preimage contains a cube with sides ``k - s``.

    ``cube`` is a guess indicator as returned by :func:`hatters.game.rule_cube`:
    one axis per view coordinate (each of size ``k``) and a final color axis.
    """
    k = cube.shape[-1]
    if s >= k:
        raise SpecError("need s < k")
    return frozenset(d for d in range(k) if _has_cube(cube[..., d], k - s))


def rule_dominant_colors(rule, k: int, s: int = 1) -> frozenset[int]:
    return dominant_colors(rule_cube(rule, k), s)


def _pad(colors, size: int, palette: int) -> list[int]:
    out = sorted(colors)
    for x in range(palette):
        if len(out) >= size:
            break
        if x not in colors:
            out.append(x)
    return sorted(out)


# -- trees ---------------------------------------------------------------------

def _rooted(tree: Graph, root: int) -> list[int]:
    parent = [-2] * tree.n
    parent[root] = -1
    stack = [root]
    while stack:
        v = stack.pop()
        for u in tree.adj[v]:
            if parent[u] == -2:
                parent[u] = v
                stack.append(u)
    return parent


def tree_demonic(tree: Graph, strat: Strategy, k: int, s: int = 1,
                 c: int | None = None, root: int = 0, backend: str = "auto") -> Coloring:
    """Demonic coloring of a tree with ``f(root) = c``.

    ``c`` must not be ``s``-dominant for the root's rule; by default the
    smallest non-dominant color is used.  Needs ``k > s(s+1)``.  A forest is
    handled component by component (``root`` and ``c`` apply to the
    component containing ``root``).
    """
    if k <= s * (s + 1):
        raise DemonError(f"k={k} must exceed s(s+1)={s * (s + 1)}")
    if tree.num_edges != tree.n - _components(tree):
        raise DemonError("graph is not a forest")
    tabs = strat.tabulate(s)
    for v in range(tree.n):
        if tabs[v].neighbors != tree.adj[v] or any(r != k for r in tabs[v].radices):
            raise SpecError(f"rule {v} does not fit the tree with {k} colors")
    roots, targets = [], []
    parent = [-2] * tree.n
    for r in [root] + list(range(tree.n)):
        if tree.n == 0 or parent[r] != -2:
            continue
        comp_parent = _rooted(tree, r)
        for v, p in enumerate(comp_parent):
            if p != -2:
                parent[v] = p
        dom = rule_dominant_colors(tabs[r], k, s)
        if r == root and c is not None:
            if c in dom or not 0 <= c < k:
                raise DemonError(f"color {c} is dominant for the root (dominant: {sorted(dom)})")
            target = c
        else:
            free = [x for x in range(k) if x not in dom]
            if not free:
                raise DemonError("every color is dominant for the root")
            target = free[0]
        roots.append(r)
        targets.append(target)
    if backend == "auto":
        backend = _kernels.BACKEND
    if backend == "cython" and _kernels.tree_demon is not None:
        return _tree_demonic_kernel(tree, tabs, k, s, parent, roots, targets)
    return _tree_demonic_py(tree, tabs, k, s, parent, roots, targets)


def _components(g: Graph) -> int:
    seen, comps = set(), 0
    for v in range(g.n):
        if v in seen:
            continue
        comps += 1
        stack = [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            for u in g.adj[x]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
    return comps


def _tree_demonic_py(tree, tabs, k, s, parent, roots, targets) -> Coloring:
    cubes = [rule_cube(tabs[v], k) for v in range(tree.n)]
    f = [-1] * tree.n

    def pinned(v, u, x):
        """Rule of ``v`` with neighbor ``u`` pinned to ``x``."""
        return np.take(cubes[v], x, axis=tree.adj[v].index(u))

    def solve(v, target):
        p = parent[v]
        R = cubes[v] if p < 0 else pinned(v, p, f[p])
        children = [u for u in tree.adj[v] if u != p]
        allowed = []
        for u in children:
            D = dominant_colors(pinned(u, v, target), s)
            if len(D) > s:
                raise DemonError(f"{len(D)} dominant colors at {u}; k too small?")
            D = _pad(D, s, k)
            allowed.append([x for x in range(k) if x not in D])
        for a in product(*allowed):
            if not R[a + (target,)]:
                break
        else:
            raise DemonError(f"color {target} is dominant at vertex {v}")
        f[v] = target
        for u, x in zip(children, a):
            solve(u, x)

    for r, t in zip(roots, targets):
        solve(r, t)
    return tuple(f)


def _tree_demonic_kernel(tree, tabs, k, s, parent, roots, targets) -> Coloring:
    n = tree.n
    nb_ptr = np.zeros(n + 1, dtype=np.int64)
    nb_ptr[1:] = np.cumsum(tree.degrees)
    nb_idx = np.array([u for v in range(n) for u in tree.adj[v]], dtype=np.int64)
    tab_ptr = np.zeros(n + 1, dtype=np.int64)
    blocks = []
    for v in range(n):
        blocks.append(tabs[v].table.ravel())
        tab_ptr[v + 1] = tab_ptr[v] + tabs[v].table.size
    guesses = np.ascontiguousarray(np.concatenate(blocks).astype(np.int32))
    out = np.full(n, -1, dtype=np.int64)
    status = _kernels.tree_demon(
        k, s, nb_ptr, nb_idx, tab_ptr, guesses, np.asarray(parent, dtype=np.int64),
        np.asarray(roots, dtype=np.int64), np.asarray(targets, dtype=np.int64), out)
    if status != 0:
        raise DemonError(f"tree recursion failed at vertex {status - 1}")
    return tuple(int(x) for x in out)


# -- partition composition -----------------------------------------------------

SubDemon = Callable[[Graph, Strategy, int, int], Coloring]


def independent_demon(g: Graph, strat: Strategy, k: int, s: int) -> Coloring:
    """Edgeless graphs: every rule is a constant set; avoid it."""
    if g.num_edges:
        raise DemonError("independent_demon needs an edgeless graph")
    out = []
    for v in range(g.n):
        guessed = set(strat[v].guess(()))
        free = [x for x in range(k) if x not in guessed]
        if not free:
            raise DemonError(f"vertex {v} guesses every color")
        out.append(free[0])
    return tuple(out)


def tree_demon(g: Graph, strat: Strategy, k: int, s: int) -> Coloring:
    """Sub-demon adapter for forests."""
    return tree_demonic(g, strat, k, s)


def exhaustive_demon(g: Graph, strat: Strategy, k: int, s: int) -> Coloring:
    c = exhaustive_demonic_search(GameSpec.uniform(g, k, s), strat)
    if c is None:
        raise DemonError("no demonic coloring exists")
    return c


def partition_demonic(g: Graph, part_a: Sequence[int], part_b: Sequence[int], strat: Strategy,
                      K: int, s: int, K1: int, demon_a: SubDemon, demon_b: SubDemon) -> Coloring:
    """Compose demons on ``G[A]`` (``K1`` colors) and ``G[B]`` (``K`` colors).

    Vertices of ``A`` only receive colors below ``K1``.  Each ``B`` vertex is
    charged with the union of its guesses over all such ``A`` colorings of
    its ``A``-neighbors, so ``G[B]`` is played with ``s1 = s * K1**d``
    guesses where ``d`` is the largest number of ``A``-neighbors of a
    ``B`` vertex.
    """
    A, B = sorted(set(part_a)), sorted(set(part_b))
    if sorted(A + B) != list(range(g.n)):
        raise SpecError("A and B must partition the vertices")
    if not 1 <= K1 <= K:
        raise SpecError("need 1 <= K1 <= K")
    in_a = set(A)
    d = max((sum(u in in_a for u in g.adj[v]) for v in B), default=0)
    s1 = s * K1 ** d
    if s1 >= K:
        raise SpecError(f"s1 = {s1} must be below K = {K}")
    if A and s >= K1:
        raise SpecError(f"s = {s} must be below K1 = {K1}")
    tabs = strat.tabulate()
    for v in range(g.n):
        if tabs[v].neighbors != g.adj[v] or any(r != K for r in tabs[v].radices):
            raise SpecError(f"rule {v} does not fit the graph with {K} colors")

    gb, keep_b = g.induced_subgraph(B)
    ga, keep_a = g.induced_subgraph(A)
    phi = [-1] * g.n

    rules_b = []
    for v in keep_b:
        cube = rule_cube(tabs[v], K)
        a_axes = tuple(i for i, u in enumerate(g.adj[v]) if u in in_a)
        sl = tuple(slice(0, K1) if i in a_axes else slice(None) for i in range(cube.ndim))
        merged = cube[sl].any(axis=a_axes) if a_axes else cube
        rules_b.append(_padded_rule([keep_b.index(u) for u in g.adj[v] if u not in in_a],
                                    merged, s1))
    phi_b = demon_b(gb, Strategy(rules_b), K, s1) if B else ()
    for v, x in zip(keep_b, phi_b):
        phi[v] = x

    rules_a = []
    for v in keep_a:
        cube = rule_cube(tabs[v], K)
        idx = []
        for u in g.adj[v]:
            idx.append(slice(0, K1) if u in in_a else phi[u])
        sub = cube[tuple(idx) + (slice(0, K1),)]
        rules_a.append(_padded_rule([keep_a.index(u) for u in g.adj[v] if u in in_a], sub, s))
    phi_a = demon_a(ga, Strategy(rules_a), K1, s) if A else ()
    for v, x in zip(keep_a, phi_a):
        phi[v] = x
    return tuple(phi)


def _padded_rule(neighbors, cube: np.ndarray, size: int) -> TableRule:
    """Table rule whose guess sets are those of ``cube`` padded to ``size``."""
    palette = cube.shape[-1]
    flat = cube.reshape(-1, palette)
    counts = flat.sum(axis=1)
    if (counts > size).any():
        raise DemonError(f"guess union of size {int(counts.max())} exceeds {size}")
    out = cube.copy()
    o = out.reshape(-1, palette)
    for i in np.flatnonzero(counts < size):
        missing = size - counts[i]
        for x in range(palette):
            if missing == 0:
                break
            if not o[i, x]:
                o[i, x] = True
                missing -= 1
    return rule_from_cube(neighbors, out)


# -- bi-polar strategies -------------------------------------------------------

def is_bipolar(spec: GameSpec, v: int, rule, order: VertexOrder,
               from_own_position: bool = False, strict: bool = False) -> bool:
    """Check the bi-polar property of ``rule`` (vertex ``v``) for ``order``.

    For each checked position ``j``, each assignment of the earlier positions
    and each color at ``j``, the set of possible guesses over all completions
    must be the whole palette or a singleton, and a singleton ``{y}`` may come
    from at most one color at ``j``.  The at-most-one clause is waived when
    the earlier positions already force that same singleton, unless
    ``strict``.  By default every position is checked; ``from_own_position``
    checks only positions from ``v``'s own onward.
    """
    pal = spec.palette[v]
    cube = rule_cube(rule, pal)
    nbrs = list(rule.neighbors)
    pos = order.position
    nb_pos = [pos[u] for u in nbrs]
    first = pos[v] if from_own_position else 0
    for j in range(first, spec.n):
        u = order.order[j]
        after = tuple(i for i, p in enumerate(nb_pos) if p > j)
        img = cube.any(axis=after) if after else cube
        # remaining axes: the neighbors up to position j, in neighbor order
        if u in nbrs:
            axes_left = [i for i in range(len(nbrs)) if i not in after]
            jaxis = axes_left.index(nbrs.index(u))
            img = np.moveaxis(img, jaxis, -2)
        else:
            img = np.repeat(img[..., None, :], spec.palette[u], axis=-2)
        img = img.reshape(-1, img.shape[-2], pal)  # (prefix, x_j, color)
        sizes = img.sum(axis=-1)
        if not np.all((sizes == 1) | (sizes == pal)):
            return False
        for p in range(img.shape[0]):
            single = sizes[p] == 1
            if single.sum() < 2:
                continue
            values = img[p][single].argmax(axis=-1)
            if len(set(values.tolist())) == len(values):
                continue
            if not strict and single.all() and len(set(values.tolist())) == 1:
                continue
            return False
    return True


def bipolar_demonic(g: Graph, order: VertexOrder, strat: Strategy, K: int,
                    check: bool = True) -> Coloring:
    """Greedy demonic coloring along ``order`` against bi-polar rules.

    Each vertex avoids the color that would pin an earlier neighbor's guess
    to that neighbor's own color, and its own forced guess if there is one.
    Needs ``K`` above ``1 + max back-degree`` of the order.
    """
    spec = GameSpec.uniform(g, K)
    if K <= 1 + order.max_back_degree:
        raise DemonError(f"K={K} must exceed 1 + max back-degree = {1 + order.max_back_degree}")
    cubes = [rule_cube(strat[v], K) for v in range(g.n)]
    if check:
        for v in range(g.n):
            if not is_bipolar(spec, v, strat[v], order, from_own_position=True):
                raise DemonError(f"rule {v} is not bi-polar for this order")
    pos = order.position
    x = [-1] * g.n

    def image(w: int, upto: int) -> np.ndarray:
        """Possible guesses of ``w`` once positions ``<= upto`` are colored."""
        idx = tuple(x[u] if pos[u] <= upto else slice(None) for u in g.adj[w])
        sub = cubes[w][idx]
        return sub.reshape(-1, K).any(axis=0)

    for t, u in enumerate(order.order):
        banned = set()
        own = image(u, t - 1)
        if own.sum() == 1:
            banned.add(int(own.argmax()))
        for w in g.adj[u]:
            if pos[w] >= t:
                continue
            for cand in range(K):
                x[u] = cand
                img = image(w, t)
                if img.sum() == 1 and img[x[w]]:
                    banned.add(cand)
            x[u] = -1
        free = [c for c in range(K) if c not in banned]
        if not free:
            raise DemonError(f"no legal color at vertex {u}")
        x[u] = free[0]
    return tuple(x)


# -- exhaustive ----------------------------------------------------------------

def exhaustive_demonic_search(spec: GameSpec, strat: Strategy, limit: int = 10**7) -> Coloring | None:
    """First demonic coloring in lexicographic order, by plain enumeration.

    Deliberately independent of the scan kernel behind
    :func:`hatters.game.verify_winning`.
    """
    total = spec.coloring_count()
    if total > limit:
        raise SpaceTooLarge("colorings", total, limit)
    tabs = strat.tabulate()
    tabs.check(spec)
    for c in spec.colorings():
        if is_demonic(spec, tabs, c):
            return tuple(c)
    return None

import itertools

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from hatters.graphcore import (
    Graph, GraphError, VertexOrder, chromatic_number, degeneracy_order, find_clique,
    is_proper_partition, make_complete, make_complete_bipartite, make_cycle, make_empty,
    make_kstar, make_path, make_tree_random, nonisomorphic_trees, small_graphs, subdivide,
    tree_from_prufer,
)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


@st.composite
def graphs(draw, max_n=8):
    n = draw(st.integers(0, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, keep in zip(pairs, mask) if keep])


def test_generators_shapes():
    assert make_complete(1).num_edges == 0
    assert make_complete(5).num_edges == 10
    assert make_cycle(5).degrees == (2,) * 5
    assert make_path(4).edges() == [(0, 1), (1, 2), (2, 3)]
    assert make_empty(3).num_edges == 0
    assert make_complete_bipartite(2, 3).num_edges == 6


def test_random_tree_is_tree_and_seeded():
    t = make_tree_random(8, seed=1)
    assert t.n == 8 and t.num_edges == 7 and t.is_tree()
    assert make_tree_random(8, seed=1) == t
    assert make_tree_random(1, seed=0).n == 1


def test_prufer_roundtrip_star():
    t = tree_from_prufer([0, 0, 0])
    assert t.degrees[0] == 4 and t.is_tree()


def test_kstar_parts():
    g, clique, leaves = make_kstar(1, 3)
    assert nx.is_isomorphic(to_nx(g), nx.star_graph(3))
    g, clique, leaves = make_kstar(2, 1)
    assert nx.is_isomorphic(to_nx(g), nx.complete_graph(3))
    g, clique, leaves = make_kstar(3, 4)
    assert clique == [0, 1, 2]
    assert g.is_independent(leaves)
    assert all(set(clique) <= set(g.adj[v]) for v in leaves)


def test_subdivide_numbering():
    g, orig, new = subdivide(make_complete(4))
    assert orig == [0, 1, 2, 3] and len(new) == 6
    assert g.is_independent(orig) and g.is_independent(new)
    assert all(g.degree(v) == 2 for v in new)


@pytest.mark.parametrize("bad", [
    {"n": 2, "edges": [[0, 0]]},
    {"n": 2, "edges": [[0, 2]]},
    {"n": 2, "edges": [[0, 1], [1, 0]]},
    {"n": 2, "edges": [[0, 1, 1]]},
    {"edges": []},
])
def test_from_json_rejects(bad):
    with pytest.raises(GraphError):
        Graph.from_json(bad)


@given(graphs())
def test_json_roundtrip(g):
    assert Graph.from_json(g.to_json()) == g


@given(graphs())
@settings(max_examples=60)
def test_degeneracy_matches_networkx(g):
    order, col = degeneracy_order(g)
    assert sorted(order.order) == list(range(g.n))
    assert col == 1 + order.max_back_degree
    assert col == 1 + max(nx.core_number(to_nx(g)).values(), default=0)


@given(graphs(max_n=7))
@settings(max_examples=60, deadline=None)
def test_chromatic_number_exact(g):
    res = chromatic_number(g)
    assert res.exact
    assert is_proper_partition(g, res.partition)
    assert len(res.partition) == res.value
    # brute force: smallest k with a proper k-coloring
    for k in range(0 if g.n == 0 else 1, g.n + 1):
        if any(all(c[u] != c[v] for u, v in g.edges())
               for c in itertools.product(range(k), repeat=g.n)):
            assert res.value == k
            break


def test_vertex_order_validation():
    g = make_path(3)
    o = VertexOrder.of(g, [1, 0, 2])
    assert o.back_degree == (1, 0, 1)
    with pytest.raises(GraphError):
        VertexOrder.of(g, [0, 0, 1])


def test_tree_and_graph_counts():
    # OEIS A000055 and A000088
    assert [len(nonisomorphic_trees(n)) for n in range(1, 11)] == [1, 1, 1, 2, 3, 6, 11, 23, 47, 106]
    assert [sum(g.n == n for g in small_graphs(5)) for n in range(1, 6)] == [1, 2, 4, 11, 34]
    for t in nonisomorphic_trees(7):
        assert t.is_tree()


def test_find_clique():
    g = make_cycle(5)
    assert find_clique(g, 2) == [0, 1]
    assert find_clique(g, 3) is None
    assert find_clique(make_complete(4), 4) == [0, 1, 2, 3]
    assert find_clique(g, 0) == []

from __future__ import annotations

import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _graphs import cycle_graph, path_graph, star_graph
from treeuniv.errors import InputError
from treeuniv.generators import complete_graph, gen_gnp
from treeuniv.graph import (
    Embedding,
    Graph,
    components,
    external_neighborhood,
    girth,
    induced_subgraph,
    is_connected,
    ordered_edge_count,
    radius,
    validate_embedding,
)


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return Graph(n, chosen)


def test_graph_rejects_loops_and_out_of_range():
    with pytest.raises(InputError):
        Graph(3, [(1, 1)])
    with pytest.raises(InputError):
        Graph(3, [(0, 3)])


def test_duplicate_edges_collapse_or_fail():
    try:
        G = Graph(3, [(0, 1), (1, 0)])
    except InputError:
        return
    assert G.m == 1


def test_adjacency_is_symmetric_and_sorted():
    G = gen_gnp(15, 0.4, 3)
    for v in G.vertices():
        assert list(G.neighbors(v)) == sorted(G.neighbors(v))
        for w in G.neighbors(v):
            assert v in G.adj(w)


@pytest.mark.parametrize(
    "G, X, expected",
    [
        (complete_graph(4), {0}, {1, 2, 3}),
        (path_graph(4), {1, 2}, {0, 3}),
        (complete_graph(4), {0, 1, 2, 3}, set()),
    ],
)
def test_external_neighborhood_examples(G, X, expected):
    assert external_neighborhood(G, X) == expected


def test_external_neighborhood_rejects_bad_ids():
    with pytest.raises(InputError):
        external_neighborhood(path_graph(3), {5})


def test_ordered_edge_count_examples():
    edge = Graph(2, [(0, 1)])
    assert ordered_edge_count(edge, {0, 1}, {0, 1}) == 2
    tri = complete_graph(3)
    assert ordered_edge_count(tri, {0, 1}, {2}) == 2
    assert ordered_edge_count(tri, {0, 1}, {1, 2}) == 3


def test_induced_subgraph_examples():
    H, labels = induced_subgraph(complete_graph(5), {1, 3, 4})
    assert H == complete_graph(3) and labels == [1, 3, 4]
    H, _ = induced_subgraph(path_graph(4), {0, 2})
    assert H.n == 2 and H.m == 0
    H, _ = induced_subgraph(cycle_graph(5), {0, 1, 2, 3})
    assert H == path_graph(4)


def test_validate_embedding_examples():
    K3 = complete_graph(3)
    assert validate_embedding(Embedding((0, 1, 2)), K3, K3)
    assert not validate_embedding(Embedding((0, 0, 1)), path_graph(3), K3)
    for perm in itertools.permutations(range(3)):
        assert validate_embedding(Embedding(perm), path_graph(3), K3)
    with pytest.raises(InputError):
        validate_embedding(Embedding((0, 1)), K3, K3)


@settings(max_examples=150, deadline=None)
@given(graphs(), st.data())
def test_edge_count_properties(G, data):
    X = data.draw(st.sets(st.integers(0, G.n - 1)))
    Y = data.draw(st.sets(st.integers(0, G.n - 1)))
    assert ordered_edge_count(G, X, Y) == ordered_edge_count(G, Y, X)
    H, _ = induced_subgraph(G, X)
    assert ordered_edge_count(G, X, X) == 2 * H.m
    assert len(external_neighborhood(G, X)) <= G.n - len(X)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=5), graphs(max_n=6))
def test_validate_embedding_matches_definition(H, G):
    if H.n > G.n:
        return
    for phi in itertools.permutations(range(G.n), H.n):
        expected = all(G.has_edge(phi[u], phi[v]) for u, v in H.edges())
        assert validate_embedding(Embedding(phi), H, G) == expected
    # non-injective maps are always rejected
    if H.n >= 2:
        assert not validate_embedding(Embedding((0,) * H.n), H, G)


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=10))
def test_components_radius_girth_match_networkx(G):
    ref = nx.Graph()
    ref.add_nodes_from(range(G.n))
    ref.add_edges_from(G.edges())
    assert sorted(map(sorted, components(G))) == sorted(sorted(c) for c in nx.connected_components(ref))
    assert is_connected(G) == nx.is_connected(ref)
    if nx.is_connected(ref):
        assert radius(G) == nx.radius(ref)
    else:
        with pytest.raises(InputError):
            radius(G)
    expected = nx.girth(ref)
    assert girth(G) == expected


def test_radius_examples():
    assert radius(star_graph(6)) == 1
    assert radius(path_graph(9)) == 4
    assert radius(Graph(1, [])) == 0

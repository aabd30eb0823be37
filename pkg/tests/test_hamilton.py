from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _graphs import brute_expander, path_graph, star_graph
from treeuniv.embed import EmbedBudget, check_path, hamilton_path
from treeuniv.errors import InputError, SearchFailed
from treeuniv.generators import complete_graph, gen_gnp
from treeuniv.graph import Graph


def test_complete_graph():
    path = hamilton_path(complete_graph(4), 0, 3)
    assert check_path(complete_graph(4), path, 0, 3)


def test_path_is_forced():
    assert hamilton_path(path_graph(4), 0, 3) == [0, 1, 2, 3]


def test_star_fails_conclusively():
    with pytest.raises(SearchFailed) as info:
        hamilton_path(star_graph(3), 1, 2)
    assert info.value.conclusive


def test_bad_endpoints():
    with pytest.raises(InputError):
        hamilton_path(complete_graph(4), 2, 2)
    with pytest.raises(InputError):
        hamilton_path(complete_graph(6), 0, 1, within=[1, 2, 3])


def test_within_restricts_vertex_set():
    G = complete_graph(8)
    path = hamilton_path(G, 2, 5, within=[2, 3, 5, 7])
    assert check_path(G, path, 2, 5, [2, 3, 5, 7])


def _brute_has_path(G, s, t):
    mid = [v for v in range(G.n) if v not in (s, t)]
    return any(
        all(G.has_edge(a, b) for a, b in zip(seq, seq[1:]))
        for seq in ((s,) + p + (t,) for p in itertools.permutations(mid))
    )


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.sampled_from([0.4, 0.7]), st.integers(0, 2**32))
def test_exact_mode_matches_brute_force(n, p, seed):
    G = gen_gnp(n, p, seed)
    s, t = 0, n - 1
    try:
        path = hamilton_path(G, s, t)
    except SearchFailed as err:
        assert err.conclusive and not _brute_has_path(G, s, t)
        return
    assert check_path(G, path, s, t)


@pytest.mark.parametrize("seed", range(5))
def test_heuristic_on_dense_random_graph(seed):
    G = gen_gnp(60, 0.3, seed)
    path = hamilton_path(G, 0, 59, EmbedBudget(seed=seed))
    assert check_path(G, path, 0, 59)


def test_heuristic_failure_is_not_conclusive():
    # two cliques joined by one edge: no Hamilton path between vertices of the same clique
    edges = [(a, b) for a in range(6) for b in range(a + 1, 6)]
    edges += [(a + 6, b + 6) for a, b in edges] + [(5, 6)]
    G = Graph(12, edges)
    with pytest.raises(SearchFailed) as info:
        hamilton_path(G, 0, 1, EmbedBudget(max_backtracks=200, max_restarts=2, seed=0))
    assert not info.value.conclusive


def test_small_expanders_are_hamilton_connected():
    G = gen_gnp(9, 0.8, 3)
    assert brute_expander(G, 1) == "Pass"
    for s, t in itertools.combinations(range(9), 2):
        assert check_path(G, hamilton_path(G, s, t), s, t)

from __future__ import annotations

import collections
import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _graphs import broom, caterpillar, long_path_tree, path_tree, spider, star_tree
from treeuniv.errors import InputError, NoCaseError
from treeuniv.graph import induced_subgraph, radius
from treeuniv.trees import (
    Case,
    Tree,
    all_labeled_trees,
    canonical_form,
    classify_case,
    complete_ary_tree,
    decompose,
    default_thresholds,
    path_or_leaves_exhaustive,
    pruefer_from_tree,
    random_bounded_degree_tree,
    sample_bounded_degree_tree,
    tree_from_pruefer,
    verify_path_or_leaves,
)


@st.composite
def trees(draw, min_n=2, max_n=30):
    n = draw(st.integers(min_n, max_n))
    seq = draw(st.lists(st.integers(0, n - 1), min_size=n - 2, max_size=n - 2))
    return tree_from_pruefer(seq)


def test_tree_rejects_non_trees():
    with pytest.raises(InputError):
        Tree(3, [(0, 1)])
    with pytest.raises(InputError):
        Tree(4, [(0, 1), (1, 2), (0, 2)])
    with pytest.raises(InputError):
        Tree(0)


def test_pruefer_examples():
    assert tree_from_pruefer(()) == Tree(2, [(0, 1)])
    assert tree_from_pruefer((0, 0)) == star_tree(4)
    assert pruefer_from_tree(path_tree(3)) == (1,)
    assert pruefer_from_tree(star_tree(4)) == (0, 0)
    with pytest.raises(InputError):
        tree_from_pruefer((0, 4))


@pytest.mark.parametrize("n", range(2, 8))
def test_pruefer_roundtrip_and_cayley(n):
    seen = set()
    for seq in itertools.product(range(n), repeat=n - 2):
        T = tree_from_pruefer(seq)
        assert pruefer_from_tree(T) == seq
        seen.add(tuple(T.edges()))
    assert len(seen) == n ** (n - 2)


def test_all_labeled_trees_count():
    assert sum(1 for _ in all_labeled_trees(6)) == 6**4
    assert [T.n for T in all_labeled_trees(1)] == [1]


def test_tree_helpers():
    T = Tree.from_parents([0, 0, 1, 1])
    assert T.parents(0) == [-1, 0, 0, 1, 1]
    assert T.bfs_order(0) == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("n", [3, 5, 9])
def test_sampler_degree_two_gives_paths(n):
    for seed in range(5):
        T = random_bounded_degree_tree(n, 2, seed)
        assert T.max_degree() <= 2 and sorted(T.degrees()) == [1, 1] + [2] * (n - 2)


def test_sampler_rejects_impossible_cap():
    with pytest.raises(InputError):
        random_bounded_degree_tree(5, 1.5, 0)


def test_sampler_fallback_is_flagged():
    s = sample_bounded_degree_tree(40, 3, 0, max_tries=1)
    if s.tries == 1 and s.uniform:
        return  # the single draw happened to succeed
    assert s.tree.max_degree() <= 3 and not s.uniform
    assert sample_bounded_degree_tree(40, 2, 0, max_tries=1).uniform  # paths stay uniform


def test_sampler_is_uniform_over_isomorphism_classes():
    # exact class sizes in T(8, 3): every Pruefer sequence with each label at most twice
    n, delta = 8, 3
    seqs = np.array(list(itertools.product(range(n), repeat=n - 2)), dtype=np.int8)
    counts = np.stack([(seqs == v).sum(axis=1) for v in range(n)], axis=1)
    admissible = seqs[counts.max(axis=1) <= delta - 1]
    exact = collections.Counter(canonical_form(tree_from_pruefer(s.tolist())) for s in admissible)
    total = len(admissible)
    draws = 10_000
    got = collections.Counter(canonical_form(random_bounded_degree_tree(n, delta, s)) for s in range(draws))
    assert set(got) <= set(exact)
    for cls, k in exact.items():
        p = k / total
        sigma = math.sqrt(draws * p * (1 - p))
        assert abs(got[cls] - draws * p) <= 5 * sigma, cls


@pytest.mark.parametrize("n, b, edges", [(7, 2, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]), (4, 3, [(0, 1), (0, 2), (0, 3)])])
def test_complete_ary_tree_examples(n, b, edges):
    assert complete_ary_tree(n, b) == Tree(n, edges)


def test_complete_ary_radius_example():
    assert radius(complete_ary_tree(7, 2)) == 2 < 1 + math.log(7) / math.log(2)


def test_decompose_path():
    dec = decompose(path_tree(5))
    assert dec.leaves == {0, 4}
    assert dec.longest_bare_path == (1, 2, 3)
    assert dec.leaf_neighbors == {1, 3}


def test_decompose_star():
    dec = decompose(star_tree(5))
    assert dec.leaves == {1, 2, 3, 4}
    assert dec.longest_bare_path == ()
    # T - L is the lone centre, which has degree 0 there
    assert dec.second_level_leaves == frozenset() and dec.second_level_degree[0] == 0


def test_decompose_spider():
    dec = decompose(spider(3, 3))
    assert dec.leaves == {3, 6, 9}
    assert dec.bare_paths == ((1, 2), (4, 5), (7, 8))
    assert dec.branch_vertices == {0}


@settings(max_examples=150, deadline=None)
@given(trees())
def test_decompose_invariants(T):
    dec = decompose(T)
    deg = T.degrees()
    assert all(deg[v] == 1 for v in dec.leaves)
    interiors = [v for p in dec.bare_paths for v in p]
    assert all(deg[v] == 2 for v in interiors)
    assert len(interiors) == len(set(interiors))
    # leaves, bare-path vertices and branch vertices partition V
    parts = [set(dec.leaves), set(interiors), set(dec.branch_vertices)]
    assert sum(map(len, parts)) == T.n and set().union(*parts) == set(range(T.n))
    for p in dec.bare_paths:
        assert all(T.has_edge(a, b) for a, b in zip(p, p[1:]))
    # M' matches the degree-1 vertices of the tree with its leaves removed
    rest = [v for v in range(T.n) if v not in dec.leaves]
    if rest:
        H, labels = induced_subgraph(T, rest)
        assert dec.second_level_leaves == {labels[i] for i in range(H.n) if H.degree(i) == 1}
        for p in dec.second_level_bare_paths:
            assert all(H.degree(labels.index(v)) == 2 for v in p)


def test_bare_paths_are_sorted_longest_first():
    dec = decompose(long_path_tree())
    lengths = [len(p) for p in dec.bare_paths]
    assert lengths == sorted(lengths, reverse=True)
    assert len(dec.longest_bare_path) == 38


@pytest.mark.parametrize("n", [2, 5, 12])
def test_path_or_leaves_examples(n):
    assert verify_path_or_leaves(path_tree(n)) == (n - 2, 2, True)
    if n >= 4:
        assert verify_path_or_leaves(star_tree(n)) == (0, n - 1, True)


@settings(max_examples=100, deadline=None)
@given(trees(min_n=3, max_n=60))
def test_path_or_leaves_always_holds(T):
    assert verify_path_or_leaves(T)[2]


def test_exhaustive_matches_scalar():
    n = 7
    res = path_or_leaves_exhaustive(n)
    assert res["trees"] == n ** (n - 2) and res["violations"] == 0
    for i, T in enumerate(all_labeled_trees(n)):
        p, nl, _ = verify_path_or_leaves(T)
        assert (res["path"][i], res["leaves"][i]) == (p, nl)


def test_exhaustive_size_guard():
    with pytest.raises(InputError):
        path_or_leaves_exhaustive(11)


def test_default_thresholds():
    assert default_thresholds(3, 2) == (300, 300)
    assert default_thresholds(2.5, 1) == (125, 63)


def test_classify_examples():
    assert classify_case(path_tree(10), 2, 1, tau_path=3, tau_leaves=100) is Case.CASE1
    assert classify_case(caterpillar(10), 3, 1, tau_path=3, tau_leaves=4) is Case.CASE2
    assert classify_case(broom(), 5, 1, tau_path=30, tau_leaves=8) is Case.CASE3
    assert classify_case(long_path_tree(), 3, 1, tau_path=30, tau_leaves=20) is Case.CASE1


def test_classify_no_case_carries_stats():
    with pytest.raises(NoCaseError) as info:
        classify_case(star_tree(6), 5, 1, tau_path=3, tau_leaves=10)
    assert info.value.stats["leaves"] == 5 and info.value.stats["tau_leaves"] == 10


@settings(max_examples=60, deadline=None)
@given(trees(min_n=3, max_n=60), st.integers(1, 8))
def test_classify_refusals_still_have_enough_leaves(T, tau_path):
    # short bare paths force many leaves, so a refusal is never for lack of leaves
    tau_leaves = max(1, T.n // (2 * tau_path))
    try:
        classify_case(T, T.max_degree(), 1, tau_path, tau_leaves)
    except NoCaseError as err:
        assert err.stats["longest_bare_path"] < tau_path
        assert err.stats["leaves"] >= tau_leaves


@settings(max_examples=80, deadline=None)
@given(trees(max_n=14), st.randoms(use_true_random=False))
def test_canonical_form_is_isomorphism_invariant(T, rnd):
    perm = list(range(T.n))
    rnd.shuffle(perm)
    relabelled = Tree(T.n, [(perm[u], perm[v]) for u, v in T.edges()])
    assert canonical_form(relabelled) == canonical_form(T)


@settings(max_examples=80, deadline=None)
@given(trees(max_n=10), trees(max_n=10))
def test_canonical_form_matches_networkx(A, B):
    if A.n != B.n:
        return
    ga, gb = nx.Graph(list(A.edges())), nx.Graph(list(B.edges()))
    assert (canonical_form(A) == canonical_form(B)) == nx.is_isomorphic(ga, gb)

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeuniv.errors import InputError
from treeuniv.formats import (
    dumps_graph,
    dumps_tree,
    graph_to_json,
    loads_graph,
    loads_trees,
    read_graph,
    read_trees,
    write_graph,
)
from treeuniv.generators import gen_gnp
from treeuniv.graph import Graph
from treeuniv.trees import tree_from_pruefer


def test_graph_text_layout():
    G = Graph(3, [(2, 1), (0, 1)])
    assert dumps_graph(G) == "3 2\n0 1\n1 2\n"
    text = dumps_graph(G, {"kind": "gnp", "seed": 4})
    assert text.startswith('# {"kind":"gnp","seed":4}\n')
    assert loads_graph(text) == (G, {"kind": "gnp", "seed": 4})


def test_graph_json_layout():
    G = Graph(3, [(0, 2)])
    assert graph_to_json(G) == '{"edges":[[0,2]],"n":3}\n'
    assert loads_graph(graph_to_json(G, {"a": 1})) == (G, {"a": 1})


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.floats(0, 1), st.integers(0, 2**32))
def test_graph_roundtrips_are_bit_exact(n, p, seed):
    G = gen_gnp(n, p, seed)
    text = dumps_graph(G, {"seed": seed})
    H, prov = loads_graph(text)
    assert H == G and dumps_graph(H, prov) == text
    js = graph_to_json(G)
    assert graph_to_json(loads_graph(js)[0]) == js


@pytest.mark.parametrize(
    "text",
    ["", "3\n", "3 2\n0 1\n", "3 1\n0 x\n", "3 1\n0 1 2\n", "2 1\n0 5\n", '{"n": 3}', "{bad json"],
)
def test_bad_graph_input(text):
    with pytest.raises(InputError):
        loads_graph(text)


def test_file_helpers(tmp_path):
    G = gen_gnp(10, 0.4, 1)
    for name in ["g.txt", "g.json"]:
        write_graph(G, tmp_path / name, {"seed": 1})
        assert read_graph(tmp_path / name) == (G, {"seed": 1})
    (tmp_path / "t.txt").write_text("# two trees\n4 0 0 0\n5 : 1 2 3\n")
    assert [T.n for T in read_trees(tmp_path / "t.txt")] == [4, 5]
    with pytest.raises(OSError):
        read_graph(tmp_path / "missing.txt")


def test_tree_forms():
    T = tree_from_pruefer((0, 0))
    assert dumps_tree(T) == "4 0 0 0\n"
    assert dumps_tree(T, "pruefer") == "4 : 0 0\n"
    assert loads_trees("2 :\n") == [tree_from_pruefer(())]
    assert loads_trees("1\n")[0].n == 1
    with pytest.raises(InputError):
        dumps_tree(T, "newick")


@pytest.mark.parametrize("text", ["", "# only a comment\n", "4 0 0\n", "4 : 1\n", "3 0 5\n", "3 : 7\n"])
def test_bad_tree_input(text):
    with pytest.raises(InputError):
        loads_trees(text)


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 20).flatmap(lambda n: st.lists(st.integers(0, n - 1), min_size=n - 2, max_size=n - 2)))
def test_tree_roundtrips_are_bit_exact(seq):
    T = tree_from_pruefer(seq)
    for form in ["parent", "pruefer"]:
        text = dumps_tree(T, form)
        (U,) = loads_trees(text)
        assert U == T and dumps_tree(U, form) == text
    assert json.loads(json.dumps(list(T.edges()))) == [list(e) for e in T.edges()]

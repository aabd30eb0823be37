"""Reading and writing graphs and trees.

Graph text format::

    # {"kind":"gnp","n":10,...}      optional provenance comment(s)
    n m
    u v                              m lines, u < v, sorted

Graph JSON format: ``{"n": ..., "edges": [[u, v], ...]}`` with an optional
``"provenance"`` object.

Tree formats: a parent array ``n p_1 ... p_{n-1}`` (vertex 0 is the root)
or a Prüfer line ``n : s_1 ... s_{n-2}``.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import InputError
from .graph import Graph
from .trees import Tree, pruefer_from_tree, tree_from_pruefer


def _ints(tokens: list[str], where: str) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise InputError(f"{where}: expected integers, got {' '.join(tokens)!r}") from exc


def dumps_graph(G: Graph, provenance: dict | None = None) -> str:
    lines = []
    if provenance is not None:
        lines.append("# " + json.dumps(provenance, sort_keys=True, separators=(",", ":")))
    lines.append(f"{G.n} {G.m}")
    lines += [f"{u} {v}" for u, v in G.edges()]
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> tuple[Graph, dict | None]:
    """Parse either graph format; returns the graph and its provenance (if any)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad graph JSON: {exc}") from exc
        if "n" not in obj or "edges" not in obj:
            raise InputError("graph JSON needs 'n' and 'edges'")
        return Graph(obj["n"], obj["edges"]), obj.get("provenance")
    provenance = None
    body = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if provenance is None and line[1:].strip().startswith("{"):
                try:
                    provenance = json.loads(line[1:])
                except json.JSONDecodeError:
                    pass
            continue
        body.append((lineno, line.split()))
    if not body:
        raise InputError("empty graph file")
    head = _ints(body[0][1], f"line {body[0][0]}")
    if len(head) != 2:
        raise InputError(f"line {body[0][0]}: header must be 'n m'")
    n, m = head
    edges = []
    for lineno, toks in body[1:]:
        e = _ints(toks, f"line {lineno}")
        if len(e) != 2:
            raise InputError(f"line {lineno}: edge lines are 'u v'")
        edges.append(e)
    if len(edges) != m:
        raise InputError(f"header promises {m} edges, file has {len(edges)}")
    return Graph(n, edges), provenance


def graph_to_json(G: Graph, provenance: dict | None = None) -> str:
    obj: dict = {"n": G.n, "edges": [list(e) for e in G.edges()]}
    if provenance is not None:
        obj["provenance"] = provenance
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def read_graph(path) -> tuple[Graph, dict | None]:
    return loads_graph(Path(path).read_text())


def write_graph(G: Graph, path, provenance: dict | None = None) -> None:
    path = Path(path)
    text = graph_to_json(G, provenance) if path.suffix == ".json" else dumps_graph(G, provenance)
    path.write_text(text)


def dumps_tree(T: Tree, form: str = "parent") -> str:
    if form == "parent":
        return " ".join(map(str, [T.n] + T.parents(0)[1:])) + "\n"
    if form == "pruefer":
        seq = pruefer_from_tree(T) if T.n >= 2 else ()
        return " ".join(map(str, [T.n, ":"] + list(seq))) + "\n"
    raise InputError(f"unknown tree format {form!r}")


def loads_trees(text: str) -> list[Tree]:
    """Parse one tree per non-empty, non-comment line (either format)."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) >= 2 and toks[1] == ":":
            vals = _ints([toks[0]] + toks[2:], f"line {lineno}")
            n, seq = vals[0], vals[1:]
            if n < 2 or len(seq) != n - 2:
                raise InputError(f"line {lineno}: Prüfer line for n={n} needs {max(n - 2, 0)} entries")
            out.append(tree_from_pruefer(seq))
        else:
            vals = _ints(toks, f"line {lineno}")
            n, parents = vals[0], vals[1:]
            if len(parents) != n - 1:
                raise InputError(f"line {lineno}: parent line for n={n} needs {n - 1} entries")
            out.append(Tree.from_parents(parents) if n > 1 else Tree(1))
    if not out:
        raise InputError("no trees in input")
    return out


def read_trees(path) -> list[Tree]:
    return loads_trees(Path(path).read_text())

"""Labelled trees: Prüfer coding, samplers, and the leaf / bare-path decomposition.

A *bare path* is a path all of whose vertices have degree exactly two.
Deleting the leaves ``L`` of a tree leaves a smaller tree ``T - L``; its
leaves and bare paths are the *second-level* leaves and bare paths.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import InputError, NoCaseError
from .graph import Graph, components, radius  # noqa: F401  (radius re-exported)
from .rng import as_rng


class Tree(Graph):
    """A connected acyclic :class:`Graph`."""

    __slots__ = ()

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        super().__init__(n, edges)
        if n == 0:
            raise InputError("a tree needs at least one vertex")
        if self.m != n - 1 or len(components(self)) != 1:
            raise InputError(f"edges do not form a tree on {n} vertices")

    @classmethod
    def _trusted(cls, adj: list[list[int]]) -> "Tree":
        return cls.from_adjacency(adj)

    @classmethod
    def from_parents(cls, parents: Sequence[int]) -> "Tree":
        """Build from ``parents[i-1]`` = parent of vertex ``i`` (vertex 0 is the root)."""
        n = len(parents) + 1
        return cls(n, [(p, i) for i, p in enumerate(parents, start=1)])

    def parents(self, root: int = 0) -> list[int]:
        """Parent of every vertex when rooted at ``root``; the root maps to ``-1``."""
        par = [-2] * self.n
        par[root] = -1
        stack = [root]
        while stack:
            u = stack.pop()
            for w in self.neighbors(u):
                if par[w] == -2:
                    par[w] = u
                    stack.append(w)
        return par

    def bfs_order(self, root: int = 0) -> list[int]:
        order = [root]
        seen = {root}
        for u in order:
            for w in self.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    order.append(w)
        return order


def tree_from_pruefer(seq: Sequence[int]) -> Tree:
    """Decode a Prüfer sequence of length ``n - 2`` into the labelled tree on ``range(n)``."""
    n = len(seq) + 2
    degree = [1] * n
    for x in seq:
        if not 0 <= x < n:
            raise InputError(f"Prüfer entry {x} outside [0, {n})")
        degree[x] += 1
    adj: list[list[int]] = [[] for _ in range(n)]
    ptr = degree.index(1)
    leaf = ptr
    for x in seq:
        adj[leaf].append(x)
        adj[x].append(leaf)
        degree[x] -= 1
        if degree[x] == 1 and x < ptr:
            leaf = x
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    adj[leaf].append(n - 1)
    adj[n - 1].append(leaf)
    return Tree._trusted(adj)


def pruefer_from_tree(T: Graph) -> tuple[int, ...]:
    n = T.n
    if n < 2:
        raise InputError("Prüfer sequences need at least two vertices")
    degree = T.degrees()
    removed = [False] * n
    out = []
    ptr = degree.index(1)
    leaf = ptr
    for _ in range(n - 2):
        removed[leaf] = True
        parent = next(w for w in T.neighbors(leaf) if not removed[w])
        out.append(parent)
        degree[parent] -= 1
        if degree[parent] == 1 and parent < ptr:
            leaf = parent
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    return tuple(out)


def all_pruefer_sequences(n: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(n), repeat=max(n - 2, 0))


def all_labeled_trees(n: int) -> Iterator[Tree]:
    """Every labelled tree on ``range(n)`` (``n ** (n - 2)`` of them), in Prüfer order."""
    if n == 1:
        yield Tree(1)
        return
    for seq in all_pruefer_sequences(n):
        yield tree_from_pruefer(seq)


class TreeSample(NamedTuple):
    tree: Tree
    uniform: bool
    tries: int


def sample_bounded_degree_tree(n: int, delta: float, seed, *, max_tries: int = 20000) -> TreeSample:
    """Uniform sample from the labelled ``n``-vertex trees with maximum degree ``<= delta``.

    Draws uniform Prüfer sequences and rejects those in which some label
    appears ``floor(delta)`` or more times. If ``max_tries`` draws all fail,
    the sequence is built entry by entry among labels with spare capacity;
    that fallback is uniform only when the capacity is one (paths), and the
    returned ``uniform`` flag says which happened.
    """
    cap = math.floor(delta) - 1
    if n <= 2:
        return TreeSample(Tree(n, [(0, 1)] if n == 2 else []), True, 0)
    if cap < 1:
        raise InputError(f"no tree on {n} >= 3 vertices has maximum degree <= {delta}")
    rng = as_rng(seed)
    k = n - 2
    for tries in range(1, max_tries + 1):
        seq = rng.integers(0, n, size=k)
        if np.bincount(seq, minlength=n).max() <= cap:
            return TreeSample(tree_from_pruefer(seq.tolist()), True, tries)
    room = np.full(n, cap)
    seq = []
    for _ in range(k):
        open_labels = np.flatnonzero(room > 0)
        x = int(open_labels[rng.integers(len(open_labels))])
        room[x] -= 1
        seq.append(x)
    return TreeSample(tree_from_pruefer(seq), cap == 1, max_tries)


def random_bounded_degree_tree(n: int, delta: float, seed, *, max_tries: int = 20000) -> Tree:
    return sample_bounded_degree_tree(n, delta, seed, max_tries=max_tries).tree


def complete_ary_tree(n: int, b: int) -> Tree:
    """Rooted ``b``-ary tree on ``n`` vertices, levels filled left to right in BFS order."""
    if b < 1:
        raise InputError("branching must be at least 1")
    if n < 1:
        raise InputError("a tree needs at least one vertex")
    return Tree(n, [((i - 1) // b, i) for i in range(1, n)])


def almost_all_max_degree(n: int) -> float:
    """Degree cap ``2 log n / log log n`` covering almost all labelled trees."""
    if n < 3:
        raise InputError("need n >= 3")
    return 2 * math.log(n) / math.log(math.log(n))


@dataclass(frozen=True)
class TreeDecomposition:
    leaves: frozenset[int]
    leaf_neighbors: frozenset[int]
    second_level_leaves: frozenset[int]
    branch_vertices: frozenset[int]
    bare_paths: tuple[tuple[int, ...], ...]
    second_level_bare_paths: tuple[tuple[int, ...], ...]
    second_level_degree: tuple[int, ...] = field(repr=False)

    @property
    def longest_bare_path(self) -> tuple[int, ...]:
        return self.bare_paths[0] if self.bare_paths else ()

    @property
    def longest_second_level_bare_path(self) -> tuple[int, ...]:
        return self.second_level_bare_paths[0] if self.second_level_bare_paths else ()

    def stats(self) -> dict:
        return {
            "leaves": len(self.leaves),
            "leaf_neighbors": len(self.leaf_neighbors),
            "second_level_leaves": len(self.second_level_leaves),
            "longest_bare_path": len(self.longest_bare_path),
            "longest_second_level_bare_path": len(self.longest_second_level_bare_path),
        }


def _chains(T: Graph, inner: set[int]) -> list[tuple[int, ...]]:
    """Maximal paths inside ``inner`` (a set of vertices that induces a linear forest)."""
    out = []
    seen: set[int] = set()
    for v in sorted(inner):
        if v in seen:
            continue
        # walk to one end of v's chain, then read the chain off
        prev, cur = -1, v
        while True:
            nxt = [w for w in T.neighbors(cur) if w in inner and w != prev]
            if not nxt or nxt[0] == v:
                break
            prev, cur = cur, nxt[0]
        chain = [cur]
        seen.add(cur)
        prev = -1
        while True:
            nxt = [w for w in T.neighbors(cur) if w in inner and w != prev and w not in seen]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            chain.append(cur)
            seen.add(cur)
        rev = chain[::-1]
        out.append(tuple(min(chain, rev)))
    out.sort(key=lambda p: (-len(p), p))
    return out


def decompose(T: Graph) -> TreeDecomposition:
    """Leaves, their neighbours, second-level leaves, and all maximal bare paths.

    Bare paths are listed longest first, ties broken by the lexicographically
    smallest vertex sequence; each path is oriented so that its sequence is
    the smaller of the two readings.
    """
    n = T.n
    if n < 2:
        raise InputError("decomposition needs at least two vertices")
    deg = T.degrees()
    leaves = frozenset(v for v in range(n) if deg[v] == 1)
    leaf_nbrs = frozenset(w for v in leaves for w in T.neighbors(v))
    deg2 = [0] * n
    for v in range(n):
        if deg[v] > 1:
            deg2[v] = deg[v] - sum(1 for w in T.neighbors(v) if w in leaves)
    second_leaves = frozenset(v for v in range(n) if v not in leaves and deg2[v] == 1)
    first = _chains(T, {v for v in range(n) if deg[v] == 2})
    second = _chains(T, {v for v in range(n) if v not in leaves and deg2[v] == 2})
    return TreeDecomposition(
        leaves=leaves,
        leaf_neighbors=leaf_nbrs,
        second_level_leaves=second_leaves,
        branch_vertices=frozenset(v for v in range(n) if deg[v] >= 3),
        bare_paths=tuple(first),
        second_level_bare_paths=tuple(second),
        second_level_degree=tuple(deg2),
    )


def verify_path_or_leaves(T: Graph) -> tuple[int, int, bool]:
    """Check ``2 (|P| + 1)(|L| - 1) >= |V(T)|`` for a longest bare path ``P`` and leaves ``L``."""
    dec = decompose(T)
    p, nl = len(dec.longest_bare_path), len(dec.leaves)
    return p, nl, 2 * (p + 1) * (nl - 1) >= T.n


def path_or_leaves_exhaustive(n: int) -> dict:
    """Vectorised version of :func:`verify_path_or_leaves` over all ``n ** (n-2)`` trees.

    Returns counts of trees and violations plus the per-tree ``(|P|, |L|)``
    arrays, in Prüfer order, for cross-checking against the scalar routine.
    """
    if not 3 <= n <= 10:
        raise InputError("exhaustive check supports 3 <= n <= 10")
    k = n - 2
    grids = np.indices((n,) * k, dtype=np.int8).reshape(k, -1).T
    count = grids.shape[0]
    rows = np.arange(count)
    deg = np.ones((count, n), dtype=np.int8)
    for j in range(k):
        np.add.at(deg, (rows, grids[:, j]), 1)
    tdeg = deg.copy()
    edges = np.empty((count, n - 1, 2), dtype=np.int8)
    for j in range(k):
        leaf = np.argmax(deg == 1, axis=1)
        x = grids[:, j]
        edges[:, j, 0] = leaf
        edges[:, j, 1] = x
        deg[rows, leaf] = 0
        deg[rows, x] -= 1
    last = np.argsort(deg != 1, axis=1, kind="stable")[:, :2]
    edges[:, k, 0] = last[:, 0]
    edges[:, k, 1] = last[:, 1]
    two = tdeg == 2
    label = np.where(two, np.arange(n, dtype=np.int8), np.int8(n))
    for _ in range(n):
        for j in range(n - 1):
            u, v = edges[:, j, 0], edges[:, j, 1]
            both = two[rows, u] & two[rows, v]
            lu, lv = label[rows, u], label[rows, v]
            low = np.minimum(lu, lv)
            label[rows, u] = np.where(both, low, lu)
            label[rows, v] = np.where(both, low, lv)
    longest = np.zeros(count, dtype=np.int16)
    for c in range(n):
        longest = np.maximum(longest, (label == c).sum(axis=1))
    nleaves = (tdeg == 1).sum(axis=1)
    ok = 2 * (longest.astype(np.int64) + 1) * (nleaves - 1) >= n
    return {"n": n, "trees": count, "violations": int((~ok).sum()), "path": longest, "leaves": nleaves}


class Case(enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"


def _ceil(x: Fraction) -> int:
    return math.ceil(x)


@lru_cache(maxsize=256)
def default_thresholds(delta: float, m: int) -> tuple[int, int]:
    """``(ceil(50 delta m), ceil(25 delta m^2))``."""
    dl = Fraction(str(delta)) if isinstance(delta, float) else Fraction(delta)
    return _ceil(50 * dl * m), _ceil(25 * dl * m * m)


def classify_case(
    T: Graph,
    delta: float,
    m: int,
    tau_path: int | None = None,
    tau_leaves: int | None = None,
    *,
    decomposition: TreeDecomposition | None = None,
) -> Case:
    """Pick the embedding case for ``T``.

    Case 1: a first-level bare path with at least ``tau_path`` vertices.
    Case 2: at least ``tau_leaves`` leaves and a second-level bare path with
    at least ``tau_path`` vertices. Case 3: at least ``tau_leaves`` leaves
    and at least ``tau_leaves`` second-level leaves.
    """
    dp, dl = default_thresholds(delta, m)
    tau_path = dp if tau_path is None else tau_path
    tau_leaves = dl if tau_leaves is None else tau_leaves
    dec = decomposition or decompose(T)
    if len(dec.longest_bare_path) >= tau_path:
        return Case.CASE1
    if len(dec.leaves) >= tau_leaves:
        if len(dec.longest_second_level_bare_path) >= tau_path:
            return Case.CASE2
        if len(dec.second_level_leaves) >= tau_leaves:
            return Case.CASE3
    stats = dict(dec.stats(), n=T.n, tau_path=tau_path, tau_leaves=tau_leaves)
    raise NoCaseError(f"no case applies with tau_path={tau_path}, tau_leaves={tau_leaves}", stats)


def canonical_form(T: Graph) -> str:
    """Isomorphism-invariant string for a tree (AHU encoding rooted at the centre)."""
    if T.n == 1:
        return "()"
    deg = T.degrees()
    layer = [v for v in range(T.n) if deg[v] <= 1]
    left = T.n
    while left > 2:
        left -= len(layer)
        nxt = []
        for v in layer:
            for w in T.neighbors(v):
                deg[w] -= 1
                if deg[w] == 1:
                    nxt.append(w)
        layer = nxt

    def encode(root: int) -> str:
        par = {root: -1}
        order = [root]
        for u in order:
            for w in T.neighbors(u):
                if w not in par:
                    par[w] = u
                    order.append(w)
        code: dict[int, list[str]] = {v: [] for v in order}
        out = {}
        for u in reversed(order):
            out[u] = "(" + "".join(sorted(code[u])) + ")"
            if par[u] >= 0:
                code[par[u]].append(out[u])
        return out[root]

    return min(encode(c) for c in layer)

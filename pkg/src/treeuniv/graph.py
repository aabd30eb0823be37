"""Simple undirected graphs on vertices ``0..n-1`` and set-level primitives."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError

Edge = tuple[int, int]


class Graph:
    """Immutable simple undirected graph on ``range(n)``.

    Neighbour sets are stored as frozensets for membership tests and as
    sorted tuples for deterministic iteration.
    """

    __slots__ = ("n", "_adj", "_nbrs", "_m", "_masks")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise InputError(f"vertex count must be a non-negative integer, got {n!r}")
        adj: list[set[int]] = [set() for _ in range(n)]
        m = 0
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge {(u, v)} has an endpoint outside [0, {n})")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if v in adj[u]:
                raise InputError(f"duplicate edge {(min(u, v), max(u, v))}")
            adj[u].add(v)
            adj[v].add(u)
            m += 1
        self._init(n, adj, m)

    def _init(self, n, adj, m):
        self.n = n
        self._adj = tuple(frozenset(s) for s in adj)
        self._nbrs = tuple(tuple(sorted(s)) for s in adj)
        self._m = m
        self._masks = None

    @classmethod
    def from_adjacency(cls, adj: Sequence[Iterable[int]]):
        """Build from neighbour sets that are already symmetric and loop-free."""
        g = cls.__new__(cls)
        sets = [set(a) for a in adj]
        Graph._init(g, len(sets), sets, sum(len(s) for s in sets) // 2)
        return g

    @property
    def m(self) -> int:
        return self._m

    def vertices(self) -> range:
        return range(self.n)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._nbrs[v]

    def adj(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._nbrs[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._nbrs]

    def max_degree(self) -> int:
        return max((len(a) for a in self._nbrs), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def edges(self) -> list[Edge]:
        return [(u, v) for u in range(self.n) for v in self._nbrs[u] if u < v]

    def masks(self) -> list[int]:
        """Neighbourhoods as integer bitmasks (bit ``v`` set iff ``v`` is adjacent)."""
        if self._masks is None:
            self._masks = [sum(1 << w for w in nb) for nb in self._nbrs]
        return self._masks

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._adj == other._adj

    def __hash__(self):
        return hash((self.n, self._adj))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, m={self._m})"


def vertex_set(G: Graph, X: Iterable[int]) -> frozenset[int]:
    """Validate ``X`` as a subset of ``V(G)``."""
    xs = frozenset(int(x) for x in X)
    for x in xs:
        if not 0 <= x < G.n:
            raise InputError(f"vertex {x} outside [0, {G.n})")
    return xs


def external_neighborhood(G: Graph, X: Iterable[int]) -> frozenset[int]:
    """Vertices outside ``X`` adjacent to at least one vertex of ``X``."""
    xs = vertex_set(G, X)
    out: set[int] = set()
    for x in xs:
        out.update(G.adj(x))
    return frozenset(out - xs)


def ordered_edge_count(G: Graph, X: Iterable[int], Y: Iterable[int]) -> int:
    """Number of ordered pairs ``(x, y)`` in ``X x Y`` joined by an edge.

    Edges inside ``X & Y`` are counted twice.
    """
    xs, ys = vertex_set(G, X), vertex_set(G, Y)
    if len(xs) > len(ys):
        xs, ys = ys, xs
    return sum(len(G.adj(x) & ys) for x in xs)


def induced_subgraph(G: Graph, X: Iterable[int]) -> tuple[Graph, list[int]]:
    """Return ``G[X]`` relabelled to ``0..|X|-1`` and the list mapping new ids to old ones."""
    labels = sorted(vertex_set(G, X))
    index = {v: i for i, v in enumerate(labels)}
    adj = [[index[w] for w in G.neighbors(v) if w in index] for v in labels]
    return Graph.from_adjacency(adj), labels


def complement(G: Graph) -> Graph:
    full = set(range(G.n))
    return Graph.from_adjacency([full - G.adj(v) - {v} for v in range(G.n)])


@dataclass(frozen=True)
class Embedding:
    """Injective map from pattern vertices to host vertices.

    ``host`` and ``pattern`` are free-form references (usually file names)
    carried along for serialization.
    """

    map: tuple[int, ...]
    host: str | None = None
    pattern: str | None = None

    def __len__(self):
        return len(self.map)

    def __getitem__(self, v):
        return self.map[v]

    def to_json(self) -> dict:
        return {"map": list(self.map), "host": self.host, "pattern": self.pattern}


def validate_embedding(phi: Embedding | Sequence[int], H: Graph, G: Graph) -> bool:
    """True iff ``phi`` is injective and maps every edge of ``H`` to an edge of ``G``."""
    images = phi.map if isinstance(phi, Embedding) else tuple(phi)
    if len(images) != H.n:
        raise InputError(f"embedding has length {len(images)}, pattern has {H.n} vertices")
    if any(not (0 <= x < G.n) for x in images):
        return False
    if len(set(images)) != len(images):
        return False
    return all(G.has_edge(images[u], images[v]) for u, v in H.edges())


def bfs_distances(G: Graph, source: int, within: frozenset[int] | None = None) -> list[int]:
    """Hop distances from ``source``; ``-1`` marks unreachable vertices."""
    dist = [-1] * G.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in G.neighbors(u):
            if dist[w] < 0 and (within is None or w in within):
                dist[w] = du
                queue.append(w)
    return dist


def components(G: Graph) -> list[list[int]]:
    seen = [False] * G.n
    comps = []
    for s in range(G.n):
        if seen[s]:
            continue
        seen[s] = True
        comp, stack = [s], [s]
        while stack:
            u = stack.pop()
            for w in G.neighbors(u):
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(G: Graph) -> bool:
    return G.n <= 1 or min(bfs_distances(G, 0)) >= 0


def eccentricity(G: Graph, v: int) -> int:
    dist = bfs_distances(G, v)
    if min(dist) < 0:
        raise InputError("graph is disconnected")
    return max(dist)


def _ecc_capped(G: Graph, source: int, cap: int) -> int:
    # BFS that stops as soon as a vertex at distance > cap appears
    dist = [-1] * G.n
    dist[source] = 0
    queue = deque([source])
    reached, far = 1, 0
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in G.neighbors(u):
            if dist[w] < 0:
                if du > cap:
                    return du
                dist[w] = du
                far = du
                reached += 1
                queue.append(w)
    if reached < G.n:
        raise InputError("graph is disconnected")
    return far


def radius(G: Graph) -> int:
    """Minimum eccentricity over all vertices.

    Trees use the double-sweep identity ``radius = ceil(diameter / 2)``;
    other graphs run a BFS from every vertex, abandoning a search once it
    exceeds the best eccentricity found so far.
    """
    if G.n == 0:
        raise InputError("radius of the empty graph is undefined")
    if G.n == 1:
        return 0
    d0 = bfs_distances(G, 0)
    if min(d0) < 0:
        raise InputError("graph is disconnected")
    if G.m == G.n - 1:
        a = max(range(G.n), key=d0.__getitem__)
        da = bfs_distances(G, a)
        return (max(da) + 1) // 2
    best = max(d0)
    order = sorted(range(G.n), key=lambda v: -G.degree(v))
    for v in order:
        e = _ecc_capped(G, v, best - 1)
        if e < best:
            best = e
    return best


def girth(G: Graph) -> float:
    """Length of a shortest cycle, ``math.inf`` for forests."""
    best = math.inf
    for s in range(G.n):
        dist = [-1] * G.n
        parent = [-1] * G.n
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in G.neighbors(u):
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best

"""Random and deterministic host graphs.

Every generator is a pure function of its parameters and seed. A
:class:`GenSpec` records both and is written into graph files so each
file says how it was made.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Iterator

import numpy as np

from .errors import GenerationError, InputError, SizeGuardError
from .expansion import DEFAULT_GUARD, _subsets, as_fraction, m_param
from .graph import Graph, complement
from .rng import as_rng, check_seed

KINDS = ("gnp", "regular", "sparse", "doubled", "complete")

# pairing-model rejection is used up to this degree, switchings above it
R_REJECT = 3
MAX_RESTARTS = 100


@dataclass(frozen=True)
class GenSpec:
    """Parameters of one generated graph.

    ``base`` (for ``doubled``) is a path to the graph file being doubled.
    """

    kind: str
    n: int
    seed: int | None = None
    p: float | None = None
    r: int | None = None
    k: int | None = None
    l: int | None = None  # noqa: E741
    base: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if self.kind != "complete" and self.kind != "doubled" and self.seed is None:
            raise InputError(f"{self.kind} needs a seed")
        if self.seed is not None:
            check_seed(self.seed)
        if self.p is not None and not 0 <= self.p <= 1:
            raise InputError(f"p must lie in [0, 1], got {self.p}")
        if self.kind in ("gnp", "sparse") and self.p is None:
            raise InputError(f"{self.kind} needs p")
        if self.kind == "regular" and self.r is None:
            raise InputError("regular needs r")
        if self.kind == "sparse" and (self.k is None or self.l is None):
            raise InputError("sparse needs k and l")

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict) -> "GenSpec":
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown GenSpec fields {sorted(unknown)}")
        return cls(**obj)

    def build(self, base: Graph | None = None) -> Graph:
        if self.kind == "gnp":
            return gen_gnp(self.n, self.p, self.seed)
        if self.kind == "regular":
            return gen_random_regular(self.n, self.r, self.seed)
        if self.kind == "sparse":
            return gen_locally_sparse(self.n, self.k, self.l, self.p, self.seed)
        if self.kind == "complete":
            return complete_graph(self.n)
        if base is None:
            raise InputError("doubled needs the base graph")
        return gen_doubled(base, self.seed)


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise InputError("n must be at least 1")
    return Graph.from_adjacency([[w for w in range(n) if w != v] for v in range(n)])


def empty_graph(n: int) -> Graph:
    return Graph(n)


def gen_gnp(n: int, p: float, seed) -> Graph:
    """Binomial random graph: pairs ``u < v`` in lexicographic order, one uniform draw each."""
    if not 0 <= p <= 1:
        raise InputError(f"p must lie in [0, 1], got {p}")
    rng = as_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return Graph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def _pairing(n: int, r: int, rng) -> list[tuple[int, int]]:
    points = np.repeat(np.arange(n), r)
    rng.shuffle(points)
    return list(zip(points[0::2].tolist(), points[1::2].tolist()))


def _key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def _repair(pairs: list[tuple[int, int]], rng, budget: int) -> bool:
    """Remove loops and repeated pairs by switchings; True once the pairing is simple.

    A switching replaces a bad pair ``ab`` and a random pair ``ce`` by
    ``ac, be`` or ``ae, bc``, and is accepted only if both new pairs are
    proper and not yet present.
    """
    count = Counter(_key(a, b) for a, b in pairs)

    def is_bad(t):
        a, b = pairs[t]
        return a == b or count[_key(a, b)] > 1

    bad = [t for t in range(len(pairs)) if is_bad(t)]
    for _ in range(budget):
        bad = [t for t in bad if is_bad(t)]
        if not bad:
            return True
        i = bad[int(rng.integers(len(bad)))]
        j = int(rng.integers(len(pairs)))
        if j == i:
            continue
        (a, b), (c, e) = pairs[i], pairs[j]
        if rng.random() < 0.5:
            new1, new2 = _key(a, c), _key(b, e)
        else:
            new1, new2 = _key(a, e), _key(b, c)
        if new1[0] == new1[1] or new2[0] == new2[1] or new1 == new2:
            continue
        if count[new1] or count[new2]:
            continue
        count[_key(a, b)] -= 1
        count[_key(c, e)] -= 1
        count[new1] += 1
        count[new2] += 1
        pairs[i], pairs[j] = new1, new2
    return not [t for t in bad if is_bad(t)]


def gen_random_regular(n: int, r: int, seed) -> Graph:
    """Simple ``r``-regular graph from the pairing model.

    Up to degree 3 whole pairings are rejected until simple; above that,
    loops and repeated pairs are removed by switchings (approximately
    uniform, not exactly). Degrees above ``(n - 1) / 2`` are generated as
    the complement of an ``(n - 1 - r)``-regular graph.
    """
    if r < 0 or r >= n or (r * n) % 2:
        raise InputError(f"no simple {r}-regular graph on {n} vertices")
    rng = as_rng(seed)
    if 2 * r > n - 1:
        return complement(gen_random_regular(n, n - 1 - r, rng))
    if r == 0:
        return Graph(n)
    for _ in range(MAX_RESTARTS):
        pairs = _pairing(n, r, rng)
        if r <= R_REJECT:
            keys = [_key(a, b) for a, b in pairs]
            if all(a != b for a, b in keys) and len(set(keys)) == len(keys):
                return Graph(n, keys)
            continue
        if _repair(pairs, rng, budget=50 * n * r):
            return Graph(n, pairs)
    raise GenerationError(f"random {r}-regular graph on {n} vertices failed after {MAX_RESTARTS} restarts")


def _dense_sets(adj: list[set[int]], order: list[int], k: int, budget: int) -> Iterator[list[int]]:
    """``k``-sets (scanning in ``order``) missing at most ``budget`` edges.

    Missing-edge counts only grow as vertices are added, so partial sets
    over budget are pruned. ``adj`` may shrink while the generator runs;
    stale counts only weaken the pruning and each candidate is recounted.
    """
    n = len(order)

    def rec(start: int, chosen: list[int], missing: int):
        if len(chosen) == k:
            yield chosen
            return
        for i in range(start, n - (k - len(chosen)) + 1):
            v = order[i]
            extra = sum(1 for u in chosen if u not in adj[v])
            if missing + extra <= budget:
                chosen.append(v)
                yield from rec(i + 1, chosen, missing + extra)
                chosen.pop()

    yield from rec(0, [], 0)


def _edges_inside(adj: list[set[int]], vs: list[int]) -> int:
    return sum(1 for i, u in enumerate(vs) for w in vs[i + 1 :] if w in adj[u])


def check_locally_sparse(G: Graph, k: int, l: int, *, guard: int = DEFAULT_GUARD) -> bool:  # noqa: E741
    """True iff every induced ``k``-vertex subgraph has at most ``l`` edges."""
    if k < 1:
        raise InputError("k must be positive")
    if k > G.n or l >= math.comb(k, 2):
        return True
    count = math.comb(G.n, k)
    if count > guard:
        raise SizeGuardError("locally sparse check", count, guard)
    adj = [set(G.adj(v)) for v in range(G.n)]
    budget = math.comb(k, 2) - (l + 1)
    for _ in _dense_sets(adj, list(range(G.n)), k, budget):
        return False
    return True


def gen_locally_sparse(n: int, k: int, l: int, p: float, seed) -> Graph:  # noqa: E741
    """``G(n, p)`` with every ``k``-set spanning at least ``l`` edges stripped of its edges.

    ``k``-sets are scanned in a seeded random vertex order; each one found
    with ``>= l`` edges loses all its edges, so the removed sets are edge
    disjoint. Passes repeat until a full pass finds nothing, hence the
    result has at most ``l - 1`` edges in every ``k``-set.
    """
    if l < 2 or k < 2 or k > n:
        raise InputError(f"need l >= 2 and 2 <= k <= n, got k={k}, l={l}, n={n}")
    rng = as_rng(seed)
    G = gen_gnp(n, p, rng)
    order = rng.permutation(n).tolist()
    adj = [set(G.adj(v)) for v in range(n)]
    budget = math.comb(k, 2) - l
    if budget < 0:
        return G
    changed = True
    while changed:
        changed = False
        for vs in _dense_sets(adj, order, k, budget):
            if _edges_inside(adj, vs) >= l:
                for i, u in enumerate(vs):
                    for w in vs[i + 1 :]:
                        adj[u].discard(w)
                        adj[w].discard(u)
                changed = True
    return Graph.from_adjacency(adj)


def gen_doubled(H: Graph, seed) -> Graph:
    """Two copies ``2v``, ``2v + 1`` per vertex; each edge becomes a parallel or crossed pair."""
    rng = as_rng(seed)
    edges = H.edges()
    coins = rng.random(len(edges)) < 0.5
    out = []
    for (v, w), parallel in zip(edges, coins.tolist()):
        if parallel:
            out += [(2 * v, 2 * w), (2 * v + 1, 2 * w + 1)]
        else:
            out += [(2 * v, 2 * w + 1), (2 * v + 1, 2 * w)]
    return Graph(2 * H.n, out)


def sparse_density_threshold(n: int, d, x: int, y: int) -> float:
    """``48 d |X||Y| log n / n`` (natural log)."""
    return 48 * float(as_fraction(d)) * x * y * math.log(n) / n


def _test_set_sizes(n: int, d) -> list[tuple[int, int]]:
    q = as_fraction(d)
    m = m_param(n, q)
    out = []
    for x in range(1, m):
        y = n - math.ceil((q + 1) * x) + 1
        if y >= 1:
            out.append((x, y))
    if m <= n:
        out.append((m, m))
    return out


def sparse_density_check(H: Graph, d, *, guard: int = DEFAULT_GUARD) -> tuple[bool, float]:
    """Exact check of ``e(X, Y) >= 48 d |X||Y| log n / n`` over the lemma's set sizes.

    ``X`` ranges over all sets of the listed sizes; for a given ``X`` the
    worst ``Y`` of size ``t`` (possibly meeting ``X``) takes the ``t``
    vertices with fewest neighbours in ``X``. Returns whether the bound
    holds everywhere and the smallest ratio ``e(X, Y) / threshold`` seen.
    """
    n = H.n
    sizes = _test_set_sizes(n, d)
    count = sum(math.comb(n, x) for x, _ in sizes)
    if count > guard:
        raise SizeGuardError("density check", count, guard)
    masks = H.masks()
    worst = math.inf
    for x, y in sizes:
        need = sparse_density_threshold(n, d, x, y)
        for xm, _ in _subsets(masks, x):
            into = sorted((masks[v] & xm).bit_count() for v in range(n))
            worst = min(worst, sum(into[:y]) / need)
    return worst >= 1, worst


def _log_comb(a: int, b: int) -> float:
    if b < 0 or b > a:
        return -math.inf
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def gnp_union_bound(n: int, p: float, d) -> float:
    """Union bound on ``P[G(n, p) is not an (n, d)-expander]``.

    Sums ``(1 - p)^{|X||Y|}`` over disjoint pairs with ``1 <= |X| < m``,
    ``|Y| = n - ceil((d + 1)|X|) + 1``, and over unordered pairs of
    disjoint ``m``-sets. A value below 1 certifies that most draws expand.
    """
    q = as_fraction(d)
    if p <= 0:
        return math.inf
    if p >= 1:
        return 0.0
    lq = math.log1p(-p)
    total = 0.0
    m = m_param(n, q)
    for x in range(1, m):
        y = n - math.ceil((q + 1) * x) + 1
        if y < 1:
            # then d|X| > n - |X|, which no graph can meet
            return math.inf
        total += math.exp(_log_comb(n, x) + _log_comb(n - x, y) + x * y * lq)
    if 2 * m <= n:
        total += 0.5 * math.exp(_log_comb(n, m) + _log_comb(n - m, m) + m * m * lq)
    return total

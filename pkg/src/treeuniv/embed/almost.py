"""Tree and forest embedding by greedy extension with backtracking.

Pattern vertices are placed in BFS order, each next to its parent's image.
Among the admissible host vertices the one with the most unused
neighbours goes first (it leaves the most room for the subtree below), and
candidates with fewer unused neighbours than the vertex has children are
skipped outright. Dead ends trigger chronological backtracking; a run that
exceeds its backtrack budget restarts with fresh random tie-breaking.
"""

from __future__ import annotations

from typing import Iterable

from ..errors import InputError, SearchFailed
from ..graph import Embedding, Graph, validate_embedding
from ..rng import as_rng
from .hamilton import EmbedBudget

EXACT_LIMIT = 9
ROOT_CHOICES = 8


def _forest_order(T: Graph, part: set[int]) -> tuple[list[int], dict[int, int | None], dict[int, int]]:
    parent: dict[int, int | None] = {}
    order: list[int] = []
    for root in sorted(part, key=lambda v: (-sum(1 for w in T.neighbors(v) if w in part), v)):
        if root in parent:
            continue
        parent[root] = None
        start = len(order)
        order.append(root)
        i = start
        while i < len(order):
            u = order[i]
            i += 1
            for w in T.neighbors(u):
                if w in part and w not in parent:
                    parent[w] = u
                    order.append(w)
    children = {v: 0 for v in part}
    for v, p in parent.items():
        if p is not None:
            children[p] += 1
    return order, parent, children


def _search(G, order, parent, children, allowed, rng, max_backtracks, exact, fixed=None):
    """Backtracking search; returns (mapping or None, finished_exhaustively)."""
    img: dict[int, int] = {}
    used: set[int] = set()
    fixed = fixed or {}
    masks = G.masks()
    room = sum(1 << w for w in allowed)  # allowed and still unused

    def candidates(v):
        p = parent[v]
        if v in fixed:
            w = fixed[v]
            ok = w not in used and (p is None or G.has_edge(img[p], w))
            return [w] if ok else []
        pool = room if p is None else masks[img[p]] & room
        scored = []
        need = children[v]
        while pool:
            low = pool & -pool
            pool ^= low
            w = low.bit_length() - 1
            f = (masks[w] & room).bit_count()
            if f < need:
                continue
            noise = 0.0 if exact else rng.random()
            scored.append((-f - noise, w))
        scored.sort()
        out = [w for _, w in scored]
        if p is None and not exact:
            out = out[:ROOT_CHOICES]
        return out

    stack: list[list[int]] = []
    backtracks = 0
    i = 0
    while i < len(order):
        v = order[i]
        if len(stack) <= i:
            stack.append(candidates(v))
        cands = stack[i]
        if cands:
            w = cands.pop(0)
            img[v] = w
            used.add(w)
            room &= ~(1 << w)
            i += 1
            continue
        # dead end: undo the previous placement
        stack.pop()
        if i == 0:
            return None, True
        backtracks += 1
        if not exact and backtracks > max_backtracks:
            return None, False
        i -= 1
        prev = order[i]
        w = img.pop(prev)
        used.discard(w)
        room |= 1 << w
    return img, True


def embed_forest(
    G: Graph,
    T: Graph,
    part: Iterable[int],
    allowed: Iterable[int],
    budget: EmbedBudget,
    *,
    rng=None,
    fixed: dict[int, int] | None = None,
    exact: bool | None = None,
) -> dict[int, int]:
    """Embed the forest ``T[part]`` into ``G[allowed]``.

    ``fixed`` pins some pattern vertices (typically roots) to given host
    vertices. ``exact=None`` picks exhaustive search for patterns of at
    most ``EXACT_LIMIT`` vertices.
    """
    part = set(part)
    allowed = set(allowed)
    if len(part) > len(allowed):
        raise SearchFailed(f"{len(part)} pattern vertices do not fit into {len(allowed)} host vertices", conclusive=True)
    if not part:
        return {}
    order, parent, children = _forest_order(T, part)
    if exact is None:
        exact = len(part) <= EXACT_LIMIT
    if exact:
        img, _ = _search(G, order, parent, children, allowed, None, 0, True, fixed)
        if img is None:
            raise SearchFailed("exhaustive search: no embedding exists", conclusive=True)
        return img
    rng = rng if rng is not None else as_rng(budget.seed)
    for _ in range(budget.max_restarts + 1):
        img, _ = _search(G, order, parent, children, allowed, rng, budget.max_backtracks, False, fixed)
        if img is not None:
            return img
    raise SearchFailed(
        f"greedy embedding gave up after {budget.max_restarts + 1} runs of {budget.max_backtracks} backtracks"
    )


def embed_almost_spanning_tree(G: Graph, T: Graph, d, budget: EmbedBudget | None = None) -> Embedding:
    """Embed the tree ``T`` into ``G``; trees of at most 9 vertices are searched exhaustively."""
    budget = budget or EmbedBudget()
    if T.max_degree() > d:
        raise InputError(f"tree maximum degree {T.max_degree()} exceeds d = {d}")
    if T.n > G.n:
        raise InputError(f"tree has {T.n} vertices, host only {G.n}")
    img = embed_forest(G, T, range(T.n), range(G.n), budget)
    phi = Embedding(tuple(img[v] for v in range(T.n)))
    assert validate_embedding(phi, T, G)
    return phi

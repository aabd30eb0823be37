"""Hamilton paths between prescribed endpoints.

Small vertex sets (at most ``EXACT_LIMIT`` vertices) are decided exactly by
a subset dynamic programme, so failure there is conclusive. Larger sets
use rotation-extension: the path grows from ``s``; when its free end is
stuck, a rotation at a path neighbour ``y`` reverses the tail after ``y``
and exposes a new end. The start ``s`` never moves and ``t`` is only
appended last. A run restarts once ``2n`` rotations pass without growth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..errors import InputError, SearchFailed
from ..graph import Graph
from ..rng import as_rng

EXACT_LIMIT = 10


@dataclass(frozen=True)
class EmbedBudget:
    max_backtracks: int = 20000
    max_restarts: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.max_backtracks < 0 or self.max_restarts < 0:
            raise InputError("budget counts must be non-negative")


def check_path(G: Graph, path, s: int, t: int, within: Iterable[int] | None = None) -> bool:
    vs = set(range(G.n)) if within is None else set(within)
    return (
        len(path) == len(vs)
        and set(path) == vs
        and path[0] == s
        and path[-1] == t
        and all(G.has_edge(a, b) for a, b in zip(path, path[1:]))
    )


def _exact(G: Graph, s: int, t: int, verts: list[int]) -> list[int] | None:
    index = {v: i for i, v in enumerate(verts)}
    k = len(verts)
    nb = [[index[w] for w in G.neighbors(v) if w in index] for v in verts]
    si, ti = index[s], index[t]
    full = (1 << k) - 1
    # reach[mask] = bitmask of end vertices of s-paths covering exactly mask
    reach = [0] * (1 << k)
    reach[1 << si] = 1 << si
    for mask in range(1 << k):
        ends = reach[mask]
        if not ends or not mask >> si & 1:
            continue
        e = ends
        while e:
            low = e & -e
            v = low.bit_length() - 1
            e ^= low
            for w in nb[v]:
                if not mask >> w & 1:
                    if w == ti and mask | (1 << w) != full:
                        continue
                    reach[mask | (1 << w)] |= 1 << w
    if not reach[full] >> ti & 1:
        return None
    path = [ti]
    mask, cur = full, ti
    while cur != si:
        prev_mask = mask ^ (1 << cur)
        cur = next(v for v in nb[cur] if reach[prev_mask] >> v & 1)
        mask = prev_mask
        path.append(cur)
    return [verts[i] for i in reversed(path)]


def _rotation_extension(G: Graph, s: int, t: int, vs: set[int], rng, budget: EmbedBudget) -> list[int] | None:
    n = len(vs)
    nbrs = {v: [w for w in G.neighbors(v) if w in vs] for v in vs}
    for _ in range(budget.max_restarts + 1):
        path = [s]
        pos = {s: 0}
        stall = 0
        total = 0
        while total < 50 * n * n:
            total += 1
            end = path[-1]
            if len(path) == n - 1:
                if t in nbrs[end]:
                    path.append(t)
                    return path
                free = []
            else:
                free = [w for w in nbrs[end] if w not in pos and w != t]
            if free:
                # extend towards the neighbour with fewest free neighbours of its own
                scores = [sum(1 for x in nbrs[w] if x not in pos) + rng.random() for w in free]
                w = free[min(range(len(free)), key=scores.__getitem__)]
                pos[w] = len(path)
                path.append(w)
                stall = 0
                continue
            stall += 1
            if stall > 2 * n:
                break
            pivots = [pos[y] for y in nbrs[end] if y in pos and pos[y] < len(path) - 2]
            if not pivots:
                break
            # prefer rotations whose new end can grow (or close onto t at the end)
            good = []
            for i in pivots:
                new_end = path[i + 1]
                if len(path) == n - 1:
                    if t in nbrs[new_end]:
                        good.append(i)
                elif any(x not in pos and x != t for x in nbrs[new_end]):
                    good.append(i)
            choice = good or pivots
            i = choice[int(rng.integers(len(choice)))]
            tail = path[i + 1 :]
            tail.reverse()
            path[i + 1 :] = tail
            for j in range(i + 1, len(path)):
                pos[path[j]] = j
    return None


def hamilton_path(
    G: Graph,
    s: int,
    t: int,
    budget: EmbedBudget | None = None,
    *,
    within: Iterable[int] | None = None,
) -> list[int]:
    """A Hamilton path of ``G[within]`` (default: all of ``G``) from ``s`` to ``t``.

    Raises :class:`SearchFailed`; ``conclusive`` is set when the exact
    search ran.
    """
    if s == t:
        raise InputError("endpoints must differ")
    budget = budget or EmbedBudget()
    vs = set(range(G.n)) if within is None else set(within)
    if s not in vs or t not in vs:
        raise InputError("endpoints must lie in the vertex set")
    if any(not 0 <= v < G.n for v in vs):
        raise InputError("vertex outside the graph")
    if len(vs) <= EXACT_LIMIT:
        path = _exact(G, s, t, sorted(vs))
        if path is None:
            raise SearchFailed(f"no Hamilton path from {s} to {t}", conclusive=True, witness=[s, t])
        return path
    path = _rotation_extension(G, s, t, vs, as_rng(budget.seed), budget)
    if path is None:
        raise SearchFailed(
            f"rotation-extension found no Hamilton path from {s} to {t} within budget", witness=[s, t]
        )
    assert check_path(G, path, s, t, vs)
    return path

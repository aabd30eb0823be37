"""Star matchings: split a target set among centres with prescribed demands.

The problem is a bipartite flow (source -> centre ``u`` with capacity
``k(u)``, centre -> adjacent target, target -> sink with capacity 1),
solved here by augmenting paths over the residual graph. When the
maximum flow falls short, the centres reachable from the source in the
residual graph form a set ``X`` with ``|N(X) & W| < k(X)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping

from ..errors import HallViolation, InputError
from ..graph import Graph


@dataclass(frozen=True)
class StarDemand:
    centers: tuple[int, ...]
    targets: tuple[int, ...]
    demand: Mapping[int, int]

    @classmethod
    def build(cls, centers, targets, demand) -> "StarDemand":
        centers = tuple(sorted(set(centers)))
        if not isinstance(demand, Mapping):
            demand = dict(zip(centers, demand))
        return cls(centers, tuple(sorted(set(targets))), dict(demand))

    def validate(self, G: Graph | None = None) -> None:
        cs, ts = set(self.centers), set(self.targets)
        if len(cs) != len(self.centers) or len(ts) != len(self.targets):
            raise InputError("centres and targets must not repeat")
        if cs & ts:
            raise InputError(f"centres and targets overlap in {sorted(cs & ts)}")
        if set(self.demand) - cs:
            raise InputError("demand given for a vertex that is not a centre")
        if any(self.demand.get(u, 0) < 0 for u in cs):
            raise InputError("demands must be non-negative")
        total = sum(self.demand.get(u, 0) for u in cs)
        if total != len(ts):
            raise InputError(f"total demand {total} differs from |W| = {len(ts)}")
        if G is not None and any(not 0 <= v < G.n for v in cs | ts):
            raise InputError("vertex outside the host graph")


def star_matching(G: Graph, demand: StarDemand) -> dict[int, tuple[int, ...]]:
    """Disjoint ``W_u`` of size ``k(u)`` inside ``N(u) & W`` covering ``W``.

    Raises :class:`HallViolation` carrying the violating centre set when no
    such partition exists.
    """
    demand.validate(G)
    targets = set(demand.targets)
    k = {u: demand.demand.get(u, 0) for u in demand.centers}
    nbrs = {u: [w for w in G.neighbors(u) if w in targets] for u in demand.centers}
    owner: dict[int, int] = {}
    load = dict.fromkeys(demand.centers, 0)

    def augment(start: int) -> set[int] | None:
        # BFS over alternating paths; returns None on success, else the centres reached
        parent: dict[int, tuple[int, int] | None] = {start: None}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in nbrs[u]:
                holder = owner.get(w)
                if holder is None:
                    # flip the alternating path ending at the free target w
                    cu, cw = u, w
                    while True:
                        owner[cw] = cu
                        step = parent[cu]
                        if step is None:
                            break
                        cu, cw = step
                    load[start] += 1
                    return None
                if holder not in parent:
                    parent[holder] = (u, w)
                    queue.append(holder)
        return set(parent)

    for u in demand.centers:
        while load[u] < k[u]:
            reached = augment(u)
            if reached is not None:
                # every target adjacent to ``reached`` is owned by ``reached``, and
                # the centres there are saturated apart from ``u``
                hood = {w for x in reached for w in nbrs[x]}
                need = sum(k[x] for x in reached)
                raise HallViolation(frozenset(reached), len(hood), need)

    out: dict[int, list[int]] = {u: [] for u in demand.centers}
    for w, u in owner.items():
        out[u].append(w)
    result = {u: tuple(sorted(ws)) for u, ws in out.items()}
    _check(G, demand, result)
    return result


def _check(G: Graph, demand: StarDemand, result) -> None:
    seen: set[int] = set()
    for u, ws in result.items():
        assert len(ws) == demand.demand.get(u, 0)
        for w in ws:
            assert G.has_edge(u, w) and w not in seen
            seen.add(w)
    assert seen == set(demand.targets)


def hall_violated(G: Graph, demand: StarDemand, X) -> bool:
    """True iff ``|N(X) & W| < k(X)``."""
    targets = set(demand.targets)
    hood = {w for x in X for w in G.neighbors(x) if w in targets}
    return len(hood) < sum(demand.demand.get(x, 0) for x in X)

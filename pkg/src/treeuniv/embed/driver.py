"""Spanning-tree embedding by the three-case strategy.

* Case 1 (long bare path ``P``): embed the forest ``T - P`` into a random
  part ``U_F``, then route ``P`` as a Hamilton path through every vertex
  left over, with its ends next to the images of ``P``'s neighbours.
* Case 2 (many leaves, long second-level bare path): embed the forest
  ``T - L - P``, reserve a leaf set ``W_L`` avoiding vertices with fewer
  than ``m`` portal neighbours, route ``P`` through the rest, then hang the
  leaves by a star matching.
* Case 3 (many leaves and second-level leaves): embed ``T - L - M``, pick
  ``W_M`` avoiding the exceptional vertices, then two star matchings
  (``K -> M`` and ``M -> L``).

Part sizes carry slacks of ``4 delta m`` and ``delta m`` vertices. When
those do not fit the tree at hand they are shrunk, and the report says so.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

from ..errors import InputError, NoCaseError, PartitionError, SearchFailed
from ..expansion import as_fraction, m_param, partition_vertices
from ..graph import Embedding, Graph, components, induced_subgraph, validate_embedding
from ..rng import as_rng, split_seeds
from ..trees import Case, classify_case, decompose, default_thresholds
from .almost import EXACT_LIMIT, embed_forest
from .hamilton import EmbedBudget, hamilton_path
from .starmatch import StarDemand, star_matching

ANCHOR_TRIES = 6


@dataclass(frozen=True)
class CaseThresholds:
    """Overrides for the case thresholds and part slacks (``None`` keeps the default)."""

    tau_path: int | None = None
    tau_leaves: int | None = None
    slack_forest: int | None = None
    slack_reserve: int | None = None


@dataclass
class EmbedReport:
    success: bool
    embedding: Embedding | None
    case: str | None
    thresholds: dict
    slacks: dict = field(default_factory=dict)
    stages: list[dict] = field(default_factory=list)
    failure_stage: str | None = None
    failure_witness: Any = None
    fallback_used: str | None = None
    forest_components: int | None = None
    attempts: int = 0

    def to_json(self) -> dict:
        out = asdict(self)
        out["embedding"] = None if self.embedding is None else list(self.embedding.map)
        return out


class _StageFailure(Exception):
    def __init__(self, stage: str, message: str, witness=None):
        super().__init__(message)
        self.stage = stage
        self.witness = witness


def _ceil(x: Fraction) -> int:
    return math.ceil(x)


class _Run:
    """One attempt of a case pipeline with its own random stream."""

    def __init__(self, G, T, dec, d, delta, m, tau_path, tau_leaves, slacks, budget, seed, partition_retries):
        self.G, self.T, self.dec = G, T, dec
        self.d, self.delta, self.m = d, delta, m
        self.tau_path, self.tau_leaves = tau_path, tau_leaves
        self.slacks = slacks
        self.budget = budget
        self.seed = seed
        self.rng = as_rng(seed)
        self.partition_retries = partition_retries
        self.stages: list[dict] = []
        self.img: dict[int, int] = {}
        self.forest_components: int | None = None

    def log(self, name, ok=True, **info):
        self.stages.append(dict(stage=name, ok=ok, **info))

    def partition(self, sizes):
        try:
            part = partition_vertices(self.G, self.d, sizes, self.rng, self.partition_retries)
        except PartitionError as err:
            part = err.partition
            self.log("partition", ok=True, sizes=sizes, verified=False, witness=err.witness)
            return part.parts
        self.log("partition", sizes=sizes, verified=True, attempts=part.attempts, mode=part.mode)
        return part.parts

    def embed_forest(self, forest, allowed):
        self.forest_components = len(components(_induced_pattern(self.T, forest)))
        try:
            img = embed_forest(self.G, self.T, forest, allowed, self.budget, rng=self.rng)
        except SearchFailed as err:
            raise _StageFailure("forest", str(err), sorted(forest)) from err
        self.img.update(img)
        self.log("forest", vertices=len(forest), components=self.forest_components, image=sorted(img.values()))
        return img

    def route_path(self, P, s_F, t_F, preferred, W_P):
        """Map the path ``P`` onto a Hamilton path of ``G[W_P]`` hooked to ``s_F``, ``t_F``."""
        G = self.G
        a, b = self.img[s_F], self.img[t_F]
        W = set(W_P)
        if len(P) != len(W):
            raise _StageFailure("path", f"path has {len(P)} vertices but {len(W)} remain", sorted(W))
        if len(P) == 1:
            (v,) = W
            if G.has_edge(v, a) and G.has_edge(v, b):
                self.img[P[0]] = v
                self.log("path", anchors=[v, v], route=[v])
                return
            raise _StageFailure("anchors", "the last free vertex is not adjacent to both path neighbours", [a, b, v])

        def ranked(x):
            cand = [v for v in G.neighbors(x) if v in W]
            return sorted(cand, key=lambda v: (v not in preferred, v))

        cs, ct = ranked(a), ranked(b)
        pairs = sorted(
            ((i, j) for i in range(len(cs)) for j in range(len(ct)) if cs[i] != ct[j]),
            key=lambda ij: (ij[0] + ij[1], ij[0]),
        )
        if not pairs:
            raise _StageFailure("anchors", "no distinct anchor pair next to the forest ends", [a, b])
        last = None
        for i, j in pairs[:ANCHOR_TRIES]:
            v, w = cs[i], ct[j]
            sub = EmbedBudget(self.budget.max_backtracks, self.budget.max_restarts, int(self.rng.integers(2**62)))
            try:
                route = hamilton_path(G, v, w, sub, within=W)
            except SearchFailed as err:
                last = err
                continue
            for x, y in zip(P, route):
                self.img[x] = y
            self.log("path", anchors=[v, w], route=route)
            return
        raise _StageFailure("hamilton", str(last), [cs[pairs[0][0]], ct[pairs[0][1]]])

    def hang(self, stage, centers_of, targets):
        """Star-match the pattern vertices in ``centers_of`` (centre -> children) onto ``targets``."""
        demand = {self.img[c]: len(ch) for c, ch in centers_of.items() if ch}
        centre_images = sorted(demand)
        dem = StarDemand.build(centre_images, targets, demand)
        try:
            parts = star_matching(self.G, dem)
        except SearchFailed as err:
            raise _StageFailure(stage, str(err), err.witness) from err
        back = {self.img[c]: c for c in centers_of}
        for u, ws in parts.items():
            for child, w in zip(sorted(centers_of[back[u]]), ws):
                self.img[child] = w
        self.log(stage, centres=len(demand), targets=len(targets))

    def pick_avoiding(self, pool, portals, size, stage):
        """``size`` vertices of ``pool`` with at least ``m`` portal neighbours if possible."""
        G, m = self.G, self.m
        portals = set(portals)
        hits = {u: len(G.adj(u) & portals) for u in pool}
        Z = sorted(u for u in pool if hits[u] < m)
        good = [u for u in pool if hits[u] >= m]
        order = sorted(good, key=lambda u: (-hits[u], u))
        chosen = order[:size]
        forced = max(0, size - len(chosen))
        if forced:
            chosen += sorted(Z, key=lambda u: (-hits[u], u))[:forced]
        low = sorted(u for u in chosen if hits[u] < m)
        self.log(
            stage,
            exceptional=Z,
            portals=len(portals),
            lemma_size_hypothesis=len(portals) >= m * m,
            forced=forced,
            low_portal_vertices=low,
        )
        return chosen

    def case1(self):
        T, dec = self.T, self.dec
        P = list(dec.longest_bare_path[: self.tau_path])
        Pset = set(P)
        s_F, t_F = _path_ends(T, P, Pset)
        forest = set(range(T.n)) - Pset
        sF = _clamp(self.slacks["forest"], len(P) - (1 if len(P) == 1 else 2))
        self.slacks["used_forest"] = sF
        U_F, U_P = self.partition([len(forest) + sF, len(P) - sF])
        imgF = self.embed_forest(forest, U_F)
        W_P = set(range(self.G.n)) - set(imgF.values())
        self.route_path(P, s_F, t_F, set(U_P), W_P)

    def case2(self):
        T, dec, G = self.T, self.dec, self.G
        Q = dec.longest_second_level_bare_path
        h = max(1, self.tau_path // 2)
        K = dec.leaf_neighbors
        A, B = list(Q[:h]), list(Q[h : 2 * h])
        P = A if not B or len(K & set(A)) <= len(K & set(B)) else B
        Pset = set(P)
        L = dec.leaves
        s_F, t_F = _path_ends(T, P, Pset, exclude=L)
        forest = set(range(T.n)) - L - Pset
        K_F = K & forest
        sF, sL = _shrink_pair(self.slacks["forest"], self.slacks["reserve"], len(P) - (1 if len(P) == 1 else 2))
        self.slacks.update(used_forest=sF, used_reserve=sL)
        U_F, U_P, U_L = self.partition([len(forest) + sF, len(P) - sF - sL, len(L) + sL])
        self.embed_forest(forest, U_F)
        portals = [self.img[k] for k in K_F]
        W_L = self.pick_avoiding(sorted(U_L), portals, len(L), "reserve_leaves")
        W_P = set(range(G.n)) - set(self.img.values()) - set(W_L)
        self.route_path(P, s_F, t_F, set(U_P), W_P)
        leaves_of = {k: [x for x in T.neighbors(k) if x in L] for k in K}
        self.hang("leaves", leaves_of, W_L)

    def case3(self):
        T, dec, G = self.T, self.dec, self.G
        Lall = dec.leaves
        up = {v: next(w for w in T.neighbors(v) if w not in Lall) for v in dec.second_level_leaves}
        M: list[int] = []
        Kset: set[int] = set()
        for v in sorted(dec.second_level_leaves):
            if len(M) == self.tau_leaves:
                break
            if v in Kset or up[v] in M:
                continue
            M.append(v)
            Kset.add(up[v])
        if len(M) < self.tau_leaves:
            raise _StageFailure("select", f"only {len(M)} compatible second-level leaves", sorted(M))
        Mset = set(M)
        L = {x for v in M for x in T.neighbors(v) if x in Lall}
        forest = set(range(T.n)) - L - Mset
        sF, sM = _shrink_pair(self.slacks["forest"], self.slacks["reserve"], len(L))
        self.slacks.update(used_forest=sF, used_reserve=sM)
        U_F, U_M, U_L = self.partition([len(forest) + sF, len(M) + sM, len(L) - sF - sM])
        self.embed_forest(forest, U_F)
        portals = [self.img[k] for k in Kset]
        W_M = self.pick_avoiding(sorted(U_M), portals, len(M), "reserve_second_leaves")
        W_L = sorted(set(range(G.n)) - set(self.img.values()) - set(W_M))
        m_of = {k: [v for v in M if up[v] == k] for k in Kset}
        self.hang("second_leaves", m_of, W_M)
        l_of = {v: [x for x in T.neighbors(v) if x in L] for v in M}
        self.hang("leaves", l_of, W_L)


def _induced_pattern(T: Graph, part) -> Graph:
    return induced_subgraph(T, part)[0]


def _path_ends(T: Graph, P, Pset, exclude=frozenset()):
    outside0 = [w for w in T.neighbors(P[0]) if w not in Pset and w not in exclude]
    outside1 = [w for w in T.neighbors(P[-1]) if w not in Pset and w not in exclude]
    if len(P) == 1:
        return outside0[0], outside0[1]
    return outside0[0], outside1[0]


def _clamp(value: int, top: int) -> int:
    return max(0, min(value, top))


def _shrink_pair(a: int, b: int, room: int) -> tuple[int, int]:
    """Shrink ``a`` then ``b`` until ``a + b <= room``."""
    room = max(room, 0)
    while a + b > room:
        if a >= b and a > 0:
            a -= 1
        else:
            b -= 1
    return a, b


def _fallback(G: Graph, T: Graph, budget: EmbedBudget, seed) -> tuple[dict | None, str, Any]:
    if T.n <= EXACT_LIMIT:
        mode = "exact"
        try:
            return embed_forest(G, T, range(T.n), range(G.n), budget, exact=True), mode, None
        except SearchFailed as err:
            return None, mode, str(err)
    mode = "greedy"
    try:
        img = embed_forest(G, T, range(T.n), range(G.n), budget, rng=as_rng(seed), exact=False)
        return img, mode, None
    except SearchFailed as err:
        return None, mode, str(err)


def embed_spanning_tree(
    G: Graph,
    T: Graph,
    delta,
    d,
    thresholds: CaseThresholds | tuple | None = None,
    budget: EmbedBudget | None = None,
    *,
    fallback: bool = True,
    partition_retries: int = 20,
) -> EmbedReport:
    """Embed a spanning tree ``T`` of maximum degree ``<= delta`` into ``G``.

    Failed stages are retried with fresh randomness ``budget.max_restarts``
    times. If every attempt fails (or no case applies) and ``fallback`` is
    set, a direct search runs: exhaustive for at most 9 vertices, greedy
    with backtracking otherwise. Without ``fallback`` an inapplicable case
    raises :class:`NoCaseError`.
    """
    if T.n != G.n:
        raise InputError(f"tree has {T.n} vertices, host has {G.n}")
    if T.max_degree() > delta:
        raise InputError(f"tree maximum degree {T.max_degree()} exceeds delta = {delta}")
    budget = budget or EmbedBudget()
    if isinstance(thresholds, tuple):
        thresholds = CaseThresholds(*thresholds)
    thresholds = thresholds or CaseThresholds()
    n = G.n
    q = as_fraction(d)
    dl = as_fraction(delta)
    m = m_param(n, q)
    dp, dlv = default_thresholds(delta, m)
    tau_path = dp if thresholds.tau_path is None else thresholds.tau_path
    tau_leaves = dlv if thresholds.tau_leaves is None else thresholds.tau_leaves
    want_forest = _ceil(4 * dl * m) if thresholds.slack_forest is None else thresholds.slack_forest
    want_reserve = _ceil(dl * m) if thresholds.slack_reserve is None else thresholds.slack_reserve
    thr = {
        "tau_path": tau_path,
        "tau_leaves": tau_leaves,
        "default_tau_path": dp,
        "default_tau_leaves": dlv,
        "path_multiplier": tau_path / dp,
        "leaves_multiplier": tau_leaves / dlv,
        "m": m,
    }
    report = EmbedReport(False, None, None, thr, slacks={"forest": want_forest, "reserve": want_reserve})

    if n == 1:
        report.success, report.embedding = True, Embedding((0,))
        return report

    dec = decompose(T)
    try:
        case = classify_case(T, delta, m, tau_path, tau_leaves, decomposition=dec)
    except NoCaseError as err:
        if not fallback:
            raise
        report.stages.append({"stage": "classify", "ok": False, "stats": err.stats})
        report.failure_stage, report.failure_witness = "classify", err.stats
        case = None
    if case is not None:
        report.case = case.value
        seeds = split_seeds(budget.seed, budget.max_restarts + 1)
        for attempt, seed in enumerate(seeds, start=1):
            slacks = {"forest": want_forest, "reserve": want_reserve}
            run = _Run(G, T, dec, q, dl, m, tau_path, tau_leaves, slacks, budget, seed, partition_retries)
            report.attempts = attempt
            try:
                {Case.CASE1: run.case1, Case.CASE2: run.case2, Case.CASE3: run.case3}[case]()
            except _StageFailure as err:
                run.log(err.stage, ok=False, error=str(err), witness=err.witness)
                report.stages = run.stages
                report.failure_stage, report.failure_witness = err.stage, err.witness
                report.slacks = dict(slacks, requested_forest=want_forest, requested_reserve=want_reserve)
                report.forest_components = run.forest_components
                continue
            phi = Embedding(tuple(run.img[v] for v in range(n)))
            if not validate_embedding(phi, T, G):
                report.failure_stage, report.failure_witness = "validate", list(phi.map)
                continue
            report.success, report.embedding = True, phi
            report.stages = run.stages
            report.slacks = dict(slacks, requested_forest=want_forest, requested_reserve=want_reserve)
            report.forest_components = run.forest_components
            report.failure_stage = report.failure_witness = None
            return report
    if fallback:
        img, mode, why = _fallback(G, T, budget, budget.seed)
        report.fallback_used = mode
        if img is not None:
            phi = Embedding(tuple(img[v] for v in range(n)))
            if validate_embedding(phi, T, G):
                report.success, report.embedding = True, phi
                report.stages.append({"stage": "fallback", "ok": True, "mode": mode})
                report.failure_stage = report.failure_witness = None
                return report
        report.stages.append({"stage": "fallback", "ok": False, "mode": mode, "error": why})
        report.failure_stage, report.failure_witness = "fallback", why
    return report

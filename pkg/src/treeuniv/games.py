"""Biased Maker-Breaker games and the expander game played in reverse.

In an ``(a:b)`` game Maker claims ``a`` and Breaker ``b`` unclaimed board
elements per turn; Maker wins by owning a whole winning set. The
potential of a position sums ``(1 + b)^{-r/a}`` over winning sets Breaker
has not touched, ``r`` being the number of elements Maker still lacks.
Below ``1 / (1 + b)`` at the start, Breaker wins by always claiming the
element carrying the most potential.

The expander game is handled through the reversed game: winning sets are
the edge sets between pairs ``(X, Y)`` that would witness a failure of
expansion, so the side that touches every such set ends up with an
expander.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable, Sequence

from .errors import InputError, SizeGuardError, StrategyFault
from .expansion import DEFAULT_GUARD, as_fraction, check_expander_exact, check_expander_sampled
from .expansion import exact_set_count, m_param
from .graph import Graph
from .rng import as_rng, check_seed, split_seeds

UNCLAIMED, MAKER, BREAKER = 0, 1, 2
SIDES = {"maker": MAKER, "breaker": BREAKER}
HYPERGRAPH_GUARD = 200_000


@dataclass(frozen=True)
class GameHypergraph:
    board: tuple
    winning_sets: tuple[tuple[int, ...], ...]
    a: int = 1
    b: int = 1

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise InputError("biases must be at least 1")
        size = len(self.board)
        for F in self.winning_sets:
            if any(not 0 <= i < size for i in F):
                raise InputError(f"winning set {F} indexes outside the board")

    @property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        return _incidence(self.winning_sets, len(self.board))


@lru_cache(maxsize=64)
def _incidence(sets, size):
    inc: list[list[int]] = [[] for _ in range(size)]
    for j, F in enumerate(sets):
        for i in F:
            inc[i].append(j)
    return tuple(tuple(x) for x in inc)


@dataclass
class GameState:
    claims: list[int]
    turn: int
    picks_left: int

    @classmethod
    def start(cls, H: GameHypergraph, first: str = "maker") -> "GameState":
        side = SIDES[first]
        return cls([UNCLAIMED] * len(H.board), side, H.a if side == MAKER else H.b)

    def unclaimed(self) -> list[int]:
        return [i for i, c in enumerate(self.claims) if c == UNCLAIMED]

    def owned(self, side: int) -> list[int]:
        return [i for i, c in enumerate(self.claims) if c == side]

    def claim(self, H: GameHypergraph, i: int) -> None:
        self.claims[i] = self.turn
        self.picks_left -= 1
        if self.picks_left == 0:
            self.turn = BREAKER if self.turn == MAKER else MAKER
            self.picks_left = H.a if self.turn == MAKER else H.b


def _set_weight(H: GameHypergraph, claims, F) -> float:
    missing = 0
    for i in F:
        c = claims[i]
        if c == BREAKER:
            return 0.0
        if c == UNCLAIMED:
            missing += 1
    return (1 + H.b) ** (-missing / H.a)


def es_potential(H: GameHypergraph, state: GameState | None = None) -> float:
    """Sum of ``(1 + b)^{-r/a}`` over winning sets untouched by Breaker."""
    claims = state.claims if state is not None else [UNCLAIMED] * len(H.board)
    return math.fsum(_set_weight(H, claims, F) for F in H.winning_sets)


def element_weights(H: GameHypergraph, state: GameState) -> list[float]:
    weights = [_set_weight(H, state.claims, F) for F in H.winning_sets]
    return [math.fsum(weights[j] for j in H.incidence[i]) for i in range(len(H.board))]


def breaker_potential_move(H: GameHypergraph, state: GameState) -> int:
    """Unclaimed element carrying the most potential; ties go to the lowest index."""
    free = state.unclaimed()
    if not free:
        raise InputError("no unclaimed element left")
    w = element_weights(H, state)
    return max(free, key=lambda i: (w[i], -i))


Strategy = Callable[[GameHypergraph, GameState, object], int]


def potential_strategy(H, state, rng) -> int:
    return breaker_potential_move(H, state)


def random_strategy(H, state, rng) -> int:
    free = state.unclaimed()
    return free[int(rng.integers(len(free)))]


def _maker_degrees(H, state) -> dict:
    deg: dict = {}
    for i in state.owned(MAKER):
        for v in H.board[i]:
            deg[v] = deg.get(v, 0) + 1
    return deg


def greedy_strategy(H, state, rng) -> int:
    """Element lying in the most sets still open to Maker.

    On a board of graph edges with no open sets left, falls back to the
    edge at the vertex where Maker is currently weakest.
    """
    free = state.unclaimed()
    live = [_set_weight(H, state.claims, F) > 0 for F in H.winning_sets]
    score = {i: sum(1 for j in H.incidence[i] if live[j]) for i in free}
    best = max(score.values(), default=0)
    if best > 0 or not _edge_board(H):
        return max(free, key=lambda i: (score[i], -i))
    deg = _maker_degrees(H, state)
    return min(free, key=lambda i: (min(deg.get(v, 0) for v in H.board[i]), i))


def degree_strategy(H, state, rng) -> int:
    """Edge whose weaker endpoint has the lowest Maker degree (ties: lower total, then index)."""
    if not _edge_board(H):
        raise InputError("degree strategy needs a board of graph edges")
    deg = _maker_degrees(H, state)
    free = state.unclaimed()

    def key(i):
        u, v = H.board[i]
        du, dv = deg.get(u, 0), deg.get(v, 0)
        return (min(du, dv), du + dv, i)

    return min(free, key=key)


def _edge_board(H) -> bool:
    return bool(H.board) and all(isinstance(e, tuple) and len(e) == 2 for e in H.board)


STRATEGIES: dict[str, Strategy] = {
    "potential": potential_strategy,
    "random": random_strategy,
    "greedy": greedy_strategy,
    "degree": degree_strategy,
}


def maker_has_won(H: GameHypergraph, claims) -> bool:
    return any(all(claims[i] == MAKER for i in F) for F in H.winning_sets)


def breaker_has_won(H: GameHypergraph, claims) -> bool:
    """Every winning set already holds a Breaker element."""
    return all(any(claims[i] == BREAKER for i in F) for F in H.winning_sets)


@dataclass
class GameResult:
    moves: list[tuple[str, int]]
    claims: list[int]
    winner: str
    first: str
    initial_potential: float
    final_potential: float
    maker_elements: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "moves": [{"side": s, "element": e} for s, e in self.moves],
            "claims": ["-MB"[c] for c in self.claims],
            "winner": self.winner,
            "first": self.first,
            "initial_potential": self.initial_potential,
            "final_potential": self.final_potential,
        }


def play_game(
    H: GameHypergraph,
    maker: Strategy | str,
    breaker: Strategy | str,
    seed,
    *,
    first: str = "maker",
) -> GameResult:
    """Play until the board is exhausted and report the winner."""
    maker = STRATEGIES[maker] if isinstance(maker, str) else maker
    breaker = STRATEGIES[breaker] if isinstance(breaker, str) else breaker
    if first not in SIDES:
        raise InputError(f"first must be 'maker' or 'breaker', got {first!r}")
    rng = as_rng(seed)
    state = GameState.start(H, first)
    start_potential = es_potential(H, state)
    moves = []
    while True:
        free = state.unclaimed()
        if not free:
            break
        side = state.turn
        name = "maker" if side == MAKER else "breaker"
        i = (maker if side == MAKER else breaker)(H, state, rng)
        if not isinstance(i, (int,)) or not 0 <= i < len(H.board) or state.claims[i] != UNCLAIMED:
            raise StrategyFault(f"{name} strategy chose unavailable element {i!r}")
        state.claim(H, i)
        moves.append((name, i))
    winner = "maker" if maker_has_won(H, state.claims) else "breaker"
    return GameResult(
        moves,
        state.claims,
        winner,
        first,
        start_potential,
        es_potential(H, state),
        [H.board[i] for i in state.owned(MAKER)],
    )


def potential_never_loses(H: GameHypergraph, *, first: str = "maker", limit: int = 12) -> tuple[bool, list | None]:
    """Play the potential strategy as Breaker against every possible Maker line.

    Returns ``(True, None)`` if Breaker wins on every line, else
    ``(False, moves)`` for one losing line.
    """
    if len(H.board) > limit:
        raise SizeGuardError("game enumeration", len(H.board), limit)
    memo: dict = {}

    def walk(state: GameState) -> list | None:
        if maker_has_won(H, state.claims):
            return []
        if breaker_has_won(H, state.claims) or not state.unclaimed():
            return None
        key = (tuple(state.claims), state.turn, state.picks_left)
        if key in memo:
            return memo[key]
        out = None
        if state.turn == BREAKER:
            i = breaker_potential_move(H, state)
            nxt = GameState(list(state.claims), state.turn, state.picks_left)
            nxt.claim(H, i)
            sub = walk(nxt)
            out = None if sub is None else [("breaker", i)] + sub
        else:
            for i in state.unclaimed():
                nxt = GameState(list(state.claims), state.turn, state.picks_left)
                nxt.claim(H, i)
                sub = walk(nxt)
                if sub is not None:
                    out = [("maker", i)] + sub
                    break
        memo[key] = out
        return out

    line = walk(GameState.start(H, first))
    return line is None, line


def solve_game(H: GameHypergraph, *, first: str = "maker", limit: int = 12) -> str:
    """Winner under optimal play, by exhaustive search."""
    if len(H.board) > limit:
        raise SizeGuardError("game enumeration", len(H.board), limit)

    @lru_cache(maxsize=None)
    def maker_wins(claims: tuple, turn: int, picks: int) -> bool:
        if maker_has_won(H, claims):
            return True
        if breaker_has_won(H, claims):
            return False
        free = [i for i, c in enumerate(claims) if c == UNCLAIMED]
        if not free:
            return False
        results = []
        for i in free:
            st = GameState(list(claims), turn, picks)
            st.claim(H, i)
            results.append(maker_wins(tuple(st.claims), st.turn, st.picks_left))
            if turn == MAKER and results[-1]:
                return True
            if turn == BREAKER and not results[-1]:
                return False
        return turn == BREAKER

    s = GameState.start(H, first)
    return "maker" if maker_wins(tuple(s.claims), s.turn, s.picks_left) else "breaker"


def _witness_sizes(n: int, d) -> tuple[int, list[tuple[int, int]]]:
    q = as_fraction(d)
    m = m_param(n, q)
    sizes = [(k, n - math.ceil((q + 1) * k) + 1) for k in range(1, min(m, n + 1))]
    return m, sizes


def expander_game_set_count(n: int, d) -> int:
    m, sizes = _witness_sizes(n, d)
    count = sum(math.comb(n, k) * math.comb(n - k, max(y, 0)) for k, y in sizes)
    if 2 * m <= n:
        count += math.comb(n, m) * math.comb(n - m, m) // 2
    return count


def expander_game_hypergraph(G: Graph, d, *, a: int = 1, b: int = 1, guard: int = HYPERGRAPH_GUARD) -> GameHypergraph:
    """Winning sets are the edge sets ``E(X, Y)`` for

    (i) ``1 <= |X| < m`` and ``|Y| = n - ceil((d + 1)|X|) + 1`` (an empty
        ``Y`` when that size is not positive), and
    (ii) ``|X| = |Y| = m``,

    over disjoint ``X``, ``Y``. Identical edge sets are merged. Touching
    every set certifies both expansion conditions for the claimed edges.
    """
    n = G.n
    count = expander_game_set_count(n, d)
    if count > guard:
        raise SizeGuardError("expander game hypergraph", count, guard)
    edges = G.edges()
    index = {e: i for i, e in enumerate(edges)}
    m, sizes = _witness_sizes(n, d)
    everyone = list(range(n))
    found: set[tuple[int, ...]] = set()

    def cross(xs, ys) -> tuple[int, ...]:
        yset = set(ys)
        return tuple(sorted(index[(min(x, y), max(x, y))] for x in xs for y in G.neighbors(x) if y in yset))

    for k, y in sizes:
        for xs in combinations(everyone, k):
            if y <= 0:
                found.add(())
                continue
            rest = [v for v in everyone if v not in xs]
            for ys in combinations(rest, y):
                found.add(cross(xs, ys))
    if 2 * m <= n:
        for xs in combinations(everyone, m):
            rest = [v for v in everyone if v not in xs and v > xs[0]]
            for ys in combinations(rest, m):
                found.add(cross(xs, ys))
    return GameHypergraph(tuple(edges), tuple(sorted(found, key=lambda F: (len(F), F))), a, b)


def maker_win_criterion(G: Graph, d, b: int, *, guard: int = HYPERGRAPH_GUARD) -> tuple[float, bool]:
    """``sum 2^{-|F|/b}`` over the reversed-game sets, and whether it is below ``1/2``."""
    if b < 1:
        raise InputError("b must be at least 1")
    H = expander_game_hypergraph(G, d, a=b, b=1, guard=guard)
    total = es_potential(H)
    return total, total < 0.5


@dataclass
class UniversalityReport:
    n: int
    d: float
    delta: float
    b: int
    first_mover: str
    maker_strategy: str
    breaker_strategy: str
    criterion: float | None
    criterion_holds: bool | None
    maker_edges: int
    all_sets_touched: bool | None
    expander: dict
    trees: list[dict]

    @property
    def expander_ok(self) -> bool:
        return self.expander["status"] in ("Pass", "Unknown")

    def to_json(self) -> dict:
        return dict(self.__dict__)


def universality_game(
    G: Graph,
    delta,
    d,
    b: int,
    tree_sample: Sequence[Graph],
    seed,
    *,
    breaker: str = "random",
    check_trials: int = 200,
    exact_guard: int = DEFAULT_GUARD,
    hypergraph_guard: int = HYPERGRAPH_GUARD,
    embed_budget=None,
    thresholds=None,
    maker_first: bool = True,
) -> UniversalityReport:
    """Play the ``(1:b)`` edge game with Maker on the expander potential, then test Maker's graph.

    Maker acts as Breaker of the reversed ``(b:1)`` game and, as in the
    original game, moves first. If the reversed hypergraph is too large to
    enumerate, Maker falls back to the degree-balancing heuristic. The
    opponent is ``breaker`` (``random``, ``greedy`` or ``potential``).
    ``maker_first=False`` lets Breaker open instead.
    """
    from .embed import EmbedBudget, embed_spanning_tree

    check_seed(seed)
    for T in tree_sample:
        if T.n != G.n:
            raise InputError(f"tree on {T.n} vertices for a host on {G.n}")
    game_seed, check_seed_, embed_seed = split_seeds(seed, 3)
    try:
        H = expander_game_hypergraph(G, d, a=b, b=1, guard=hypergraph_guard)
        maker_name = "potential"
        criterion = es_potential(H)
    except SizeGuardError:
        H = GameHypergraph(tuple(G.edges()), (), a=b, b=1)
        maker_name = "degree"
        criterion = None
    # roles swap: the real Maker is Breaker of the reversed game and vice versa
    result = play_game(
        H, STRATEGIES[breaker], STRATEGIES[maker_name], game_seed, first="breaker" if maker_first else "maker"
    )
    mine = [H.board[i] for i, c in enumerate(result.claims) if c == BREAKER]
    M = Graph(G.n, mine)
    if exact_set_count(G.n, m_param(G.n, d)) <= exact_guard:
        verdict = check_expander_exact(M, d, guard=exact_guard)
    else:
        verdict = check_expander_sampled(M, d, check_trials, check_seed_)
    budget = embed_budget or EmbedBudget(seed=embed_seed)
    outcomes = []
    for T in tree_sample:
        if M.m < G.n - 1:
            outcomes.append({"success": False, "reason": "fewer than n-1 edges", "case": None})
            continue
        rep = embed_spanning_tree(M, T, delta, d, thresholds, budget)
        outcomes.append(
            {
                "success": rep.success,
                "case": rep.case,
                "fallback": rep.fallback_used,
                "failure_stage": rep.failure_stage,
                "embedding": None if rep.embedding is None else list(rep.embedding.map),
            }
        )
    return UniversalityReport(
        n=G.n,
        d=float(as_fraction(d)),
        delta=float(as_fraction(delta)),
        b=b,
        first_mover="maker" if maker_first else "breaker",
        maker_strategy=maker_name,
        breaker_strategy=breaker,
        criterion=criterion,
        criterion_holds=None if criterion is None else criterion < 0.5,
        maker_edges=M.m,
        all_sets_touched=None if maker_name != "potential" else breaker_has_won(H, result.claims),
        expander=verdict.to_json(),
        trees=outcomes,
    )

"""The (n, d)-expander predicate and related set-level lemmas.

With ``m = ceil(n / 2d)`` a graph is an (n, d)-expander when

* E1: every ``X`` with ``1 <= |X| < m`` has ``|N(X)| >= d |X|``, and
* E2: every two disjoint ``m``-sets are joined by at least one edge.

Comparisons against ``d`` are exact: ``d`` is converted to a ``Fraction``
(floats through their shortest decimal repr) and both sides are multiplied
out.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import InputError, PartitionError, SizeGuardError
from .graph import Graph, external_neighborhood, ordered_edge_count, vertex_set
from .rng import as_rng, check_seed

DEFAULT_GUARD = 20_000_000


def as_fraction(d) -> Fraction:
    if isinstance(d, Fraction):
        q = d
    elif isinstance(d, float):
        if not math.isfinite(d):
            raise InputError(f"d must be finite, got {d}")
        q = Fraction(repr(d))
    else:
        q = Fraction(d)
    if q <= 0:
        raise InputError(f"d must be positive, got {d}")
    return q


@lru_cache(maxsize=1024)
def m_param(n: int, d) -> int:
    """``ceil(n / (2 d))``."""
    if n < 1:
        raise InputError("n must be at least 1")
    q = as_fraction(d)
    return math.ceil(Fraction(n) / (2 * q))


@dataclass(frozen=True)
class ExpanderParams:
    n: int
    d: Fraction

    @property
    def m(self) -> int:
        return m_param(self.n, self.d)


class Status(str, enum.Enum):
    PASS = "Pass"
    FAIL_E1 = "FailE1"
    FAIL_E2 = "FailE2"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ExpanderVerdict:
    status: Status
    d: Fraction
    m: int
    mode: str = "exact"
    witness: tuple | None = None
    trials: int | None = None
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    @property
    def failed(self) -> bool:
        return self.status in (Status.FAIL_E1, Status.FAIL_E2)

    def to_json(self) -> dict:
        if self.status is Status.FAIL_E1:
            witness = {"X": list(self.witness)}
        elif self.status is Status.FAIL_E2:
            witness = {"X": list(self.witness[0]), "Y": list(self.witness[1])}
        else:
            witness = None
        mode = {"kind": self.mode}
        if self.mode == "sampled":
            mode.update(trials=self.trials, seed=self.seed)
        d = int(self.d) if self.d.denominator == 1 else float(self.d)
        return {"status": self.status.value, "witness": witness, "mode": mode, "d": d, "m": self.m}


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _lowest(mask: int, k: int) -> int:
    out = 0
    for _ in range(k):
        low = mask & -mask
        out |= low
        mask ^= low
    return out


def _subsets(masks: Sequence[int], k: int, start: int = 0, xm: int = 0, om: int = 0) -> Iterator[tuple[int, int]]:
    """All ``k``-subsets in lexicographic order, with the OR of their neighbourhood masks."""
    if k == 0:
        yield xm, om
        return
    for v in range(start, len(masks) - k + 1):
        yield from _subsets(masks, k - 1, v + 1, xm | (1 << v), om | masks[v])


def exact_set_count(n: int, m: int) -> int:
    """Number of sets the exact checker enumerates."""
    count = sum(math.comb(n, k) for k in range(1, m))
    if 2 * m <= n:
        count += math.comb(n, m)
    return count


def _expands(nbrs: int, size: int, q: Fraction) -> bool:
    return nbrs * q.denominator >= q.numerator * size


def find_e1_violation(G: Graph, d, *, guard: int = DEFAULT_GUARD) -> tuple[int, ...] | None:
    """Smallest (then lexicographically first) ``X`` violating E1, or ``None``."""
    q = as_fraction(d)
    m = m_param(max(G.n, 1), q)
    count = sum(math.comb(G.n, k) for k in range(1, m))
    if count > guard:
        raise SizeGuardError("E1 enumeration", count, guard)
    masks = G.masks()
    for k in range(1, min(m, G.n + 1)):
        for xm, om in _subsets(masks, k):
            if not _expands((om & ~xm).bit_count(), k, q):
                return _bits(xm)
    return None


def find_e2_violation(G: Graph, d, *, guard: int = DEFAULT_GUARD) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """First disjoint pair of ``m``-sets with no edge between them, or ``None``.

    For each ``m``-set ``X`` (lexicographic order) it suffices to look at the
    vertices outside ``X`` and its neighbourhood: if there are at least ``m``
    of them, the smallest ``m`` form ``Y``.
    """
    q = as_fraction(d)
    n = G.n
    m = m_param(max(n, 1), q)
    if 2 * m > n:
        return None
    count = math.comb(n, m)
    if count > guard:
        raise SizeGuardError("E2 enumeration", count, guard)
    full = (1 << n) - 1
    for xm, om in _subsets(G.masks(), m):
        rest = full & ~(xm | om)
        if rest.bit_count() >= m:
            return _bits(xm), _bits(_lowest(rest, m))
    return None


def check_expander_exact(G: Graph, d, *, guard: int = DEFAULT_GUARD) -> ExpanderVerdict:
    """Decide E1 and E2 by enumeration; E1 witnesses (smaller sets) are reported first."""
    q = as_fraction(d)
    if G.n == 0:
        raise InputError("empty graph")
    m = m_param(G.n, q)
    count = exact_set_count(G.n, m)
    if count > guard:
        raise SizeGuardError("exact expander check", count, guard)
    x = find_e1_violation(G, q, guard=guard)
    if x is not None:
        return ExpanderVerdict(Status.FAIL_E1, q, m, witness=x)
    xy = find_e2_violation(G, q, guard=guard)
    if xy is not None:
        return ExpanderVerdict(Status.FAIL_E2, q, m, witness=xy)
    return ExpanderVerdict(Status.PASS, q, m)


def check_expander_sampled(G: Graph, d, trials: int, seed) -> ExpanderVerdict:
    """One-sided Monte-Carlo test: returns a failure with witness or ``Unknown``.

    Each trial draws one uniform set of every size ``1 .. m-1`` for E1 and one
    uniform disjoint pair of ``m``-sets for E2.
    """
    q = as_fraction(d)
    if trials < 1:
        raise InputError("trials must be at least 1")
    n = G.n
    m = m_param(n, q)
    seed_val = None if not isinstance(seed, int) else check_seed(seed)
    rng = as_rng(seed)
    masks = G.masks()
    kw = dict(mode="sampled", trials=trials, seed=seed_val)
    for _ in range(trials):
        perm = rng.permutation(n)
        for k in range(1, min(m, n + 1)):
            xs = rng.choice(n, size=k, replace=False) if k > 1 else perm[:1]
            xm = om = 0
            for v in xs.tolist():
                xm |= 1 << v
                om |= masks[v]
            if not _expands((om & ~xm).bit_count(), k, q):
                return ExpanderVerdict(Status.FAIL_E1, q, m, witness=_bits(xm), **kw)
        if 2 * m <= n:
            xs, ys = sorted(perm[:m].tolist()), sorted(perm[m : 2 * m].tolist())
            ym = sum(1 << y for y in ys)
            if not any(masks[x] & ym for x in xs):
                return ExpanderVerdict(Status.FAIL_E2, q, m, witness=(tuple(xs), tuple(ys)), **kw)
    return ExpanderVerdict(Status.UNKNOWN, q, m, **kw)


def recheck_witness(G: Graph, verdict: ExpanderVerdict) -> bool:
    """Re-validate a failure witness directly against the definition."""
    m, q = verdict.m, verdict.d
    if verdict.status is Status.FAIL_E1:
        x = verdict.witness
        return 1 <= len(x) < m and len(set(x)) == len(x) and not _expands(len(external_neighborhood(G, x)), len(x), q)
    if verdict.status is Status.FAIL_E2:
        x, y = verdict.witness
        return (
            len(set(x)) == len(set(y)) == m
            and not set(x) & set(y)
            and ordered_edge_count(G, x, y) == 0
        )
    return False


def verify_density_bound(G: Graph, m: int, X: Iterable[int], Y: Iterable[int]) -> bool:
    """Check ``e(X, Y) >= |X||Y| / 4m`` for disjoint ``X``, ``Y`` with ``|X| >= m``, ``|Y| >= 2m``."""
    xs, ys = vertex_set(G, X), vertex_set(G, Y)
    if m < 1:
        raise InputError("m must be positive")
    if xs & ys:
        raise InputError("X and Y must be disjoint")
    if len(xs) < m or len(ys) < 2 * m:
        raise InputError(f"need |X| >= m and |Y| >= 2m, got {len(xs)}, {len(ys)} with m={m}")
    return 4 * m * ordered_edge_count(G, xs, ys) >= len(xs) * len(ys)


def exceptional_vertices(G: Graph, W: Iterable[int], m: int, *, require_hypothesis: bool = True) -> frozenset[int]:
    """Vertices outside ``W`` with at most ``m - 1`` neighbours in ``W``.

    ``require_hypothesis`` enforces ``|W| >= m^2``, the size under which
    E2 bounds the number of such vertices by ``m - 1``.
    """
    ws = vertex_set(G, W)
    if require_hypothesis and len(ws) < m * m:
        raise InputError(f"|W| = {len(ws)} < m^2 = {m * m}")
    return frozenset(v for v in range(G.n) if v not in ws and len(G.adj(v) & ws) <= m - 1)


@dataclass(frozen=True)
class Partition:
    parts: tuple[frozenset[int], ...]
    part_expansions: tuple[Fraction, ...]
    attempts: int = 1
    mode: str = "exact"
    checked_sets: int = 0
    verified: bool = True
    witness: dict | None = field(default=None, compare=False)


def part_expansion_factors(n: int, d, sizes: Sequence[int]) -> tuple[Fraction, ...]:
    q = as_fraction(d)
    return tuple(Fraction(s) * q / (5 * n) for s in sizes)


def _partition_violation(masks, part_masks, factors, m, sets) -> dict | None:
    for xm, om in sets:
        nb = om & ~xm
        size = xm.bit_count()
        for i, (pm, f) in enumerate(zip(part_masks, factors)):
            if not _expands((nb & pm).bit_count(), size, f):
                return {"part": i, "X": list(_bits(xm)), "neighbours_in_part": (nb & pm).bit_count()}
    return None


def partition_vertices(
    G: Graph,
    d,
    sizes: Sequence[int],
    seed,
    max_retries: int = 50,
    *,
    mode: str = "auto",
    trials: int = 200,
    guard: int = DEFAULT_GUARD,
) -> Partition:
    """Random partition into parts of the given sizes, verified part by part.

    Every checked ``X`` with ``1 <= |X| < m`` must have at least
    ``d_i |X|`` external neighbours inside part ``i``, where
    ``d_i = |U_i| d / 5n``. ``mode`` is ``"exact"`` (all such ``X``),
    ``"sampled"`` (``trials`` random sets per size and attempt) or ``"auto"``
    (exact when within ``guard``).
    """
    n = G.n
    if any(s < 0 for s in sizes) or sum(sizes) != n:
        raise InputError(f"sizes {list(sizes)} must be non-negative and sum to n = {n}")
    q = as_fraction(d)
    m = m_param(n, q)
    factors = part_expansion_factors(n, q, sizes)
    count = sum(math.comb(n, k) for k in range(1, m))
    if mode == "auto":
        mode = "exact" if count <= guard else "sampled"
    if mode == "exact" and count > guard:
        raise SizeGuardError("partition verification", count, guard)
    if mode not in ("exact", "sampled"):
        raise InputError(f"unknown mode {mode!r}")
    rng = as_rng(seed)
    masks = G.masks()
    witness = last = None
    for attempt in range(1, max_retries + 1):
        perm = rng.permutation(n).tolist()
        parts, at = [], 0
        for s in sizes:
            parts.append(frozenset(perm[at : at + s]))
            at += s
        part_masks = [sum(1 << v for v in p) for p in parts]
        if mode == "exact":
            sets = (xo for k in range(1, m) for xo in _subsets(masks, k))
            checked = count
        else:
            sets = list(_sampled_sets(masks, n, m, trials, rng))
            checked = len(sets)
        witness = _partition_violation(masks, part_masks, factors, m, sets)
        if witness is None:
            return Partition(tuple(parts), factors, attempt, mode, checked)
        last = Partition(tuple(parts), factors, attempt, mode, checked, verified=False, witness=witness)
    err = PartitionError(f"no verified partition after {max_retries} attempts", conclusive=False, witness=witness)
    err.partition = last
    raise err


def _sampled_sets(masks, n, m, trials, rng):
    for _ in range(trials):
        for k in range(1, m):
            xm = om = 0
            for v in rng.choice(n, size=k, replace=False).tolist():
                xm |= 1 << v
                om |= masks[v]
            yield xm, om

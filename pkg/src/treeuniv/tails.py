"""Monte-Carlo checks of the relative-deviation tail bound

    P[|X - E X| > eps * E X] <= exp(-eps^2 E X / 3),   0 < eps <= 3/2,

for binomial and hypergeometric variables. Each report also carries the
exact tail computed from the probability mass function.
"""

from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass

from .errors import InputError
from .rng import as_rng, check_seed

MAX_EPS = 1.5


@dataclass(frozen=True)
class Distribution:
    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind == "binomial":
            n, p = self.params
            if int(n) != n or n < 1 or not 0 < p < 1:
                raise InputError(f"binomial needs n >= 1 and 0 < p < 1, got {self.params}")
        elif self.kind == "hypergeometric":
            n, m, l = self.params
            if not all(int(x) == x for x in self.params) or not (0 < m <= n and 0 < l <= n):
                raise InputError(f"hypergeometric needs 0 < m, l <= n, got {self.params}")
        else:
            raise InputError(f"unknown distribution {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "Distribution":
        """Read ``binomial(n,p)`` or ``hypergeometric(n,m,l)``."""
        match = re.fullmatch(r"\s*(\w+)\s*\(([^)]*)\)\s*", text)
        if not match:
            raise InputError(f"cannot parse distribution {text!r}")
        kind = match.group(1).lower()
        try:
            args = [float(x) for x in match.group(2).split(",")]
        except ValueError as exc:
            raise InputError(f"bad parameters in {text!r}") from exc
        if kind == "binomial" and len(args) == 2:
            return cls(kind, (int(args[0]), args[1]))
        if kind == "hypergeometric" and len(args) == 3:
            return cls(kind, tuple(int(x) for x in args))
        raise InputError(f"cannot parse distribution {text!r}")

    def __str__(self) -> str:
        return f"{self.kind}({','.join(repr(x) for x in self.params)})"

    @property
    def mean(self) -> float:
        if self.kind == "binomial":
            n, p = self.params
            return n * p
        n, m, l = self.params
        return m * l / n

    def support(self) -> range:
        if self.kind == "binomial":
            return range(self.params[0] + 1)
        n, m, l = self.params
        return range(max(0, l - (n - m)), min(m, l) + 1)

    def log_pmf(self, k: int) -> float:
        if self.kind == "binomial":
            n, p = self.params
            return _log_comb(n, k) + k * math.log(p) + (n - k) * math.log1p(-p)
        n, m, l = self.params
        return _log_comb(m, k) + _log_comb(n - m, l - k) - _log_comb(n, l)

    def sample(self, rng, size: int):
        if self.kind == "binomial":
            n, p = self.params
            return rng.binomial(n, p, size=size)
        n, m, l = self.params
        return rng.hypergeometric(m, n - m, l, size=size)


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def exact_tail(dist: Distribution, eps: float) -> float:
    mu, cut = dist.mean, eps * dist.mean
    return math.fsum(math.exp(dist.log_pmf(k)) for k in dist.support() if abs(k - mu) > cut)


def tail_bound(dist: Distribution, eps: float) -> float:
    return math.exp(-eps * eps * dist.mean / 3)


@dataclass
class TailReport:
    dist: str
    eps: float
    samples: int
    seed: int
    mean: float
    empirical: float
    sigma: float
    bound: float
    exact: float
    violation: bool

    def to_json(self) -> dict:
        return asdict(self)


def tail_check(dist: Distribution | str, eps: float, samples: int, seed, *, sigmas: float = 5.0) -> TailReport:
    """Estimate the relative tail and flag it if it exceeds the bound by more than ``sigmas`` standard errors."""
    if isinstance(dist, str):
        dist = Distribution.parse(dist)
    if not 0 < eps <= MAX_EPS:
        raise InputError(f"eps must lie in (0, {MAX_EPS}], got {eps}")
    if samples < 1:
        raise InputError("samples must be positive")
    check_seed(seed)
    rng = as_rng(seed)
    xs = dist.sample(rng, samples)
    mu = dist.mean
    hits = int((abs(xs - mu) > eps * mu).sum())
    p_hat = hits / samples
    # floor the variance so a zero count does not claim infinite precision
    sigma = math.sqrt(max(p_hat, 1 / samples) * (1 - p_hat) / samples) if p_hat < 1 else 0.0
    bound = tail_bound(dist, eps)
    return TailReport(
        dist=str(dist),
        eps=eps,
        samples=samples,
        seed=seed,
        mean=mu,
        empirical=p_hat,
        sigma=sigma,
        bound=bound,
        exact=exact_tail(dist, eps),
        violation=p_hat - bound > sigmas * sigma,
    )


PRESETS: tuple[tuple[str, float], ...] = (
    ("binomial(100,0.5)", 0.5),
    ("binomial(100,0.5)", 0.2),
    ("binomial(1000,0.1)", 0.1),
    ("binomial(50,0.3)", 1.0),
    ("binomial(200,0.05)", 1.5),
    ("binomial(20,0.5)", 0.3),
    ("hypergeometric(20,10,10)", 1.5),
    ("hypergeometric(100,30,40)", 0.3),
    ("hypergeometric(64,16,32)", 0.5),
    ("hypergeometric(500,250,100)", 0.2),
)

"""Exception types shared across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Arguments violate an operation's preconditions."""


class SizeGuardError(InputError):
    """An exact enumeration would exceed the configured size guard."""

    def __init__(self, what: str, count: int, guard: int):
        super().__init__(f"{what}: {count} sets to enumerate exceeds guard {guard}; too large for exact mode")
        self.count = count
        self.guard = guard


class GenerationError(RuntimeError):
    """A randomized construction gave up after exhausting its budget."""


class SearchFailed(RuntimeError):
    """A search heuristic did not find an object.

    ``conclusive`` is True only when the search was exhaustive, so the
    object provably does not exist.
    """

    def __init__(self, message: str, *, conclusive: bool = False, witness=None):
        super().__init__(message)
        self.conclusive = conclusive
        self.witness = witness


class HallViolation(SearchFailed):
    """Star matching is infeasible; ``violator`` breaks the generalized Hall condition."""

    def __init__(self, violator: frozenset[int], neighbours: int, demand: int):
        super().__init__(
            f"Hall condition fails: |N(X) & W| = {neighbours} < {demand} = k(X) for X = {sorted(violator)}",
            conclusive=True,
            witness=sorted(violator),
        )
        self.violator = violator
        self.neighbours = neighbours
        self.demand = demand


class PartitionError(SearchFailed):
    """No verified partition was found within the retry budget."""


class NoCaseError(InputError):
    """Case thresholds exclude every case of the spanning-tree driver."""

    def __init__(self, message: str, stats: dict):
        super().__init__(message)
        self.stats = stats


class StrategyFault(RuntimeError):
    """A game strategy returned an element that is not available."""

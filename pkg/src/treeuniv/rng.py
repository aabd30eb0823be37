"""Seeded random streams.

Every stochastic routine takes either an integer seed or an existing
``numpy.random.Generator``. Integer seeds are 64-bit and feed PCG64;
child streams are derived with ``SeedSequence.spawn`` so that parallel
trials stay reproducible regardless of scheduling.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

SEED_BITS = 64


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise InputError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < 2**SEED_BITS:
        raise InputError(f"seed must be in [0, 2^{SEED_BITS}), got {seed}")
    return seed


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def split_seeds(seed: int, count: int) -> list[int]:
    """Derive ``count`` independent 64-bit child seeds from ``seed``."""
    children = np.random.SeedSequence(check_seed(seed)).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def child_seed(rng: np.random.Generator) -> int:
    """Draw a fresh 64-bit seed from an existing stream."""
    return int(rng.integers(0, 2**63 - 1, dtype=np.int64))

"""Seeded random streams.

Every stream is a PCG64 generator keyed by a numpy SeedSequence built from the
run seed and an integer path (grid index, trial index, ...). The same
(seed, key) always yields the same stream, independent of execution order.
"""

from __future__ import annotations

import numpy as np

SEED_MASK = (1 << 64) - 1


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= int(seed) <= SEED_MASK:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return int(seed)


def substream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))

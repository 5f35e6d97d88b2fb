"""Deterministic per-item random streams.

Every unit of work draws from ``default_rng(SeedSequence([master, *path]))``
so results do not depend on worker count or scheduling order.
"""

import numpy as np


def rng_for(master: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master), *map(int, path)]))


def derived_seed(master: int, *path: int) -> int:
    """A 63-bit integer seed for the work item at ``path``."""
    return int(np.random.SeedSequence([int(master), *map(int, path)]).generate_state(2, np.uint32)
               .astype(np.uint64) @ np.array([1 << 31, 1], dtype=np.uint64))

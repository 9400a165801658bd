"""Seedable, splittable random streams.

All randomized code draws from Philox counter-based generators keyed by
(seed, *path), so any iteration or subroutine can be replayed in isolation
and independent streams can run in parallel without coordination.
"""

import numpy as np

_UINT64 = 2**64


def _normalize(seed):
    return int(seed) % _UINT64


def stream(seed, *path):
    """Generator for the substream identified by (seed, *path)."""
    ss = np.random.SeedSequence(_normalize(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed, *path):
    """64-bit integer seed for the substream identified by (seed, *path)."""
    ss = np.random.SeedSequence(_normalize(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])

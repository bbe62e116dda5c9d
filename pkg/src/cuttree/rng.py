"""Deterministic, splittable random streams for parallel replicas.

Streams are counter-based (Philox) and derived from a 64-bit master seed
plus an integer path, so replica ``i`` gets the same stream whether the
replicas run serially, threaded, or in worker processes.
"""
from __future__ import annotations

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for a (seed, path) pair.

    ``stream(seed)`` is the root stream; ``stream(seed, i)`` is replica i's
    stream; deeper paths give sub-streams of a replica.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def replica_streams(seed: int, count: int) -> list[np.random.Generator]:
    return [stream(seed, i) for i in range(count)]

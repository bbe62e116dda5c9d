"""Deterministic replica execution, serial or across worker processes.

Results are always aggregated in replica-index order, never completion
order, so a fixed master seed gives byte-identical output at any
parallelism degree.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def map_replicas(worker, replicas: int, workers: int, args: tuple = ()):
    """worker(index, *args) for index in 0..replicas-1, in index order."""
    if workers <= 1 or replicas <= 1:
        return [worker(i, *args) for i in range(replicas)]
    with ProcessPoolExecutor(max_workers=min(workers, replicas)) as ex:
        futures = [ex.submit(worker, i, *args) for i in range(replicas)]
        return [f.result() for f in futures]

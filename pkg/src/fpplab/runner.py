"""Replicate execution: an order-preserving map over a process pool."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def replicate_map(func, items, workers: int = 1) -> list:
    """``[func(item) for item in items]``, optionally across ``workers`` processes.

    Results come back in input order, so aggregates do not depend on the pool.
    """
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunk))

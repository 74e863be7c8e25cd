"""Worker-count control (STIFFCAL_THREADS) and order-preserving parallel map.

Results always come back in input order, so the degree of parallelism can
never change what callers compute.  The compute-heavy maps in this package
are pure-Python hot loops, which the GIL serializes, so parallel execution
uses worker processes; ``fn`` and the items must then be picklable.  If no
pool can be created (restricted environments), the map silently runs
serially, which yields identical results.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool

ENV_VAR = "STIFFCAL_THREADS"


def worker_count() -> int:
    """Number of workers: min(cpu count, STIFFCAL_THREADS if set)."""
    n = os.cpu_count() or 1
    cap = os.environ.get(ENV_VAR)
    if cap is not None:
        try:
            cap_n = int(cap)
        except ValueError:
            raise ValueError(f"{ENV_VAR} must be a positive integer, got {cap!r}") from None
        if cap_n < 1:
            raise ValueError(f"{ENV_VAR} must be a positive integer, got {cap!r}")
        n = min(n, cap_n)
    return n


def ordered_map(fn, items, workers: int | None = None) -> list:
    """Map ``fn`` over ``items``, possibly across processes, preserving order."""
    items = list(items)
    if workers is None:
        workers = worker_count()
    workers = min(workers, len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    chunksize = max(1, len(items) // (4 * workers))
    try:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items, chunksize=chunksize))
    except (BrokenProcessPool, OSError):
        return [fn(it) for it in items]

"""Process pool for independent sweeps, capped by SLIDING_SPECTRAL_THREADS."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def worker_count(requested: int | None = None) -> int:
    env = os.environ.get("SLIDING_SPECTRAL_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ValueError(f"SLIDING_SPECTRAL_THREADS must be an integer, got {env!r}") from None
    if requested is not None:
        cap = min(cap, max(1, int(requested)))
    return cap


def parallel_map(fn, items, workers: int | None = None) -> list:
    """``[fn(x) for x in items]``, in order; runs in worker processes when more than one is allowed."""
    items = list(items)
    n = min(worker_count(workers), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))

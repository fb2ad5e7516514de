"""Order-preserving process pool helper."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("QC_JOBS", "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable, items: Sequence, jobs: int | None = None) -> list:
    """``[fn(x) for x in items]``, spread over ``jobs`` processes; order is kept."""
    jobs = default_jobs() if jobs is None else jobs
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=chunk))

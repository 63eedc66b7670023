"""Order-preserving map with an optional thread pool.

``SENDOVLAB_THREADS`` caps the number of worker threads (default 1).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count(requested: int | None = None) -> int:
    cap = os.environ.get("SENDOVLAB_THREADS")
    limit = int(cap) if cap and cap.strip().isdigit() and int(cap) > 0 else 1
    if requested is None:
        return limit
    return max(1, min(int(requested), limit))


def parallel_map(func, items, threads: int | None = None) -> list:
    items = list(items)
    workers = thread_count(threads)
    if workers == 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))

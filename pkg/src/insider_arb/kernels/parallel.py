"""Chunked execution of nogil path kernels across a thread pool."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

THREADS_ENV = "INSIDER_ARB_THREADS"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def chunk_bounds(n: int, threads: int) -> list[tuple[int, int]]:
    threads = max(1, min(threads, n)) if n > 0 else 1
    step = -(-n // threads) if n else 0
    return [(i, min(i + step, n)) for i in range(0, n, step)] if n else []


def run_chunked(kernel: Callable[[int, int], None], n: int, threads: int | None = None) -> None:
    """Call ``kernel(lo, hi)`` on disjoint index ranges covering ``range(n)``.

    Kernels write into preallocated per-path slots, so the result does not
    depend on the number of threads or on completion order.
    """
    threads = default_threads() if threads is None else threads
    bounds = chunk_bounds(n, threads)
    if len(bounds) <= 1:
        for lo, hi in bounds:
            kernel(lo, hi)
        return
    with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
        for fut in [pool.submit(kernel, lo, hi) for lo, hi in bounds]:
            fut.result()

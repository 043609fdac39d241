"""Order-preserving parallel map over a thread pool."""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

_T = TypeVar("_T")
_U = TypeVar("_U")


def available_threads() -> int:
    """Number of CPUs usable by this process."""
    if hasattr(os, "sched_getaffinity"):
        return max(1, len(os.sched_getaffinity(0)))
    return max(1, os.cpu_count() or 1)


def parallel_map(
    fn: Callable[[_T], _U], items: Iterable[_T], threads: int = 1
) -> list[_U]:
    """Apply *fn* to every item, returning results in input order.

    With ``threads <= 1`` the items are processed inline.

        >>> parallel_map(lambda x: x * x, range(4), threads=2)
        [0, 1, 4, 9]

    """
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(fn, items))

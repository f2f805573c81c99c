"""Small thread pool helper with index-addressed results."""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: Optional[int]) -> int:
    """
    Normalize a requested worker count.

    Args:
        workers: Requested width; None or 0 means one worker, negative means all cores

    Returns:
        Worker count >= 1
    """
    if workers is None or workers == 0:
        return 1
    if workers < 0:
        return os.cpu_count() or 1
    return workers


def map_ordered(fn: Callable[[T], R], items: Sequence[T], workers: Optional[int] = 1) -> List[R]:
    """
    Apply `fn` to every item, possibly on a thread pool.

    Results are returned in input order regardless of completion order, so the
    reduction does not depend on scheduling. numpy releases the GIL inside
    LAPACK calls, which is where the work happens.

    Args:
        fn: Function of one item
        items: Work items
        workers: Pool width

    Returns:
        List of results aligned with `items`
    """
    width = min(resolve_workers(workers), max(len(items), 1))
    if width <= 1:
        return [fn(item) for item in items]

    logger.debug(f"Dispatching {len(items)} tasks to {width} workers")
    results: List[Optional[R]] = [None] * len(items)
    with ThreadPoolExecutor(max_workers=width) as executor:
        futures = {executor.submit(fn, item): i for i, item in enumerate(items)}
        for future, i in futures.items():
            results[i] = future.result()
    return results  # type: ignore[return-value]

"""Bounded thread pool helpers."""

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Apply ``fn`` to every item, returning results in input order.

    ``workers <= 1`` runs inline, which keeps tracebacks simple.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug(f"Mapping {len(items)} items over {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))

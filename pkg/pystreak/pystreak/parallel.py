"""Order-preserving map over a process pool."""

from __future__ import annotations

import logging
import multiprocessing as mp
from collections.abc import Callable, Iterable
from typing import TypeVar

from .config import get_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        return get_settings().workers
    return max(1, int(workers))


def parallel_map(func: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """Apply ``func`` to every item and return the results in input order.

    With one worker (or a single item) the map runs in the calling process;
    otherwise ``func`` and the items must be picklable.
    """
    work = list(items)
    n_workers = min(resolve_workers(workers), len(work))
    if n_workers <= 1:
        return [func(item) for item in work]
    logger.debug("Mapping %d items over %d processes", len(work), n_workers)
    with mp.Pool(processes=n_workers) as pool:
        return pool.map(func, work)


def chunk_sizes(replications: int, chunk_size: int) -> list[int]:
    """Split ``replications`` into seeded substreams of at most ``chunk_size`` draws."""
    full, rest = divmod(replications, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])

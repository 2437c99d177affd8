"""
Ordered fan-out over a multiprocessing pool.

Tasks are fixed before any worker starts and results come back in task
order, so reductions over them never depend on the worker count.
"""

import logging
import multiprocessing as mp
from typing import Any, Callable, List, Sequence, Tuple

logger = logging.getLogger(__name__)


def map_ordered(func: Callable[..., Any], tasks: Sequence[Tuple], workers: int = 1) -> List[Any]:
    """Apply ``func(*task)`` to every task, returning results in task order.

    ``func`` must be a module-level callable so it pickles.
    """
    if workers <= 1 or len(tasks) <= 1:
        return [func(*task) for task in tasks]

    processes = min(workers, len(tasks))
    logger.debug(f"Dispatching {len(tasks)} tasks to {processes} worker processes")
    with mp.Pool(processes=processes) as pool:
        return pool.starmap(func, tasks)


def chunked(items: Sequence[Any], size: int) -> List[Sequence[Any]]:
    """Split ``items`` into consecutive slices of at most ``size`` elements."""
    size = max(1, size)
    return [items[i:i + size] for i in range(0, len(items), size)]

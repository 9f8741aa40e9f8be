"""
Parallel cell runner for anneal-certify sweeps.
Evaluates independent sweep cells, serially or on a process pool, and
returns results in input order.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List

logger = logging.getLogger(__name__)


def run_cells(evaluate: Callable, tasks: Iterable, threads: int = 1) -> List:
    """
    Evaluate ``evaluate(task)`` for every task.

    Args:
        evaluate (Callable): Picklable module-level function
        tasks (Iterable): Picklable task records
        threads (int): Worker cap; 1 runs in-process

    Returns:
        list: Results in the order of ``tasks`` regardless of ``threads``
    """
    tasks = list(tasks)
    started = time.perf_counter()
    workers = max(1, min(int(threads or 1), len(tasks)))

    if workers == 1:
        results = [evaluate(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, tasks))

    logger.info('Sweep cells evaluated', extra={
        'cells': len(tasks),
        'workers': workers,
        'seconds': round(time.perf_counter() - started, 3),
    })
    return results

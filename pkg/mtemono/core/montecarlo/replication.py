import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_replications(
    fn: Callable[[T], R], jobs: Iterable[T], workers: int = 1
) -> List[R]:
    """Apply ``fn`` to every job; results come back in job order whatever the
    execution order. ``fn`` must be a module-level function when workers > 1."""
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    logger.info(f"Running {len(jobs)} replications on {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))

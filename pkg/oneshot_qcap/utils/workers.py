import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from oneshot_qcap.config import QcapConfig

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool:
    """Thread pool that hands results back in submission order."""

    def __init__(self, workers: Optional[int] = None, name: str = "qcap"):
        self.workers = workers or QcapConfig.workers()
        self.name = name
        self._lock = threading.RLock()
        self.completed = 0

    def _count(self, result):
        with self._lock:
            self.completed += 1
        return result

    def map(self, fn: Callable[[T], R], items: Sequence[T]) -> List[R]:
        items = list(items)
        if self.workers <= 1 or len(items) <= 1:
            return [self._count(fn(item)) for item in items]

        with ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix=self.name) as pool:
            futures = [pool.submit(fn, item) for item in items]
            # indexing by position keeps aggregation independent of finish order
            return [self._count(future.result()) for future in futures]


def parallel_map(fn: Callable[[T], R], items: Sequence[T],
                 workers: Optional[int] = None) -> List[R]:
    """Apply fn to every item, possibly concurrently, preserving order."""
    return WorkerPool(workers).map(fn, items)

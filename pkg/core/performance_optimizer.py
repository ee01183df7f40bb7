"""
Performance helpers for PyShatter
Worker sizing, order-preserving parallel fan-out and a shared isolation-result cache
"""

import logging
import multiprocessing
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional

import psutil

logger = logging.getLogger(__name__)


@dataclass
class PerformanceProfile:
    """What the machine offers to a fuzz campaign"""
    cpu_cores: int = field(default_factory=lambda: psutil.cpu_count(logical=True) or multiprocessing.cpu_count())
    available_ram: int = field(default_factory=lambda: psutil.virtual_memory().available)
    max_workers_cap: int = 8

    def default_workers(self) -> int:
        return max(1, min(self.cpu_cores, self.max_workers_cap))

    def to_dict(self) -> Dict[str, int]:
        return {
            'cpu_cores': self.cpu_cores,
            'available_ram': self.available_ram,
            'default_workers': self.default_workers(),
        }


class TraceCache:
    """Thread-safe memo of isolation results keyed by (trace family, k)"""

    def __init__(self, max_items: int = 4096):
        if max_items <= 0:
            raise ValueError(f"Cache size must be positive, got {max_items}")
        self.max_items = max_items
        self.memory_cache: Dict[Hashable, Any] = {}
        self.cache_stats = {"hits": 0, "misses": 0, "evictions": 0}
        self.lock = threading.RLock()

    def get(self, key: Hashable) -> Optional[Any]:
        with self.lock:
            if key in self.memory_cache:
                self.cache_stats["hits"] += 1
                # re-insert so iteration order tracks recency
                value = self.memory_cache.pop(key)
                self.memory_cache[key] = value
                return value
            self.cache_stats["misses"] += 1
            return None

    def put(self, key: Hashable, value: Any):
        with self.lock:
            self.memory_cache.pop(key, None)
            self.memory_cache[key] = value
            if len(self.memory_cache) > self.max_items:
                self._evict_oldest()

    def get_or_compute(self, key: Hashable, compute: Callable[[], Any]) -> Any:
        cached = self.get(key)
        if cached is not None:
            return cached
        value = compute()
        self.put(key, value)
        return value

    def _evict_oldest(self):
        # drop the least recently used quarter
        excess = max(1, len(self.memory_cache) // 4)
        for key in list(self.memory_cache)[:excess]:
            del self.memory_cache[key]
            self.cache_stats["evictions"] += 1

    def clear(self):
        with self.lock:
            self.memory_cache.clear()

    def get_stats(self) -> Dict[str, Any]:
        with self.lock:
            total = self.cache_stats["hits"] + self.cache_stats["misses"]
            return {
                **self.cache_stats,
                "hit_rate": self.cache_stats["hits"] / total if total else 0.0,
                "items": len(self.memory_cache),
            }


class ParallelRunner:
    """Thread-pool fan-out whose results always come back in input order"""

    def __init__(self, max_workers: Optional[int] = None, profile: Optional[PerformanceProfile] = None):
        profile = profile or PerformanceProfile()
        if max_workers is not None and max_workers < 0:
            raise ValueError(f"Worker count must be non-negative, got {max_workers}")
        self.max_workers = max_workers if max_workers else profile.default_workers()

    def map_ordered(self, func: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        items = list(items)
        if self.max_workers == 1 or len(items) <= 1:
            return [func(item) for item in items]
        logger.debug("Running %d tasks on %d workers", len(items), self.max_workers)
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            return list(executor.map(func, items))

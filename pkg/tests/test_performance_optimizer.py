import threading

import pytest

from core.performance_optimizer import ParallelRunner, PerformanceProfile, TraceCache


class TestPerformanceProfile:
    def test_default_workers_capped(self):
        """Test worker sizing respects the cap"""
        assert PerformanceProfile(cpu_cores=64, available_ram=0).default_workers() == 8
        assert PerformanceProfile(cpu_cores=2, available_ram=0).default_workers() == 2

    def test_detected_machine(self):
        """Test the detected profile is usable"""
        profile = PerformanceProfile()
        assert profile.cpu_cores >= 1
        assert profile.to_dict()['default_workers'] >= 1


class TestTraceCache:
    def setup_method(self):
        self.cache = TraceCache(max_items=4)

    def test_hit_and_miss(self):
        """Test statistics count hits and misses"""
        assert self.cache.get("a") is None
        self.cache.put("a", 1)
        assert self.cache.get("a") == 1
        stats = self.cache.get_stats()
        assert (stats["hits"], stats["misses"]) == (1, 1)
        assert stats["hit_rate"] == 0.5

    def test_eviction_keeps_recent(self):
        """Test the least recently used entries go first"""
        for key in "abcd":
            self.cache.put(key, key.upper())
        self.cache.get("a")
        self.cache.put("e", "E")
        assert self.cache.get("b") is None
        assert self.cache.get("a") == "A"
        assert self.cache.get_stats()["evictions"] == 1

    def test_get_or_compute(self):
        """Test values are computed once"""
        calls = []

        def compute():
            calls.append(1)
            return (True, None)

        assert self.cache.get_or_compute(("k", 3), compute) == (True, None)
        assert self.cache.get_or_compute(("k", 3), compute) == (True, None)
        assert len(calls) == 1

    def test_clear(self):
        """Test clearing empties the cache"""
        self.cache.put("a", 1)
        self.cache.clear()
        assert self.cache.get_stats()["items"] == 0

    def test_invalid_size(self):
        """Test the cache needs room for one item"""
        with pytest.raises(ValueError):
            TraceCache(max_items=0)


class TestParallelRunner:
    def test_order_preserved(self):
        """Test results come back in input order"""
        runner = ParallelRunner(max_workers=4)
        assert runner.map_ordered(lambda x: x * x, range(50)) == [x * x for x in range(50)]

    def test_sequential_path(self):
        """Test one worker runs on the calling thread"""
        seen = []
        ParallelRunner(max_workers=1).map_ordered(lambda _: seen.append(threading.get_ident()), range(3))
        assert set(seen) == {threading.get_ident()}

    def test_default_workers(self):
        """Test zero means the profile default"""
        runner = ParallelRunner(0, PerformanceProfile(cpu_cores=3, available_ram=0))
        assert runner.max_workers == 3

    def test_negative_workers(self):
        """Test negative worker counts are refused"""
        with pytest.raises(ValueError):
            ParallelRunner(-1)

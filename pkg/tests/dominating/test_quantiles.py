import threading

import numpy as np
import pytest

from stability_arena.dominating import quantiles
from stability_arena.dominating.quantiles import (
    QuantileCache,
    SampleSizeError,
    estimate_quantiles,
    quantile_rank,
    write_quantiles_csv,
)
from stability_arena.dominating.tail import DominatingConfig


def _rng(seed=5):
    return np.random.Generator(np.random.Philox(seed))


class TestEstimateQuantiles:
    def test_rejects_small_samples(self):
        with pytest.raises(SampleSizeError):
            estimate_quantiles(0.0, 10, DominatingConfig(), 99, _rng())

    def test_rank(self):
        assert quantile_rank(0.05, 100) == 95
        assert quantile_rank(0.05, 10_000) == 9500
        assert quantile_rank(0.5, 101) == 51

    def test_starts_at_w0(self):
        q = estimate_quantiles(3.0, 0, DominatingConfig(), 100, _rng())
        assert q.tolist() == [3.0]

    def test_nondecreasing(self):
        q = estimate_quantiles(0.0, 60, DominatingConfig(), 500, _rng())
        assert len(q) == 61
        assert np.all(np.diff(q) >= 0)

    def test_ordered_in_alpha(self):
        strict = estimate_quantiles(0.0, 40, DominatingConfig(alpha=0.05), 500, _rng(1))
        loose = estimate_quantiles(0.0, 40, DominatingConfig(alpha=0.5), 500, _rng(1))
        assert np.all(strict >= loose)

    def test_smaller_delta_bounds_larger_delta(self):
        low = estimate_quantiles(0.0, 80, DominatingConfig(delta=0.01), 2000, _rng(2))
        high = estimate_quantiles(0.0, 80, DominatingConfig(delta=0.05), 2000, _rng(2))
        assert low[-1] >= high[-1]
        assert np.all(low[10:] >= 0.95 * high[10:])

    def test_local_mode_grows_faster(self):
        one = estimate_quantiles(0.0, 40, DominatingConfig(), 500, _rng(3))
        two = estimate_quantiles(0.0, 40, DominatingConfig(), 500, _rng(3), local=True)
        assert two[-1] > one[-1]


class TestQuantileCache:
    def test_reuses_and_extends(self):
        cache = QuantileCache(root_seed=11, n_reps=200)
        cfg = DominatingConfig()
        short = cache.get(cfg, 0.0, 20).copy()
        assert len(cache) == 1
        longer = cache.get(cfg, 0.0, 50)
        assert len(longer) == 51
        # the same stream replayed further keeps its prefix
        assert np.array_equal(longer[:21], short)
        assert np.array_equal(cache.get(cfg, 0.0, 10), short[:11])

    def test_keyed_by_mode_and_level(self):
        cache = QuantileCache(root_seed=11, n_reps=200)
        cfg = DominatingConfig()
        cache.get(cfg, 0.0, 5)
        cache.get(cfg, 0.0, 5, local=True)
        cache.get(cfg, 2.0, 5)
        assert len(cache) == 3

    def test_concurrent_lookups_agree(self):
        cache = QuantileCache(root_seed=4, n_reps=200)
        cfg = DominatingConfig()
        results = []

        def worker():
            results.append(cache.get(cfg, 0.0, 30))

        threads = [threading.Thread(target=worker) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(np.array_equal(r, results[0]) for r in results)
        assert len(cache) == 1

    def test_estimation_does_not_block_other_keys(self, monkeypatch):
        real = quantiles.estimate_quantiles
        started, release = threading.Event(), threading.Event()

        def slow(w0, *args, **kwargs):
            if w0 == 0.0:
                started.set()
                release.wait(10)
            return real(w0, *args, **kwargs)

        monkeypatch.setattr(quantiles, "estimate_quantiles", slow)
        cache = QuantileCache(root_seed=4, n_reps=200)
        cfg = DominatingConfig()
        blocked = threading.Thread(target=cache.get, args=(cfg, 0.0, 10))
        blocked.start()
        try:
            assert started.wait(10)
            assert len(cache.get(cfg, 2.0, 10)) == 11
            assert blocked.is_alive()
        finally:
            release.set()
            blocked.join()
        assert len(cache) == 2

    def test_same_key_is_estimated_once(self, monkeypatch):
        real = quantiles.estimate_quantiles
        started, release = threading.Event(), threading.Event()
        calls = []

        def slow(*args, **kwargs):
            calls.append(1)
            started.set()
            release.wait(10)
            return real(*args, **kwargs)

        monkeypatch.setattr(quantiles, "estimate_quantiles", slow)
        cache = QuantileCache(root_seed=4, n_reps=200)
        cfg = DominatingConfig()
        results = []
        first = threading.Thread(target=lambda: results.append(cache.get(cfg, 0.0, 10)))
        second = threading.Thread(target=lambda: results.append(cache.get(cfg, 0.0, 8)))
        first.start()
        assert started.wait(10)
        second.start()
        release.set()
        first.join()
        second.join()
        assert len(calls) == 1
        assert sorted(len(r) for r in results) == [9, 11]

    def test_failed_estimate_can_be_retried(self, monkeypatch):
        real = quantiles.estimate_quantiles
        calls = []

        def flaky(*args, **kwargs):
            calls.append(1)
            if len(calls) == 1:
                raise RuntimeError("interrupted")
            return real(*args, **kwargs)

        monkeypatch.setattr(quantiles, "estimate_quantiles", flaky)
        cache = QuantileCache(root_seed=4, n_reps=200)
        with pytest.raises(RuntimeError):
            cache.get(DominatingConfig(), 0.0, 5)
        assert len(cache.get(DominatingConfig(), 0.0, 5)) == 6


class TestQuantileCsv:
    def test_one_row_per_step(self, tmp_path):
        q = estimate_quantiles(0.0, 12, DominatingConfig(), 100, _rng())
        lines = write_quantiles_csv(q, tmp_path / "quantiles.csv").read_text().splitlines()
        assert lines[0] == "k,q_alpha"
        assert len(lines) == 13 + 1
        assert lines[1] == "0,0"

"""Monte Carlo quantiles q_k of the dominating process."""
from __future__ import annotations

import csv
import logging
import math
import threading
from concurrent.futures import Future, wait
from pathlib import Path
from typing import Dict, Hashable, Optional, Tuple

import numpy as np

from stability_arena.dominating.sampler import advance_w
from stability_arena.dominating.tail import DominatingConfig
from stability_arena.rng import substream
from stability_arena.utils import fmt_float

__all__ = ["SampleSizeError", "QuantileCache", "estimate_quantiles", "quantile_rank", "MIN_REPS", "QUANTILE_STREAM", "write_quantiles_csv"]

logger = logging.getLogger(__name__)

MIN_REPS = 100
# substream key reserved for W replications
QUANTILE_STREAM = 0x5157


class SampleSizeError(ValueError):
    """Too few W replications to certify a quantile."""


def quantile_rank(alpha: float, n_reps: int) -> int:
    """1-based order statistic used as the (1 - alpha)-quantile."""
    return max(1, math.ceil((1.0 - alpha) * n_reps - 1e-9))


def estimate_quantiles(
    w0: float,
    k_max: int,
    cfg: DominatingConfig,
    n_reps: int,
    rng: np.random.Generator,
    local: bool = False,
) -> np.ndarray:
    """q_0 ... q_{k_max} from ``n_reps`` independent W paths started at ``w0``."""
    if n_reps < MIN_REPS:
        raise SampleSizeError(f"n_reps={n_reps} is below the minimum of {MIN_REPS}")
    if w0 < 0 or k_max < 0:
        raise ValueError(f"need w0 >= 0 and k_max >= 0 (got w0={w0}, k_max={k_max})")
    idx = quantile_rank(cfg.alpha, n_reps) - 1
    w = np.full(n_reps, float(w0))
    q = np.empty(k_max + 1)
    q[0] = w0
    for k in range(1, k_max + 1):
        w = advance_w(w, cfg, rng, local)
        q[k] = np.partition(w, idx)[idx]
        if k % 100_000 == 0:
            logger.info("W quantiles: k=%d/%d q=%.6g", k, k_max, q[k])
    # W is pathwise nondecreasing, so its quantiles are too
    return np.maximum.accumulate(q)


class QuantileCache:
    """Quantile tables shared across replications. Thread-safe.

    A table only depends on the dominating config, w0, the search mode,
    n_reps and the root seed, never on the model. Tables are extended by
    recomputation; a longer table from the same stream keeps its prefix.
    Estimation runs outside the lock: callers asking for a key that is being
    computed wait on its future, other keys proceed.
    """

    def __init__(self, root_seed: int, n_reps: int = 10_000):
        self.root_seed = int(root_seed)
        self.n_reps = int(n_reps)
        self._tables: Dict[Hashable, np.ndarray] = {}
        self._pending: Dict[Hashable, Future] = {}
        self._lock = threading.Lock()

    def _key(self, cfg: DominatingConfig, w0: float, local: bool) -> Tuple:
        return (cfg, float(w0), bool(local), self.n_reps, self.root_seed)

    def get(self, cfg: DominatingConfig, w0: float, k_max: int, local: bool = False) -> np.ndarray:
        key = self._key(cfg, w0, local)
        while True:
            with self._lock:
                table: Optional[np.ndarray] = self._tables.get(key)
                if table is not None and len(table) > k_max:
                    return table[: k_max + 1]
                pending = self._pending.get(key)
                if pending is None:
                    future: Future = Future()
                    self._pending[key] = future
                    break
            # another caller is estimating this key; it may stop short of k_max or fail
            wait((pending,))

        logger.info("estimating W quantiles to k=%d (n_reps=%d, local=%s)", k_max, self.n_reps, local)
        try:
            table = estimate_quantiles(
                w0, k_max, cfg, self.n_reps, substream(self.root_seed, QUANTILE_STREAM), local
            )
        except BaseException as e:
            with self._lock:
                del self._pending[key]
            future.set_exception(e)
            raise
        with self._lock:
            current = self._tables.get(key)
            if current is None or len(current) < len(table):
                self._tables[key] = table
            del self._pending[key]
        future.set_result(table)
        return table

    def __len__(self) -> int:
        with self._lock:
            return len(self._tables)


def write_quantiles_csv(quantiles: np.ndarray, path: Path | str) -> Path:
    """One ``k,q_alpha`` row per step."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "q_alpha"])
        for k, q in enumerate(quantiles):
            w.writerow([k, fmt_float(float(q))])
    return path

"""Seeded replication harness.

A run has three phases. The annealer replications fan out over a process
pool. Quantile tables are then computed once per distinct dominating
setup, to the largest comparison index any replication reached. Verdicts
are finally settled in (sweep, replication) order through the ledger.
Nothing depends on completion order, so the output is the same for any
worker count.
"""
from __future__ import annotations

import json
import logging
import math
import threading
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from stability_arena.dominating.quantiles import QuantileCache
from stability_arena.dominating.tail import check_monotonicity_precondition
from stability_arena.dominating.verdict import Verdict, verdict_for
from stability_arena.engine.annealer import Trajectory, run_annealer
from stability_arena.experiments.config import ExperimentConfig, ExperimentInstance, expand_sweep
from stability_arena.rng import replication_seed
from stability_arena.utils import ensure_dir

__all__ = [
    "SummaryRecord",
    "ReplicationJob",
    "ReplicationLedger",
    "RunResult",
    "run_replications",
    "recount_verdicts",
]

logger = logging.getLogger(__name__)

Key = Tuple[int, int]


@dataclass(frozen=True)
class SummaryRecord:
    sweep_value: Any
    replications: int
    n_unstable: int
    n_failed: int
    proportion: float
    mean_drift_ratio: float
    wall_seconds: float = 0.0

    def __post_init__(self):
        if not 0 <= self.n_unstable <= self.replications:
            raise ValueError(f"n_unstable={self.n_unstable} outside [0, {self.replications}]")


@dataclass(frozen=True)
class ReplicationJob:
    sweep_index: int
    replication_index: int
    instance: ExperimentInstance
    seed: int
    keep_path: bool = False


@dataclass
class ReplicationOutcome:
    sweep_index: int
    replication_index: int
    seed: int
    trajectory: Optional[Trajectory] = None
    error: Optional[str] = None
    seconds: float = 0.0


@dataclass
class LedgerItem:
    key: Key
    status: str = "pending"          # pending | in_progress | completed | failed
    verdict: Optional[Verdict] = None
    error: Optional[str] = None
    seed: Optional[int] = None


class ReplicationLedger:
    """Tracks every (sweep, replication) pair and persists its verdict. Thread-safe."""

    def __init__(
        self,
        keys: Iterable[Key],
        *,
        verdict_dir: Path | str | None = None,
        log_progress: bool = False,
    ):
        self._items: Dict[Key, LedgerItem] = {k: LedgerItem(k) for k in keys}
        self._lock = threading.Lock()
        self._done = 0
        self._verdict_dir = ensure_dir(Path(verdict_dir)) if verdict_dir is not None else None
        self.log_progress = log_progress

    def __len__(self) -> int:
        return len(self._items)

    def pending_count(self) -> int:
        with self._lock:
            return sum(1 for it in self._items.values() if it.status == "pending")

    def completed_count(self) -> int:
        with self._lock:
            return self._done

    def lease(self, key: Key) -> None:
        with self._lock:
            it = self._item(key)
            if it.status != "pending":
                raise RuntimeError(f"Replication {key} not pending (status={it.status})")
            it.status = "in_progress"

    def complete(self, key: Key, verdict: Verdict) -> None:
        self._finish(key, "completed", verdict=verdict)

    def fail(self, key: Key, error: str, seed: Optional[int] = None) -> None:
        self._finish(key, "failed", error=error, seed=seed)

    def _item(self, key: Key) -> LedgerItem:
        it = self._items.get(key)
        if it is None:
            raise ValueError(f"Unknown replication {key}")
        return it

    def _finish(self, key: Key, status: str, *, verdict: Optional[Verdict] = None, error: Optional[str] = None,
                seed: Optional[int] = None) -> None:
        with self._lock:
            it = self._item(key)
            if it.status != "in_progress":
                raise RuntimeError(f"Replication {key} not in progress (status={it.status})")
            it.status, it.verdict, it.error = status, verdict, error
            it.seed = verdict.seed if verdict is not None else seed
            if self._verdict_dir is not None:
                rec = {
                    "sweep_index": key[0],
                    "replication_index": key[1],
                    "status": status,
                    "seed": it.seed,
                    "verdict": verdict.to_dict() if verdict else None,
                    "error": error,
                }
                (self._verdict_dir / f"replication_{key[0]:03d}_{key[1]:05d}.json").write_text(
                    json.dumps(rec, indent=2), encoding="utf-8"
                )
            self._done += 1
            if self.log_progress:
                logger.info("[ledger] %s replication %s (%d/%d)", status, key, self._done, len(self._items))

    def items_for(self, sweep_index: int) -> List[LedgerItem]:
        with self._lock:
            return [it for k, it in sorted(self._items.items()) if k[0] == sweep_index]


@dataclass
class RunResult:
    records: List[SummaryRecord]
    trajectories: Dict[Key, Trajectory] = field(default_factory=dict)
    quantiles: Dict[int, np.ndarray] = field(default_factory=dict)
    ledger: Optional[ReplicationLedger] = None


def _anneal(job: ReplicationJob) -> ReplicationOutcome:
    """Worker entry point; failures come back as text so one bad run cannot sink the pool."""
    start = time.perf_counter()
    inst = job.instance
    out = ReplicationOutcome(job.sweep_index, job.replication_index, job.seed)
    try:
        config = replace(inst.engine, seed=job.seed)
        out.trajectory = run_annealer(inst.model, inst.pset, config, keep_path=job.keep_path)
    except Exception as e:
        out.error = f"{type(e).__name__}: {e}"
        logger.debug("replication %s failed:\n%s", (job.sweep_index, job.replication_index), traceback.format_exc())
    out.seconds = time.perf_counter() - start
    return out


def _jobs(cfg: ExperimentConfig, instances: List[ExperimentInstance], keep_path: bool) -> List[ReplicationJob]:
    return [
        ReplicationJob(s, r, inst, replication_seed(cfg.seed, s, r), keep_path)
        for s, inst in enumerate(instances)
        for r in range(cfg.replications)
    ]


def _execute(jobs: List[ReplicationJob], workers: int) -> Dict[Key, ReplicationOutcome]:
    if workers <= 1:
        outcomes = [_anneal(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_anneal, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return {(o.sweep_index, o.replication_index): o for o in outcomes}


def run_replications(
    cfg: ExperimentConfig,
    *,
    workers: int = 1,
    verdict_dir: Path | str | None = None,
    keep_trajectories: bool = False,
    log_progress: bool = False,
) -> RunResult:
    """R independent instability tests per sweep value, aggregated into summary records."""
    instances = expand_sweep(cfg)
    jobs = _jobs(cfg, instances, keep_trajectories)
    ledger = ReplicationLedger(
        [(j.sweep_index, j.replication_index) for j in jobs], verdict_dir=verdict_dir, log_progress=log_progress
    )
    for inst in instances:
        check_monotonicity_precondition(inst.dominating)

    logger.info("running %d replications over %d sweep value(s) with %d worker(s)", len(jobs), len(instances), workers)
    for j in jobs:
        ledger.lease((j.sweep_index, j.replication_index))
    sweep_started = time.perf_counter()
    outcomes = _execute(jobs, workers)

    # one table per (dominating config, w0, mode), grown to the largest k needed; n_reps is not sweepable
    cache = QuantileCache(cfg.seed, n_reps=instances[0].n_reps if instances else 10_000)
    need: Dict[Tuple, int] = {}
    for (s, _), o in outcomes.items():
        if o.trajectory is not None:
            key = _table_key(instances[s], o.trajectory)
            need[key] = max(need.get(key, 0), o.trajectory.last_k)

    result = RunResult(records=[], ledger=ledger)
    for s, inst in enumerate(instances):
        drift: List[float] = []
        for r in range(cfg.replications):
            o = outcomes[(s, r)]
            if o.trajectory is None:
                ledger.fail((s, r), o.error or "unknown error", seed=o.seed)
                continue
            key = _table_key(inst, o.trajectory)
            dom, w0, local = key
            q = cache.get(dom, w0, need[key], local)
            if s not in result.quantiles or len(q) > len(result.quantiles[s]):
                result.quantiles[s] = q
            verdict = verdict_for(o.trajectory, q, dom, inst.engine.k_star, o.seed)
            ledger.complete((s, r), verdict)
            if not math.isnan(verdict.drift_ratio):
                drift.append(verdict.drift_ratio)
            if keep_trajectories:
                result.trajectories[(s, r)] = o.trajectory
        result.records.append(_summarise(inst.sweep_value, ledger.items_for(s), drift,
                                         sum(outcomes[(s, r)].seconds for r in range(cfg.replications))))
    logger.info("finished in %.1fs", time.perf_counter() - sweep_started)
    return result


def _table_key(inst: ExperimentInstance, trajectory: Trajectory) -> Tuple:
    return (inst.dominating, float(trajectory.meta["f_initial"]), inst.engine.algorithm == "local")


def _summarise(sweep_value: Any, items: List[LedgerItem], drift: List[float], seconds: float) -> SummaryRecord:
    n = len(items)
    n_unstable = sum(1 for it in items if it.verdict is not None and it.verdict.unstable)
    n_failed = sum(1 for it in items if it.status == "failed")
    return SummaryRecord(
        sweep_value=sweep_value,
        replications=n,
        n_unstable=n_unstable,
        n_failed=n_failed,
        proportion=n_unstable / n if n else 0.0,
        mean_drift_ratio=float(np.mean(drift)) if drift else float("nan"),
        wall_seconds=seconds,
    )


def recount_verdicts(verdict_dir: Path | str) -> Dict[int, Tuple[int, int]]:
    """Re-derive (n_unstable, n_total) per sweep index from the persisted verdict files."""
    counts: Dict[int, List[int]] = {}
    for path in sorted(Path(verdict_dir).glob("replication_*.json")):
        rec = json.loads(path.read_text(encoding="utf-8"))
        c = counts.setdefault(int(rec["sweep_index"]), [0, 0])
        c[1] += 1
        if rec["verdict"] is not None and rec["verdict"]["decision"] == "unstable":
            c[0] += 1
    return {s: (u, n) for s, (u, n) in sorted(counts.items())}

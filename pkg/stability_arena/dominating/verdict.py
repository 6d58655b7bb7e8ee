"""The instability hypothesis test: compare f(Y_k) with q_k of the dominating process."""
from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Literal, Optional

import numpy as np

from stability_arena.dominating.quantiles import QuantileCache
from stability_arena.dominating.tail import DominatingConfig, check_monotonicity_precondition, w_star
from stability_arena.engine.annealer import EngineConfig, Trajectory, run_annealer
from stability_arena.engine.params import ParameterSet
from stability_arena.models.base import ChainModel
from stability_arena.rng import Streams
from stability_arena.utils import fmt_float

__all__ = ["Verdict", "verdict_for", "instability_test", "write_verdict_csv", "VERDICT_HEADER"]

logger = logging.getLogger(__name__)

VERDICT_HEADER = ["decision", "k", "f_Y", "q", "alpha", "k_star", "seed"]

Decision = Literal["unstable", "not-rejected"]


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    k_compare: int
    f_value: float
    quantile: float
    alpha: float
    k_star: int
    seed: int = 0
    w_star: float = float("nan")
    drift_ratio: float = float("nan")

    def __post_init__(self):
        expected = "unstable" if self.f_value > self.quantile else "not-rejected"
        if self.decision != expected:
            raise ValueError(
                f"decision {self.decision!r} contradicts f={self.f_value} vs q={self.quantile}"
            )

    @property
    def unstable(self) -> bool:
        return self.decision == "unstable"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Verdict":
        return cls(**data)


def verdict_for(
    trajectory: Trajectory,
    quantiles: np.ndarray,
    dom_cfg: DominatingConfig,
    k_star: int,
    seed: int = 0,
) -> Verdict:
    """Verdict at the last recorded iteration of ``trajectory``."""
    k = trajectory.last_k
    if len(quantiles) <= k:
        raise ValueError(f"quantile table stops at k={len(quantiles) - 1}, need k={k}")
    f_value = float(trajectory.f_y[-1])
    q = float(quantiles[k])
    t = trajectory.t[-1]
    return Verdict(
        decision="unstable" if f_value > q else "not-rejected",
        k_compare=k,
        f_value=f_value,
        quantile=q,
        alpha=dom_cfg.alpha,
        k_star=k_star,
        seed=seed,
        w_star=w_star(dom_cfg),
        drift_ratio=f_value / t if t > 0 else float("nan"),
    )


def instability_test(
    model: ChainModel,
    pset: ParameterSet,
    engine_cfg: EngineConfig,
    dom_cfg: DominatingConfig,
    *,
    n_reps: int = 10_000,
    streams: Optional[Streams] = None,
    cache: Optional[QuantileCache] = None,
    keep_path: bool = False,
) -> tuple[Verdict, Trajectory]:
    """Run the annealer to budget exhaustion and test f(Y_k) > q_k.

    W starts at f(Y_0). Under local search each W step adds two
    independent increments. The quantile stream is derived from
    ``engine_cfg.seed`` unless a shared ``cache`` is passed.
    """
    if engine_cfg.tau != dom_cfg.tau:
        raise ValueError(f"engine and dominating configs disagree on tau: {engine_cfg.tau} vs {dom_cfg.tau}")
    check_monotonicity_precondition(dom_cfg)

    traj = run_annealer(model, pset, engine_cfg, streams=streams, keep_path=keep_path)
    cache = cache or QuantileCache(engine_cfg.seed, n_reps)
    local = engine_cfg.algorithm == "local"
    q = cache.get(dom_cfg, traj.meta["f_initial"], traj.last_k, local)
    verdict = verdict_for(traj, q, dom_cfg, engine_cfg.k_star, engine_cfg.seed)
    logger.debug(
        "%s: k=%d f=%.6g q=%.6g -> %s", model.model_id, verdict.k_compare, verdict.f_value,
        verdict.quantile, verdict.decision,
    )
    return verdict, traj


def write_verdict_csv(verdict: Verdict, path: Path | str) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(VERDICT_HEADER)
        w.writerow([
            verdict.decision, verdict.k_compare, fmt_float(verdict.f_value), fmt_float(verdict.quantile),
            fmt_float(verdict.alpha), verdict.k_star, verdict.seed,
        ])
    return path

"""The annealing search over (chain state, parameter) pairs.

Each iteration spends tau(Y_{k-1}) embedded steps simulating a proposed
parameter from the current chain state and keeps or discards the result by
a Metropolis comparison of Lyapunov values. Global search proposes from the
whole set; local search proposes from the current grid neighborhood and
compares against a fresh run under the current parameter.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Generic, List, Literal, Optional, Tuple, TypeVar

from stability_arena.engine.params import ParameterSet, Point
from stability_arena.engine.schedule import TauSchedule, metropolis_accept, tau_of
from stability_arena.models.base import ChainModel
from stability_arena.rng import Streams
from stability_arena.utils import fmt_float

__all__ = [
    "EngineConfig",
    "EngineError",
    "AnnealerState",
    "Trajectory",
    "global_step",
    "local_step",
    "run_annealer",
    "drift_ratio",
]

logger = logging.getLogger(__name__)

S = TypeVar("S")


class EngineError(RuntimeError):
    """A model step failed while the annealer was driving it."""


@dataclass(frozen=True)
class EngineConfig:
    eta: float = 0.01
    tau: TauSchedule = field(default_factory=TauSchedule)
    algorithm: Literal["global", "local"] = "global"
    seed: int = 0
    k_star: int = 1_000_000

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive (got {self.eta})")
        if self.k_star < 1:
            raise ValueError(f"k_star must be >= 1 (got {self.k_star})")
        if self.algorithm not in ("global", "local"):
            raise ValueError(f"Unknown algorithm: {self.algorithm}")


@dataclass(frozen=True)
class AnnealerState(Generic[S]):
    y: S
    lam: Point
    k: int = 0
    t: int = 0
    accepted: bool = False


@dataclass
class Trajectory:
    """Column store of (k, T_k, f(Y_k), Lambda_k, accepted) plus run metadata.

    With ``keep_path=False`` only the latest record is retained; counts and
    metadata are still exact.
    """
    t: List[int] = field(default_factory=list)
    f_y: List[float] = field(default_factory=list)
    lam: List[Point] = field(default_factory=list)
    accepted: List[bool] = field(default_factory=list)
    start_k: int = 0
    meta: Dict[str, Any] = field(default_factory=dict)
    final: Optional[AnnealerState] = None

    def append(self, state: AnnealerState, f_value: float, keep_path: bool = True) -> None:
        if not keep_path and self.t:
            for column in (self.t, self.f_y, self.lam, self.accepted):
                column.clear()
            self.start_k = state.k
        self.t.append(state.t)
        self.f_y.append(f_value)
        self.lam.append(state.lam)
        self.accepted.append(state.accepted)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def k(self) -> List[int]:
        return list(range(self.start_k, self.start_k + len(self.t)))

    @property
    def last_k(self) -> int:
        return self.start_k + len(self.t) - 1

    def rows(self):
        for i, (t, fy, lam, acc) in enumerate(zip(self.t, self.f_y, self.lam, self.accepted)):
            yield (self.start_k + i, t, fy, lam, acc)

    def to_csv(self, path: Path | str) -> Path:
        path = Path(path)
        dim = len(self.lam[0]) if self.lam else 0
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "T_k", "f_Y", *(f"lambda_{i + 1}" for i in range(dim)), "accepted"])
            for k, t, fy, lam, acc in self.rows():
                w.writerow([k, t, fmt_float(fy), *(fmt_float(v) for v in lam), int(acc)])
        return path


def _advance(model: ChainModel, y, lam: Point, n: int, rng) -> Any:
    try:
        return model.run(y, lam, n, rng)
    except Exception as e:
        raise EngineError(f"{model.model_id} failed to step from {y!r} under {lam}: {e}") from e


def global_step(
    state: AnnealerState,
    model: ChainModel,
    pset: ParameterSet,
    config: EngineConfig,
    rng: Streams,
) -> AnnealerState:
    """One iteration of global search: propose gamma ~ Uniform(L)."""
    f_x = model.f(state.y)
    tau = tau_of(config.tau, f_x)
    gamma = pset.sample(rng.control)
    y = _advance(model, state.y, gamma, tau, rng.candidate)
    if metropolis_accept(model.f(y), f_x, config.eta, rng.control.random()):
        return AnnealerState(y, gamma, state.k + 1, state.t + tau, True)
    return AnnealerState(state.y, state.lam, state.k + 1, state.t + tau, False)


def local_step(
    state: AnnealerState,
    model: ChainModel,
    pset: ParameterSet,
    config: EngineConfig,
    rng: Streams,
) -> AnnealerState:
    """One iteration of local search: propose gamma ~ Uniform(B_lambda).

    Both branches start from Y_{k-1} and run tau(Y_{k-1}) steps on
    independent streams; T_k is charged tau once.
    """
    if pset.kind != "grid":
        raise ValueError("local search requires a grid parameter set")
    tau = tau_of(config.tau, model.f(state.y))
    gamma = pset.sample_neighbor(state.lam, rng.control)
    x_prime = _advance(model, state.y, state.lam, tau, rng.incumbent)
    y = _advance(model, state.y, gamma, tau, rng.candidate)
    if metropolis_accept(model.f(y), model.f(x_prime), config.eta, rng.control.random()):
        return AnnealerState(y, gamma, state.k + 1, state.t + tau, True)
    return AnnealerState(x_prime, state.lam, state.k + 1, state.t + tau, False)


def run_annealer(
    model: ChainModel,
    pset: ParameterSet,
    config: EngineConfig,
    initial_y: Any = None,
    initial_lambda: Optional[Point] = None,
    *,
    streams: Optional[Streams] = None,
    keep_path: bool = True,
) -> Trajectory:
    """Iterate until the next iteration would push T_k past k*.

    ``initial_y`` defaults to the model's initial state and
    ``initial_lambda`` to a uniform draw from the set. The run is a pure
    function of ``config.seed`` (or of ``streams`` when given).
    """
    streams = streams or Streams.from_seed(config.seed)
    if initial_y is None:
        initial_y = model.initial_state()
    if initial_lambda is None:
        initial_lambda = pset.sample(streams.control)
    initial_lambda = tuple(float(v) for v in initial_lambda)
    if not pset.contains(initial_lambda):
        raise ValueError(f"initial parameter {initial_lambda} is not in the parameter set")
    if len(initial_lambda) != model.param_dim():
        raise ValueError(f"{model.model_id} takes {model.param_dim()} parameters, got {len(initial_lambda)}")

    step = local_step if config.algorithm == "local" else global_step
    branches = 2 if config.algorithm == "local" else 1

    state = AnnealerState(initial_y, initial_lambda)
    f_y = model.f(state.y)
    traj = Trajectory()
    traj.append(state, f_y)
    n_accepted = 0
    while state.t + tau_of(config.tau, f_y) <= config.k_star:
        state = step(state, model, pset, config, streams)
        f_y = model.f(state.y)
        n_accepted += state.accepted
        traj.append(state, f_y, keep_path)

    traj.final = state
    traj.meta = {
        "model": model.model_id,
        "algorithm": config.algorithm,
        "seed": config.seed,
        "k_star": config.k_star,
        "iterations": state.k,
        "accepted": n_accepted,
        "simulated_steps": branches * state.t,
        "f_initial": model.f(initial_y),
    }
    logger.debug("annealer stopped at k=%d T_k=%d f=%s", state.k, state.t, f_y)
    return traj


def drift_ratio(trajectory: Trajectory) -> List[Tuple[int, float]]:
    """(k, f(Y_k) / T_k) for every recorded k >= 1."""
    if not len(trajectory):
        raise ValueError("empty trajectory")
    return [(k, fy / t) for k, t, fy, _, _ in trajectory.rows() if k >= 1 and t > 0]

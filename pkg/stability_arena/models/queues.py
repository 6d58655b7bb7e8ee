"""Discrete-time slotted queues: the single queue and LQF parallel queues."""
from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Sequence, Tuple

import numpy as np

from stability_arena.models.base import ChainModel

__all__ = ["SimpleQueue", "ParallelQueues", "simple_queue_step", "parallel_step", "parallel_critical_rate"]


def simple_queue_step(x: int, p: float, rng, service_prob: float = 0.5) -> int:
    """Arrival with probability p, then a service with probability 0.5 if nonempty."""
    x += rng.random() < p
    if rng.random() < service_prob and x > 0:
        x -= 1
    return x


def parallel_step(
    x: Tuple[int, ...],
    p: float,
    rng,
    connect_prob: float = 0.8,
    service_prob: float = 0.8,
) -> Tuple[int, ...]:
    """Per-queue arrivals, random connectivity, then LQF service among connected queues.

    Ties between equally long queues go to the lowest index.
    """
    q = np.asarray(x, dtype=np.int64) + (rng.random(len(x)) < p)
    connected = rng.random(len(x)) < connect_prob
    eligible = connected & (q > 0)
    if eligible.any() and rng.random() < service_prob:
        q[int(np.argmax(np.where(eligible, q, -1)))] -= 1
    return tuple(int(v) for v in q)


def parallel_critical_rate(n_queues: int, connect_prob: float = 0.8, service_prob: float = 0.8) -> float:
    """Largest stable per-queue arrival probability under LQF.

    With the default constants this is (4/5) * (1 - (1/5)**N) / N.
    """
    if n_queues < 1:
        raise ValueError(f"n_queues must be >= 1 (got {n_queues})")
    return service_prob * (1.0 - (1.0 - connect_prob) ** n_queues) / n_queues


@dataclass(frozen=True)
class SimpleQueue(ChainModel[int]):
    model_id: ClassVar[str] = "simple-queue"
    description: ClassVar[str] = "single slotted queue, Bernoulli(p) arrivals, Bernoulli(0.5) service"
    param_bounds: ClassVar[Tuple[Tuple[float, float], ...]] = ((0.0, 1.0),)

    service_prob: float = 0.5

    def initial_state(self) -> int:
        return 0

    def step(self, state: int, lam: Sequence[float], rng) -> int:
        return simple_queue_step(state, lam[0], rng, self.service_prob)

    def run(self, state: int, lam: Sequence[float], n_steps: int, rng) -> int:
        # bulk draws in the same order step() consumes them
        draws = rng.random((n_steps, 2))
        arrivals = (draws[:, 0] < lam[0]).tolist()
        services = (draws[:, 1] < self.service_prob).tolist()
        x = state
        for a, s in zip(arrivals, services):
            x += a
            if s and x > 0:
                x -= 1
        return x

    def f(self, state: int) -> float:
        return float(state)

    def phi_f(self) -> float:
        return 1.0


@dataclass(frozen=True)
class ParallelQueues(ChainModel[Tuple[int, ...]]):
    model_id: ClassVar[str] = "parallel"
    description: ClassVar[str] = "N parallel queues, random connectivity, longest-connected-queue-first server"
    param_bounds: ClassVar[Tuple[Tuple[float, float], ...]] = ((0.0, 1.0),)

    n_queues: int = 4
    connect_prob: float = 0.8
    service_prob: float = 0.8

    def __post_init__(self):
        if self.n_queues < 1:
            raise ValueError(f"n_queues must be >= 1 (got {self.n_queues})")

    def initial_state(self) -> Tuple[int, ...]:
        return (0,) * self.n_queues

    def step(self, state, lam, rng):
        return parallel_step(state, lam[0], rng, self.connect_prob, self.service_prob)

    def f(self, state) -> float:
        return float(sum(state))

    def phi_f(self) -> float:
        return float(self.n_queues)

    def critical_rate(self) -> float:
        return parallel_critical_rate(self.n_queues, self.connect_prob, self.service_prob)

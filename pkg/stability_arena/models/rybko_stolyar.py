"""Two-station, two-class network with preemptive priority to second-stage jobs.

State (x11, x12, x21, x22): class c at stage s. Class 1 visits left then
right; class 2 visits right then left. Service at a station is Exp with
rate mu_l (left) or mu_r (right); the searched parameter is mu_l.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Sequence, Tuple

from stability_arena.models.base import ChainModel, pick_event

__all__ = ["RybkoStolyar", "rybko_stolyar_step"]

State = Tuple[int, int, int, int]

ARRIVE_1, ARRIVE_2, LEFT, RIGHT = range(4)


def rybko_stolyar_step(x: State, params: Sequence[float], rng) -> State:
    """One embedded jump; ``params`` is (arrival rate, mu_l, mu_r)."""
    lam, mu_l, mu_r = params
    x11, x12, x21, x22 = x
    rates = (
        lam,
        lam,
        mu_l if (x22 > 0 or x11 > 0) else 0.0,
        mu_r if (x12 > 0 or x21 > 0) else 0.0,
    )
    event = pick_event(rates, rng)
    if event == ARRIVE_1:
        x11 += 1
    elif event == ARRIVE_2:
        x21 += 1
    elif event == LEFT:
        if x22 > 0:
            x22 -= 1
        else:
            x11, x12 = x11 - 1, x12 + 1
    elif event == RIGHT:
        if x12 > 0:
            x12 -= 1
        else:
            x21, x22 = x21 - 1, x22 + 1
    return (x11, x12, x21, x22)


@dataclass(frozen=True)
class RybkoStolyar(ChainModel[State]):
    model_id: ClassVar[str] = "rybko-stolyar"
    description: ClassVar[str] = "two-class two-station priority network, parameter is the left service rate mu_l"
    param_bounds: ClassVar[Tuple[Tuple[float, float], ...]] = ((0.0, math.inf),)

    arrival_rate: float = 1.0
    mu_r: float = 4.0

    def initial_state(self) -> State:
        return (0, 0, 0, 0)

    def step(self, state, lam, rng):
        return rybko_stolyar_step(state, (self.arrival_rate, lam[0], self.mu_r), rng)

    def f(self, state) -> float:
        return float(sum(state))

    def phi_f(self) -> float:
        return 1.0

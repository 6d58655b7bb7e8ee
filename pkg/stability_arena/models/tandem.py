"""Two stations in tandem, observed through their embedded jump chains.

``TandemMM1`` is the Markov system (Poisson arrivals, exponential services
with means mu_1, mu_2). ``TandemRenewal`` keeps residual clocks in its
state: Erlang interarrivals with mean 1 and Weibull(shape 2) services with
scales mu_1, mu_2. Clocks already running when the parameter changes keep
their residual time; new service times use the parameter in force.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Sequence, Tuple

from stability_arena.models.base import ChainModel, pick_event

__all__ = ["TandemMM1", "TandemRenewal", "RenewalState", "tandem_mm1_step", "tandem_renewal_step"]


def _rate(mean: float) -> float:
    return math.inf if mean <= 0.0 else 1.0 / mean


def tandem_mm1_step(x: Tuple[int, int], mu: Sequence[float], rng, arrival_rate: float = 1.0) -> Tuple[int, int]:
    x1, x2 = x
    rates = (
        arrival_rate,
        _rate(mu[0]) if x1 > 0 else 0.0,
        _rate(mu[1]) if x2 > 0 else 0.0,
    )
    event = pick_event(rates, rng)
    if event == 0:
        return (x1 + 1, x2)
    if event == 1:
        return (x1 - 1, x2 + 1)
    if event == 2:
        return (x1, x2 - 1)
    return x


@dataclass(frozen=True)
class RenewalState:
    x: Tuple[int, int]
    # residual times: (next arrival, station-1 completion, station-2 completion); inf when idle
    clocks: Tuple[float, float, float]


def _interarrival(rng, shape: int, mean: float) -> float:
    # Erlang(shape) with per-stage rate shape/mean, so the mean is exactly ``mean``
    return float(rng.gamma(shape, mean / shape))


def _service(rng, scale: float, shape: float) -> float:
    return float(scale * rng.weibull(shape))


def tandem_renewal_step(
    state: RenewalState,
    mu: Sequence[float],
    rng,
    erlang_shape: int = 2,
    interarrival_mean: float = 1.0,
    weibull_shape: float = 2.0,
) -> RenewalState:
    (x1, x2), (a, s1, s2) = state.x, state.clocks
    if math.isnan(a):
        a = _interarrival(rng, erlang_shape, interarrival_mean)
    dt = min(a, s1, s2)
    a, s1, s2 = a - dt, s1 - dt, s2 - dt
    # ties resolve arrival first, then station 1, then station 2
    if a <= 0.0:
        x1 += 1
        a = _interarrival(rng, erlang_shape, interarrival_mean)
        if x1 == 1:
            s1 = _service(rng, mu[0], weibull_shape)
    elif s1 <= 0.0:
        x1, x2 = x1 - 1, x2 + 1
        s1 = _service(rng, mu[0], weibull_shape) if x1 > 0 else math.inf
        if x2 == 1:
            s2 = _service(rng, mu[1], weibull_shape)
    else:
        x2 -= 1
        s2 = _service(rng, mu[1], weibull_shape) if x2 > 0 else math.inf
    return RenewalState((x1, x2), (a, s1, s2))


@dataclass(frozen=True)
class TandemMM1(ChainModel[Tuple[int, int]]):
    model_id: ClassVar[str] = "tandem-mm1"
    description: ClassVar[str] = "tandem M/M/1 stations, parameters are the mean service times (mu_1, mu_2)"
    param_bounds: ClassVar[Tuple[Tuple[float, float], ...]] = ((0.0, math.inf), (0.0, math.inf))

    arrival_rate: float = 1.0

    def initial_state(self) -> Tuple[int, int]:
        return (0, 0)

    def step(self, state, lam, rng):
        return tandem_mm1_step(state, lam, rng, self.arrival_rate)

    def f(self, state) -> float:
        return float(state[0] + state[1])

    def phi_f(self) -> float:
        return 1.0


@dataclass(frozen=True)
class TandemRenewal(ChainModel[RenewalState]):
    model_id: ClassVar[str] = "tandem-renewal"
    description: ClassVar[str] = "tandem stations, Erlang(2) interarrivals, Weibull(2) services with scales (mu_1, mu_2)"
    param_bounds: ClassVar[Tuple[Tuple[float, float], ...]] = ((0.0, math.inf), (0.0, math.inf))

    erlang_shape: int = 2
    interarrival_mean: float = 1.0
    weibull_shape: float = 2.0

    def initial_state(self) -> RenewalState:
        # the arrival clock is drawn on the first step
        return RenewalState((0, 0), (math.nan, math.inf, math.inf))

    def step(self, state, lam, rng):
        return tandem_renewal_step(state, lam, rng, self.erlang_shape, self.interarrival_mean, self.weibull_shape)

    def f(self, state: RenewalState) -> float:
        return float(state.x[0] + state.x[1])

    def phi_f(self) -> float:
        return 1.0

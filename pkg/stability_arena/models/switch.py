"""A network of input-queued switches served longest-queue-first.

Four main switches A-D each hold 10 external input queues and 2 internal
input queues; four auxiliary switches A'-D' each hold one input queue on
the cross-link from main switch s to s+1. The reference network draws
three queues per auxiliary switch, but 40 external plus 8 internal queues
leave exactly 4 coordinates of the 52-dimensional state, so only the one
queue on the routed cross-link is kept; the route table is a stand-in for
the unpublished one. Queue layout in the 52-vector:

  0..39   external queue j of main switch s at 10*s + j
  40..47  internal queue i of main switch s at 40 + 2*s + i
  48..51  auxiliary switch s at 48 + s

Routes (indices mod 4):
  external (s, j<5)  -> auxiliary s -> internal (s+1, 0) -> leaves
  external (s, j>=5) -> internal (s+2, 1) -> leaves

Every switch forwards one packet per slot from its longest nonempty queue
(lowest index on ties). Forwarded packets are only eligible from the next
slot on.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Dict, List, Optional, Tuple

import numpy as np

from stability_arena.models.base import ChainModel

__all__ = ["SwitchNetwork", "switch_step", "N_QUEUES", "N_EXTERNAL", "SWITCH_QUEUES", "ROUTES"]

N_MAIN = 4
N_EXTERNAL = 40
N_QUEUES = 52


def _external(s: int, j: int) -> int:
    return 10 * s + j


def _internal(s: int, i: int) -> int:
    return N_EXTERNAL + 2 * (s % N_MAIN) + i


def _aux(s: int) -> int:
    return 48 + s % N_MAIN


def _build_layout() -> Tuple[List[List[int]], Dict[int, Optional[int]]]:
    switches: List[List[int]] = []
    routes: Dict[int, Optional[int]] = {}
    for s in range(N_MAIN):
        queues = [_external(s, j) for j in range(10)] + [_internal(s, 0), _internal(s, 1)]
        switches.append(queues)
        for j in range(10):
            routes[_external(s, j)] = _aux(s) if j < 5 else _internal(s + 2, 1)
        routes[_internal(s, 0)] = None
        routes[_internal(s, 1)] = None
    for s in range(N_MAIN):
        switches.append([_aux(s)])
        routes[_aux(s)] = _internal(s + 1, 0)
    return switches, routes


SWITCH_QUEUES, ROUTES = _build_layout()


def switch_step(x: Tuple[int, ...], r: float, rng, divisor: float = 30.0) -> Tuple[int, ...]:
    q = np.asarray(x, dtype=np.int64)
    q[:N_EXTERNAL] += rng.random(N_EXTERNAL) < (r / divisor)
    incoming = np.zeros(N_QUEUES, dtype=np.int64)
    for queues in SWITCH_QUEUES:
        lengths = q[queues]
        best = int(np.argmax(lengths))
        if lengths[best] == 0:
            continue
        src = queues[best]
        q[src] -= 1
        dst = ROUTES[src]
        if dst is not None:
            incoming[dst] += 1
    return tuple(int(v) for v in q + incoming)


@dataclass(frozen=True)
class SwitchNetwork(ChainModel[Tuple[int, ...]]):
    model_id: ClassVar[str] = "switch"
    description: ClassVar[str] = "8 input-queued switches on 52 queues, LQF, Bernoulli(r/30) external arrivals"
    param_bounds: ClassVar[Tuple[Tuple[float, float], ...]] = ((0.0, 30.0),)

    arrival_divisor: float = 30.0

    def initial_state(self) -> Tuple[int, ...]:
        return (0,) * N_QUEUES

    def step(self, state, lam, rng):
        return switch_step(state, lam[0], rng, self.arrival_divisor)

    def f(self, state) -> float:
        return float(sum(state))

    def phi_f(self) -> float:
        # at most one arrival per external queue; forwards conserve, exits only decrease
        return float(N_EXTERNAL)

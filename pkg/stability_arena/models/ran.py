"""Queue-based random access on a six-node interference graph.

State is (x, u): packet counts and the activity vector. Transitions follow
four rows: arrivals at rate lambda_i; activation at rate nu_i * phi(x_i)
when node i is idle, nonempty and no neighbor is active; completion
keeping the medium at rate mu_i * (1 - psi(x_i)); completion releasing it
at rate mu_i * psi(x_i). Here phi(x) = 1{x >= 1}, psi(1) = 1 and
psi(x) = (1 + x)^-2 beyond. Arrival rates are lambda_i = rho * kappa_i * mu_i.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar, FrozenSet, List, Sequence, Tuple

from stability_arena.models.base import ChainModel, pick_event

__all__ = ["RandomAccessNetwork", "RanState", "CorruptStateError", "ran_step", "EDGES", "psi"]

N_NODES = 6

# nodes are 0-based here; two triangles sharing the edge 2-5 plus the 2-3-4-5 chain
EDGES: FrozenSet[Tuple[int, int]] = frozenset(
    {(0, 2), (0, 5), (1, 2), (1, 5), (2, 5), (2, 3), (3, 4), (4, 5)}
)


class CorruptStateError(ValueError):
    """Two interfering nodes are active at once."""


def _neighbors() -> List[Tuple[int, ...]]:
    out: List[List[int]] = [[] for _ in range(N_NODES)]
    for a, b in EDGES:
        out[a].append(b)
        out[b].append(a)
    return [tuple(sorted(n)) for n in out]


NEIGHBORS = _neighbors()


def psi(x: int) -> float:
    return 1.0 if x <= 1 else (1.0 + x) ** -2


@dataclass(frozen=True)
class RanState:
    x: Tuple[int, ...]
    u: Tuple[int, ...]


def _check(state: RanState) -> None:
    for a, b in EDGES:
        if state.u[a] and state.u[b]:
            raise CorruptStateError(f"adjacent nodes {a + 1} and {b + 1} are both active in {state}")
    for i in range(N_NODES):
        if state.u[i] and state.x[i] < 1:
            raise CorruptStateError(f"node {i + 1} is active with an empty queue in {state}")


def ran_step(
    state: RanState,
    arrival: Sequence[float],
    nu: Sequence[float],
    mu: Sequence[float],
    rng,
) -> RanState:
    _check(state)
    x, u = list(state.x), list(state.u)
    rates: List[float] = []
    for i in range(N_NODES):
        blocked = any(u[j] for j in NEIGHBORS[i])
        active = u[i] == 1 and x[i] >= 1
        rates += [
            arrival[i],
            nu[i] if (x[i] > 0 and u[i] == 0 and not blocked) else 0.0,
            mu[i] * (1.0 - psi(x[i])) if active else 0.0,
            mu[i] * psi(x[i]) if active else 0.0,
        ]
    event = pick_event(rates, rng)
    if event < 0:
        return state
    i, kind = divmod(event, 4)
    if kind == 0:
        x[i] += 1
    elif kind == 1:
        u[i] = 1
    elif kind == 2:
        x[i] -= 1
    else:
        x[i] -= 1
        u[i] = 0
    return RanState(tuple(x), tuple(u))


@dataclass(frozen=True)
class RandomAccessNetwork(ChainModel[RanState]):
    model_id: ClassVar[str] = "ran"
    description: ClassVar[str] = "six-node random access network, parameter is the load scale rho"
    param_bounds: ClassVar[Tuple[Tuple[float, float], ...]] = ((0.0, 10.0),)

    kappa: Tuple[float, ...] = (0.4, 0.4, 0.4, 0.4, 0.2, 0.2)
    alpha_split: float = 0.0
    nu: Tuple[float, ...] = field(default=(1.0,) * N_NODES)
    mu: Tuple[float, ...] = field(default=(1.0,) * N_NODES)

    def __post_init__(self):
        for name in ("kappa", "nu", "mu"):
            value = tuple(float(v) for v in getattr(self, name))
            if len(value) != N_NODES or min(value) < 0:
                raise ValueError(f"{name} must hold {N_NODES} nonnegative values (got {value})")
            object.__setattr__(self, name, value)

    def relative_load(self) -> Tuple[float, ...]:
        # entries 4 and 5 default to kappa_3 and kappa_6, each reduced by the split
        k1, k2, k3, k4, k5, k6 = self.kappa
        a = self.alpha_split
        return (k1, k2, k3, k4 - a, k5 - a, k6)

    def initial_state(self) -> RanState:
        return RanState((0,) * N_NODES, (0,) * N_NODES)

    def step(self, state, lam, rng):
        arrival = [lam[0] * k * m for k, m in zip(self.relative_load(), self.mu)]
        return ran_step(state, arrival, self.nu, self.mu, rng)

    def f(self, state: RanState) -> float:
        return float(sum(state.x))

    def phi_f(self) -> float:
        return 1.0

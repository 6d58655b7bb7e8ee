"""The black-box chain interface the annealer drives."""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import fields
from typing import Any, ClassVar, Dict, Generic, Sequence, Tuple, TypeVar

import numpy as np

__all__ = ["ChainModel", "pick_event"]

S = TypeVar("S")


class ChainModel(ABC, Generic[S]):
    """One member X^(lambda) of a parameterized family of chains.

    Subclasses are frozen dataclasses whose fields are the model's fixed
    constants; the searched parameter point is passed to ``step``.
    """
    model_id: ClassVar[str]
    description: ClassVar[str] = ""
    # (low, high) per parameter coordinate; high may be math.inf
    param_bounds: ClassVar[Tuple[Tuple[float, float], ...]]

    @abstractmethod
    def initial_state(self) -> S: ...

    @abstractmethod
    def step(self, state: S, lam: Sequence[float], rng: np.random.Generator) -> S: ...

    @abstractmethod
    def f(self, state: S) -> float: ...

    @abstractmethod
    def phi_f(self) -> float: ...

    def param_dim(self) -> int:
        return len(self.param_bounds)

    def run(self, state: S, lam: Sequence[float], n_steps: int, rng: np.random.Generator) -> S:
        """Advance ``n_steps`` embedded steps."""
        for _ in range(n_steps):
            state = self.step(state, lam, rng)
        return state

    def constants(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}  # type: ignore[arg-type]


def pick_event(rates: Sequence[float], rng: np.random.Generator) -> int:
    """Index of the next jump of a CTMC given its enabled rates; -1 when none is enabled.

    Infinite rates fire first, split evenly among themselves.
    """
    infinite = [i for i, r in enumerate(rates) if math.isinf(r)]
    if infinite:
        return infinite[int(rng.integers(0, len(infinite)))]
    total = float(sum(rates))
    if total <= 0.0:
        return -1
    target = rng.random() * total
    acc = 0.0
    last = -1
    for i, r in enumerate(rates):
        if r <= 0.0:
            continue
        acc += r
        last = i
        if target < acc:
            return i
    return last

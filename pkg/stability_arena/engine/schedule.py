from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["TauSchedule", "tau_of", "metropolis_accept", "acceptance_probability"]


@dataclass(frozen=True)
class TauSchedule:
    """Per-iteration simulation budget tau(x) = c * f(x) + d."""
    c: float = 0.5
    d: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and self.d > 0):
            raise ValueError(f"TauSchedule needs c > 0 and d > 0 (got c={self.c}, d={self.d})")

    def value(self, f_value: float) -> float:
        """Real-valued tau, as used by the dominating process."""
        return self.c * f_value + self.d


def tau_of(schedule: TauSchedule, f_value: float) -> int:
    """Number of embedded steps to run from a state with Lyapunov value ``f_value``."""
    if f_value < 0:
        raise ValueError(f"f_value must be nonnegative (got {f_value})")
    return max(1, math.ceil(schedule.value(f_value)))


def acceptance_probability(f_candidate: float, f_incumbent: float, eta: float) -> float:
    return math.exp(eta * min(0.0, f_candidate - f_incumbent))


def metropolis_accept(f_candidate: float, f_incumbent: float, eta: float, u: float) -> bool:
    # exp(0) == 1 and u < 1, so improvements are always taken
    return u < acceptance_probability(f_candidate, f_incumbent, eta)

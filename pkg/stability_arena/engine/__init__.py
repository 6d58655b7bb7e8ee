from stability_arena.engine.annealer import (
    AnnealerState,
    EngineConfig,
    EngineError,
    Trajectory,
    drift_ratio,
    global_step,
    local_step,
    run_annealer,
)
from stability_arena.engine.params import ParameterSet
from stability_arena.engine.schedule import TauSchedule, metropolis_accept, tau_of

__all__ = [
    "AnnealerState",
    "EngineConfig",
    "EngineError",
    "ParameterSet",
    "TauSchedule",
    "Trajectory",
    "drift_ratio",
    "global_step",
    "local_step",
    "metropolis_accept",
    "run_annealer",
    "tau_of",
]

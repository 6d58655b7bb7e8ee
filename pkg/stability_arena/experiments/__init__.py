from stability_arena.experiments.config import (
    ConfigError,
    ExperimentConfig,
    ExperimentInstance,
    apply_full_scale,
    expand_sweep,
    load_experiment_config,
    parse_config,
    with_seed,
)
from stability_arena.experiments.outputs import emit_outputs
from stability_arena.experiments.runner import (
    ReplicationLedger,
    RunResult,
    SummaryRecord,
    recount_verdicts,
    run_replications,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentInstance",
    "ReplicationLedger",
    "RunResult",
    "SummaryRecord",
    "apply_full_scale",
    "emit_outputs",
    "expand_sweep",
    "load_experiment_config",
    "parse_config",
    "recount_verdicts",
    "run_replications",
    "with_seed",
]

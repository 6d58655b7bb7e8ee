from stability_arena.dominating.quantiles import (
    QuantileCache,
    SampleSizeError,
    estimate_quantiles,
    write_quantiles_csv,
)
from stability_arena.dominating.sampler import WPath, sample_z, sample_z_batch, simulate_w
from stability_arena.dominating.tail import (
    DominatingConfig,
    ZCoefficients,
    check_monotonicity_precondition,
    w_star,
    z_coefficients,
    z_max,
    z_tail,
    z_tail_monotone,
)
from stability_arena.dominating.verdict import Verdict, instability_test, verdict_for, write_verdict_csv

__all__ = [
    "DominatingConfig",
    "QuantileCache",
    "SampleSizeError",
    "Verdict",
    "WPath",
    "ZCoefficients",
    "check_monotonicity_precondition",
    "estimate_quantiles",
    "instability_test",
    "sample_z",
    "sample_z_batch",
    "simulate_w",
    "verdict_for",
    "w_star",
    "write_quantiles_csv",
    "write_verdict_csv",
    "z_coefficients",
    "z_max",
    "z_tail",
    "z_tail_monotone",
]

# stability_arena/cli.py
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

from stability_arena.dominating.quantiles import (
    QUANTILE_STREAM,
    SampleSizeError,
    estimate_quantiles,
    write_quantiles_csv,
)
from stability_arena.experiments.config import (
    ConfigError,
    REGISTRY_PATH,
    apply_full_scale,
    expand_sweep,
    load_experiment_config,
    load_registry,
    with_seed,
)
from stability_arena.experiments.outputs import emit_outputs
from stability_arena.experiments.runner import run_replications
from stability_arena.models.registry import MODEL_REGISTRY, make_model
from stability_arena.rng import substream
from stability_arena.utils import ensure_dir

logger = logging.getLogger("stability_arena")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _load(args: argparse.Namespace):
    cfg = load_experiment_config(args.config, registry_path=Path(args.registry))
    if getattr(args, "full_scale", False):
        cfg = apply_full_scale(cfg)
    if getattr(args, "seed", None) is not None:
        cfg = with_seed(cfg, args.seed)
    return cfg


# -----------------
# Subcommand impls
# -----------------
def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _load(args)
    out = ensure_dir(Path(args.out))
    print(f"Running '{cfg.model_id}' ({cfg.replications} replications, seed {cfg.seed}) → {out}")
    workers = args.workers if args.workers is not None else cfg.workers
    emit = args.emit_trajectories or cfg.emit_trajectories
    result = run_replications(
        cfg,
        workers=workers,
        verdict_dir=out / "verdicts",
        keep_trajectories=emit,
        log_progress=args.verbose,
    )
    emit_outputs(result, cfg, out, trajectories=emit)
    for r in result.records:
        failed = f", {r.n_failed} failed" if r.n_failed else ""
        print(f"  {cfg.sweep_key or 'value'}={r.sweep_value}: {r.n_unstable}/{r.replications} unstable "
              f"(proportion {r.proportion:.3f}{failed})")
    return EXIT_OK


def _cmd_quantiles(args: argparse.Namespace) -> int:
    if args.k_max < 0:
        raise ConfigError("--k-max", f"must be >= 0 (got {args.k_max})")
    cfg = _load(args)
    instances = expand_sweep(cfg)
    if not instances:
        raise ConfigError("sweep.values", "no sweep values to take the dominating setup from")
    inst = instances[0]
    w0 = inst.model.f(inst.model.initial_state())
    rng = substream(cfg.seed, QUANTILE_STREAM)
    q = estimate_quantiles(w0, args.k_max, inst.dominating, inst.n_reps, rng, local=inst.engine.algorithm == "local")
    path = write_quantiles_csv(q, ensure_dir(Path(args.out)) / "quantiles.csv")
    print(f"Wrote {len(q)} quantiles (alpha={inst.dominating.alpha}, w0={w0:g}) → {path}")
    return EXIT_OK


def _cmd_models(args: argparse.Namespace) -> int:
    print("Available models:")
    for mid, cls in MODEL_REGISTRY.items():
        model = make_model(mid)
        bounds = ", ".join(f"[{lo:g}, {'inf' if math.isinf(hi) else f'{hi:g}'}]" for lo, hi in cls.param_bounds)
        print(f"  {mid}: {cls.description}")
        print(f"      dim={model.param_dim()} bounds={bounds} phi_f={model.phi_f():g}")
        consts = ", ".join(f"{k}={v}" for k, v in model.constants().items())
        if consts:
            print(f"      overrides: {consts}")
    if Path(args.registry).exists():
        print("Presets:")
        for pid, ref in load_registry(Path(args.registry)).items():
            print(f"  {pid} → {ref}")
    return EXIT_OK


# -------------
# Argparse CLI
# -------------
def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", help="Config file path or preset id from configs/registry.json (e.g. 'fig5').")
    p.add_argument("--out", default="results", help="Output directory (default: ./results)")
    p.add_argument("--seed", type=int, help="Override engine.seed, the root seed of every substream.")
    p.add_argument("--full-scale", action="store_true", help="Apply the preset's full_scale block.")
    p.add_argument("--verbose", "-v", action="store_true", help="Debug logging and ledger progress lines.")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="arena",
        description="Stability Arena CLI: annealing-based instability tests for Markov chain families.",
    )
    p.add_argument("--registry", default=str(REGISTRY_PATH), help="Preset registry (default: configs/registry.json)")
    sub = p.add_subparsers(dest="cmd", required=True)

    # run
    pr = sub.add_parser(
        "run",
        help="Run seeded replications of the instability test and write CSV artifacts.",
        description="Runs R replications per sweep value; writes summary.csv, timings.csv, manifest.json.",
    )
    _add_config_args(pr)
    pr.add_argument("--workers", type=int, help="Worker processes (default: output.workers of the config).")
    pr.add_argument("--emit-trajectories", action="store_true",
                    help="Also write trajectory_<i>.csv per replication and the quantile tables.")
    pr.set_defaults(func=_cmd_run)

    # quantiles
    pq = sub.add_parser(
        "quantiles",
        help="Estimate a standalone q_k table of the dominating process.",
        description="Uses the config's dominating section and model (for w0 = f(Y_0)).",
    )
    _add_config_args(pq)
    pq.add_argument("--k-max", type=int, required=True, help="Last index of the table.")
    pq.set_defaults(func=_cmd_quantiles)

    # models
    pm = sub.add_parser("models", help="List the model gallery and presets.")
    pm.set_defaults(func=_cmd_models)

    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, SampleSizeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:
        logger.debug("run failed", exc_info=True)
        print(f"runtime error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())

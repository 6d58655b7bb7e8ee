from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from stability_arena import __version__
from stability_arena.dominating.quantiles import write_quantiles_csv
from stability_arena.experiments.config import ExperimentConfig
from stability_arena.experiments.runner import RunResult, SummaryRecord
from stability_arena.utils import ensure_dir, fmt_float

__all__ = ["SUMMARY_HEADER", "emit_outputs", "write_summary_csv", "write_manifest"]

# wall-clock time goes to timings.csv so summary.csv stays reproducible byte for byte
SUMMARY_HEADER = ["sweep_value", "R", "n_unstable", "n_failed", "proportion", "mean_drift_ratio"]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(v) for v in value)
    if isinstance(value, float):
        return fmt_float(value)
    return str(value)


def write_summary_csv(records: Sequence[SummaryRecord], path: Path | str) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_HEADER)
        for r in records:
            w.writerow([
                _cell(r.sweep_value), r.replications, r.n_unstable, r.n_failed,
                fmt_float(r.proportion), fmt_float(r.mean_drift_ratio),
            ])
    return path


def write_timings_csv(records: Sequence[SummaryRecord], path: Path | str) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["sweep_value", "wall_seconds"])
        for r in records:
            w.writerow([_cell(r.sweep_value), f"{r.wall_seconds:.3f}"])
    return path


def write_manifest(cfg: ExperimentConfig, path: Path | str, extra: Optional[Dict[str, Any]] = None) -> Path:
    """The normalised config plus a ``provenance`` block; loadable as a config itself."""
    doc = cfg.to_document()
    doc["provenance"] = {"package": "stability_arena", "version": __version__, "root_seed": cfg.seed, **(extra or {})}
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8")
    return path


def emit_outputs(
    result: RunResult,
    cfg: ExperimentConfig,
    out_dir: Path | str,
    *,
    trajectories: bool = False,
) -> List[Path]:
    """Write summary.csv, timings.csv and manifest.json, plus trajectories and quantile tables on request."""
    out = ensure_dir(Path(out_dir))
    written = [
        write_summary_csv(result.records, out / "summary.csv"),
        write_timings_csv(result.records, out / "timings.csv"),
        write_manifest(cfg, out / "manifest.json"),
    ]
    if trajectories:
        for i, (_, traj) in enumerate(sorted(result.trajectories.items())):
            written.append(traj.to_csv(out / f"trajectory_{i}.csv"))
        written += _write_quantiles(result.quantiles, out)
    return written


def _write_quantiles(tables: Dict[int, np.ndarray], out: Path) -> List[Path]:
    if len(tables) == 1:
        (table,) = tables.values()
        return [write_quantiles_csv(table, out / "quantiles.csv")]
    return [write_quantiles_csv(q, out / f"quantiles_{s}.csv") for s, q in sorted(tables.items())]

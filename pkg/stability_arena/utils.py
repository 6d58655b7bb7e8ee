from __future__ import annotations
from pathlib import Path

def ensure_dir(p: Path) -> Path:
    p.mkdir(parents=True, exist_ok=True)
    return p

def fmt_float(x: float) -> str:
    # 17 significant digits round-trips any double
    return format(float(x), ".17g")

"""Model gallery lookup by string id."""
from __future__ import annotations

from dataclasses import fields
from typing import Any, Dict, Mapping, Optional, Type

from stability_arena.models.base import ChainModel
from stability_arena.models.queues import ParallelQueues, SimpleQueue
from stability_arena.models.ran import RandomAccessNetwork
from stability_arena.models.rybko_stolyar import RybkoStolyar
from stability_arena.models.switch import SwitchNetwork
from stability_arena.models.tandem import TandemMM1, TandemRenewal

__all__ = ["MODEL_REGISTRY", "make_model", "model_ids", "override_keys"]

MODEL_REGISTRY: Dict[str, Type[ChainModel]] = {
    cls.model_id: cls
    for cls in (
        SimpleQueue,
        ParallelQueues,
        TandemMM1,
        TandemRenewal,
        RybkoStolyar,
        SwitchNetwork,
        RandomAccessNetwork,
    )
}


def model_ids() -> list[str]:
    return list(MODEL_REGISTRY)


def override_keys(model_id: str) -> list[str]:
    return [f.name for f in fields(MODEL_REGISTRY[model_id])]


def make_model(model_id: str, overrides: Optional[Mapping[str, Any]] = None) -> ChainModel:
    cls = MODEL_REGISTRY.get(model_id)
    if cls is None:
        raise ValueError(f"Unknown model '{model_id}'. Available: {', '.join(MODEL_REGISTRY)}")
    overrides = dict(overrides or {})
    unknown = sorted(set(overrides) - set(override_keys(model_id)))
    if unknown:
        raise ValueError(f"Unknown override(s) for {model_id}: {', '.join(unknown)}")
    for key, value in overrides.items():
        if isinstance(value, list):
            overrides[key] = tuple(value)
    return cls(**overrides)

from stability_arena.models.base import ChainModel
from stability_arena.models.queues import ParallelQueues, SimpleQueue, parallel_critical_rate
from stability_arena.models.ran import CorruptStateError, RandomAccessNetwork
from stability_arena.models.registry import MODEL_REGISTRY, make_model, model_ids
from stability_arena.models.rybko_stolyar import RybkoStolyar
from stability_arena.models.switch import SwitchNetwork
from stability_arena.models.tandem import TandemMM1, TandemRenewal

__all__ = [
    "ChainModel",
    "CorruptStateError",
    "MODEL_REGISTRY",
    "ParallelQueues",
    "RandomAccessNetwork",
    "RybkoStolyar",
    "SimpleQueue",
    "SwitchNetwork",
    "TandemMM1",
    "TandemRenewal",
    "make_model",
    "model_ids",
    "parallel_critical_rate",
]

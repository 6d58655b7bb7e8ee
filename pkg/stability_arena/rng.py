"""Seeded random substreams.

Every stream is a Philox (counter-based) generator keyed by a
``SeedSequence``. The same root seed and key tuple always reproduce the
same stream, independent of how many workers run or in what order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["substream", "Streams", "replication_seed"]


def _generator(seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seq))


def substream(root_seed: int, *keys: int) -> np.random.Generator:
    """Return the generator for ``(root_seed, *keys)``."""
    return _generator(np.random.SeedSequence([int(root_seed), *(int(k) for k in keys)]))


def replication_seed(root_seed: int, sweep_index: int, replication_index: int) -> int:
    """Hash ``(root, sweep, replication)`` into a 64-bit seed.

    External tools can reproduce a single replication by feeding the
    returned value to ``Streams.from_seed``.
    """
    seq = np.random.SeedSequence([int(root_seed), int(sweep_index), int(replication_index)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass
class Streams:
    """Independent generators for one annealer run.

    control:   parameter proposals and Metropolis uniforms
    incumbent: the trajectory under the current parameter (local search)
    candidate: the trajectory under the proposed parameter
    """
    control: np.random.Generator
    incumbent: np.random.Generator
    candidate: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int, *keys: int) -> "Streams":
        children = np.random.SeedSequence([int(seed), *(int(k) for k in keys)]).spawn(3)
        return cls(*(_generator(c) for c in children))

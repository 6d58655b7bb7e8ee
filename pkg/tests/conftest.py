from __future__ import annotations

from typing import Iterable, List

import numpy as np
import pytest


class StubRng:
    """Generator stand-in that replays scripted uniforms.

    ``random()`` pops one value, ``random(n)`` pops n. ``integers`` maps the
    next uniform onto the range so scripted runs can steer choices too.
    """

    def __init__(self, values: Iterable[float]):
        self._values: List[float] = list(values)
        self.calls = 0

    def _pop(self) -> float:
        if not self._values:
            raise AssertionError("StubRng ran out of scripted values")
        self.calls += 1
        return self._values.pop(0)

    def random(self, size=None):
        if size is None:
            return self._pop()
        n = int(np.prod(size))
        return np.array([self._pop() for _ in range(n)]).reshape(size)

    def integers(self, low, high=None):
        if high is None:
            low, high = 0, low
        return low + int(self._pop() * (high - low))


@pytest.fixture
def stub_rng():
    return StubRng


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))

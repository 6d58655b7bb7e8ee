"""Parameter sets searched by the annealer.

A ``box`` is a continuous axis-aligned region sampled uniformly (global
search). A ``grid`` is the finite lattice ``lower + h * j`` inside the box
with axis-adjacent neighborhoods of radius ``r_nbhd`` (local search).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence, Tuple

import numpy as np

__all__ = ["ParameterSet", "Point"]

Point = Tuple[float, ...]

_GRID_TOL = 1e-9


@dataclass(frozen=True)
class ParameterSet:
    kind: Literal["box", "grid"]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    h: float = 0.01
    r_nbhd: int = 1

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if self.kind not in ("box", "grid"):
            raise ValueError(f"Unknown parameter set kind: {self.kind}")
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("lower and upper must be nonempty and of equal length")
        # a zero-width coordinate pins that parameter; the sampler then returns it unchanged
        for i, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if lo > hi:
                raise ValueError(f"lower[{i}]={lo} exceeds upper[{i}]={hi}")
        if self.kind == "grid":
            if not self.h > 0:
                raise ValueError(f"grid resolution h must be positive (got {self.h})")
            if self.r_nbhd < 1:
                raise ValueError(f"r_nbhd must be >= 1 (got {self.r_nbhd})")

    @classmethod
    def box(cls, lower: Sequence[float], upper: Sequence[float]) -> "ParameterSet":
        return cls("box", tuple(lower), tuple(upper))

    @classmethod
    def grid(cls, lower: Sequence[float], upper: Sequence[float], h: float, r_nbhd: int = 1) -> "ParameterSet":
        return cls("grid", tuple(lower), tuple(upper), h=h, r_nbhd=r_nbhd)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.upper, self.lower)))

    # ---------- grid geometry ----------
    def cells(self) -> Tuple[int, ...]:
        """Largest index per coordinate (number of grid points minus one)."""
        return tuple(int(np.floor((hi - lo) / self.h + _GRID_TOL)) for lo, hi in zip(self.lower, self.upper))

    def index_of(self, point: Point) -> Tuple[int, ...]:
        return tuple(int(round((p - lo) / self.h)) for p, lo in zip(point, self.lower))

    def point_at(self, index: Sequence[int]) -> Point:
        return tuple(lo + self.h * j for lo, j in zip(self.lower, index))

    def neighborhood(self, point: Point) -> list[Point]:
        """B_lambda: the point itself plus up to ``r_nbhd`` steps along each single axis, clipped."""
        if self.kind != "grid":
            raise ValueError("neighborhoods are only defined for grid parameter sets")
        idx = self.index_of(point)
        top = self.cells()
        out = [self.point_at(idx)]
        for axis in range(self.dim):
            for offset in range(-self.r_nbhd, self.r_nbhd + 1):
                j = idx[axis] + offset
                if offset == 0 or j < 0 or j > top[axis]:
                    continue
                moved = list(idx)
                moved[axis] = j
                out.append(self.point_at(moved))
        return sorted(out)

    # ---------- membership and sampling ----------
    def contains(self, point: Point) -> bool:
        if len(point) != self.dim:
            return False
        inside = all(lo - _GRID_TOL <= p <= hi + _GRID_TOL for p, lo, hi in zip(point, self.lower, self.upper))
        if not inside or self.kind == "box":
            return inside
        return all(abs((p - lo) / self.h - round((p - lo) / self.h)) < 1e-6 for p, lo in zip(point, self.lower))

    def sample(self, rng: np.random.Generator) -> Point:
        """Uniform draw from the whole set."""
        if self.kind == "box":
            return tuple(float(v) for v in rng.uniform(self.lower, self.upper))
        idx = [int(rng.integers(0, top + 1)) for top in self.cells()]
        return self.point_at(idx)

    def sample_neighbor(self, point: Point, rng: np.random.Generator) -> Point:
        nbhd = self.neighborhood(point)
        return nbhd[int(rng.integers(0, len(nbhd)))]

"""Inverse-transform sampling of Z(w) and simulation of W_k = W_{k-1} + Z(W_{k-1})."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from stability_arena.dominating.tail import (
    TAIL_FLOOR,
    DominatingConfig,
    coefficient_arrays,
    tail_profile,
)

__all__ = ["WPath", "sample_z", "sample_z_batch", "simulate_w", "advance_w"]

# below this the second Gaussian term is dropped and Z(w) is inverted in closed form
_NEGLIGIBLE = 1e-13
_LOG_FLOOR = math.log(1.0 / TAIL_FLOOR)
_GRID = 2048
_CHUNK = 512
_TOL = 1e-9


@dataclass(frozen=True)
class WPath:
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)


def sample_z(w: float, cfg: DominatingConfig, u: float) -> float:
    """Smallest z >= 0 whose monotone tail at level w is at most u."""
    if not 0.0 < u <= 1.0:
        raise ValueError(f"u must lie in (0, 1] (got {u})")
    return tail_profile(float(w), cfg).inverse(u)


def sample_z_batch(w: np.ndarray, cfg: DominatingConfig, u: np.ndarray) -> np.ndarray:
    """Vectorised ``sample_z`` over paired levels and uniforms.

    Levels where the second Gaussian term is negligible and the first peaks
    at z <= 0 are inverted in closed form. The rest share a per-row z-grid:
    the running minimum locates the grid cell where the envelope crosses u,
    and bisection inside that cell pins the crossing.
    """
    w = np.asarray(w, dtype=float)
    u = np.asarray(u, dtype=float)
    n, a1, a2, a3, a4 = coefficient_arrays(w, cfg)
    second = n * np.exp(-(a3**2) / (2 * a4))
    fast = (a1 <= 0) & (a3 <= 0) & (second <= _NEGLIGIBLE)

    out = np.empty_like(w)
    # min(1, exp(-(z - a1)^2 / (2 a2))) = u  =>  z = a1 + sqrt(2 a2 log(1/u)), clipped to [0, z_max]
    z = a1[fast] + np.sqrt(2 * a2[fast] * -np.log(u[fast]))
    z_cap = a1[fast] + np.sqrt(2 * a2[fast] * _LOG_FLOOR)
    out[fast] = np.clip(z, 0.0, np.maximum(z_cap, 0.0))

    slow = np.nonzero(~fast)[0]
    for start in range(0, slow.size, _CHUNK):
        rows = slow[start:start + _CHUNK]
        out[rows] = _invert_on_grid(u[rows], n[rows], a1[rows], a2[rows], a3[rows], a4[rows])
    return out


def _expr(z, n, a1, a2, a3, a4):
    v = np.exp(-((z - a1) ** 2) / (2 * a2)) + n * np.exp(-((z - a3) ** 2) / (2 * a4))
    return np.minimum(1.0, v)


def _invert_on_grid(u, n, a1, a2, a3, a4) -> np.ndarray:
    c = lambda x: x[:, None]  # noqa: E731
    # past this point each Gaussian term is below the tail floor
    z_cap = np.maximum.reduce([
        np.zeros_like(u),
        a1 + np.sqrt(2 * a2 * _LOG_FLOOR),
        a3 + np.sqrt(2 * a4 * (_LOG_FLOOR + np.log(n))),
    ])
    step = z_cap / (_GRID - 1)
    grid = c(step) * np.arange(_GRID)
    env = np.minimum.accumulate(_expr(grid, c(n), c(a1), c(a2), c(a3), c(a4)), axis=1)
    crossed = env <= c(u)
    j = np.argmax(crossed, axis=1)
    never = ~crossed[np.arange(len(u)), j]

    lo = np.maximum(j - 1, 0) * step
    hi = j * step
    while np.any(hi - lo > _TOL):
        mid = 0.5 * (lo + hi)
        below = _expr(mid, n, a1, a2, a3, a4) <= u
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return np.where(never, z_cap, np.where(j == 0, 0.0, hi))


def _uniforms(rng: np.random.Generator, size: int) -> np.ndarray:
    # (0, 1]: a zero draw would otherwise map to an infinite increment
    return 1.0 - rng.random(size)


def advance_w(w: np.ndarray, cfg: DominatingConfig, rng: np.random.Generator, local: bool = False) -> np.ndarray:
    """One W transition for every entry of ``w``; two independent increments under local search."""
    z = sample_z_batch(w, cfg, _uniforms(rng, w.size))
    if local:
        z = z + sample_z_batch(w, cfg, _uniforms(rng, w.size))
    return w + z


def simulate_w(
    w0: float,
    k_max: int,
    cfg: DominatingConfig,
    rng: np.random.Generator,
    local: bool = False,
) -> WPath:
    if w0 < 0 or k_max < 0:
        raise ValueError(f"need w0 >= 0 and k_max >= 0 (got w0={w0}, k_max={k_max})")
    values = np.empty(k_max + 1)
    values[0] = w0
    w = np.array([float(w0)])
    for k in range(1, k_max + 1):
        w = advance_w(w, cfg, rng, local)
        values[k] = w[0]
    return WPath(values)

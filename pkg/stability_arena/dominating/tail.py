"""Level-dependent tail bound for the increments of f(Y_k).

For a level w the increment bound Z(w) has survival function

    P(Z(w) >= z) = min(1, exp(-(z - a1)^2 / (2 a2)) + n exp(-(z - a3)^2 / (2 a4)))   for z > 0
                 = 1                                                                 for z <= 0

with n = n(w) the smallest integer such that sigma * n >= tau(w) and

    a1 = sigma phi - sigma n delta      a2 = (phi + delta)^2 sigma^2 n
    a3 = sigma phi - w + kappa          a4 = phi^2 sigma^2 n

Below w* one of the Gaussian peaks sits at positive z and the expression
is not a survival function; ``TailProfile`` computes its running minimum
in z, which is.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from stability_arena.engine.schedule import TauSchedule

__all__ = [
    "DominatingConfig",
    "ZCoefficients",
    "TailProfile",
    "z_coefficients",
    "coefficient_arrays",
    "z_tail",
    "z_tail_monotone",
    "z_max",
    "tail_profile",
    "w_star",
    "check_monotonicity_precondition",
    "TAIL_FLOOR",
]

logger = logging.getLogger(__name__)

# the Z support is truncated where the tail drops below this
TAIL_FLOOR = 1e-12


@dataclass(frozen=True)
class DominatingConfig:
    delta: float = 0.05
    sigma: int = 1
    kappa: float = 1.0
    phi: float = 1.0
    tau: TauSchedule = field(default_factory=TauSchedule)
    alpha: float = 0.05

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive (got {self.delta})")
        if int(self.sigma) != self.sigma or self.sigma < 1:
            raise ValueError(f"sigma must be a positive integer (got {self.sigma})")
        if self.kappa < 0:
            raise ValueError(f"kappa must be nonnegative (got {self.kappa})")
        if not self.phi > 0:
            raise ValueError(f"phi must be positive (got {self.phi})")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1) (got {self.alpha})")


@dataclass(frozen=True)
class ZCoefficients:
    n: int
    a1: float
    a2: float
    a3: float
    a4: float


def _n_of(w: float, cfg: DominatingConfig) -> int:
    return max(1, math.ceil(cfg.tau.value(w) / cfg.sigma - 1e-12))


def z_coefficients(w: float, cfg: DominatingConfig) -> ZCoefficients:
    if w < 0:
        raise ValueError(f"level w must be nonnegative (got {w})")
    n = _n_of(w, cfg)
    s, phi, delta = cfg.sigma, cfg.phi, cfg.delta
    return ZCoefficients(
        n=n,
        a1=s * phi - s * n * delta,
        a2=(phi + delta) ** 2 * s**2 * n,
        a3=s * phi - w + cfg.kappa,
        a4=phi**2 * s**2 * n,
    )


def coefficient_arrays(w: np.ndarray, cfg: DominatingConfig) -> Tuple[np.ndarray, ...]:
    """Vectorised ``z_coefficients``: returns (n, a1, a2, a3, a4) arrays."""
    s, phi, delta = cfg.sigma, cfg.phi, cfg.delta
    n = np.maximum(1.0, np.ceil((cfg.tau.c * w + cfg.tau.d) / s - 1e-12))
    return (
        n,
        s * phi - s * n * delta,
        (phi + delta) ** 2 * s**2 * n,
        s * phi - w + cfg.kappa,
        phi**2 * s**2 * n,
    )


def _expression(z, co: ZCoefficients):
    """The two-Gaussian expression capped at 1, without the z <= 0 branch."""
    v = np.exp(-((z - co.a1) ** 2) / (2 * co.a2)) + co.n * np.exp(-((z - co.a3) ** 2) / (2 * co.a4))
    return np.minimum(1.0, v)


def _tail(z, co: ZCoefficients):
    z = np.asarray(z, dtype=float)
    return np.where(z > 0, _expression(z, co), 1.0)


def z_tail(w: float, z: float, cfg: DominatingConfig) -> float:
    return float(_tail(z, z_coefficients(w, cfg)))


class TailProfile:
    """Running minimum in z of the tail expression at a fixed level w.

    Left of min(a1, a3) both Gaussian terms increase, right of max(a1, a3)
    both decrease, so the running minimum only needs care in between. That
    stretch is scanned on a grid whose size adapts to the Gaussian widths;
    every local minimum found is refined and kept as a knot, so between
    knots the running minimum is attained at an endpoint.
    """

    def __init__(self, w: float, cfg: DominatingConfig):
        self.w = float(w)
        self.co = co = z_coefficients(w, cfg)
        self.g0 = float(_expression(0.0, co))
        self.lo = max(0.0, min(co.a1, co.a3))
        self.hi = max(co.a1, co.a3)
        self.knots: list[float] = []
        self.prefix: np.ndarray = np.empty(0)
        if self.hi > 0:
            self._scan()
        self.z_max = self._find_z_max()

    def _scan(self) -> None:
        co = self.co
        if self.hi - self.lo <= 1e-12:
            self.knots = [self.hi]
            self.prefix = np.array([float(_expression(self.hi, co))])
            return
        width = min(math.sqrt(co.a2), math.sqrt(co.a4))
        size = int(np.clip(math.ceil((self.hi - self.lo) / (0.02 * width)), 64, 4096)) + 1
        grid = np.linspace(self.lo, self.hi, size)
        vals = _expression(grid, co)
        knots = list(zip(grid.tolist(), vals.tolist()))
        v, left, right = vals[1:-1], vals[:-2], vals[2:]
        # plateaus at the cap are not minima
        dips = (v <= left) & (v <= right) & ((v < left) | (v < right)) & (v < 1.0)
        interior = np.nonzero(dips)[0] + 1
        for i in interior:
            res = minimize_scalar(
                lambda z: float(_expression(z, co)),
                bounds=(grid[i - 1], grid[i + 1]),
                method="bounded",
                options={"xatol": 1e-12},
            )
            knots.append((float(res.x), float(res.fun)))
        knots.sort()
        self.knots = [z for z, _ in knots]
        self.prefix = np.minimum.accumulate([v for _, v in knots])

    def _find_z_max(self) -> float:
        start = max(self.hi, 0.0)
        g = lambda z: float(_expression(z, self.co)) - TAIL_FLOOR  # noqa: E731
        if g(start) < 0:
            return start
        step = max(1.0, math.sqrt(self.co.a2) + math.sqrt(self.co.a4))
        left, right = start, start + step
        while g(right) >= 0:
            left, right = right, right + 2 * (right - start)
        return float(brentq(g, left, right, xtol=1e-12))

    def survival(self, z):
        """P(Z(w) >= z) after monotonisation; accepts scalars or arrays."""
        z = np.asarray(z, dtype=float)
        out = np.minimum(self.g0, _expression(z, self.co))
        if self.knots:
            j = np.searchsorted(self.knots, np.minimum(z, self.hi), side="right") - 1
            inside = j >= 0
            out = np.where(inside, np.minimum(out, self.prefix[np.maximum(j, 0)]), out)
        out = np.where(z > 0, out, 1.0)
        return float(out) if out.ndim == 0 else out

    def inverse(self, u):
        """Smallest z >= 0 with survival(z) <= u, to within 1e-9; capped at z_max."""
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 0
        u = np.atleast_1d(u)
        lo = np.zeros_like(u)
        hi = np.full_like(u, self.z_max)
        while np.any(hi - lo > 1e-9):
            mid = 0.5 * (lo + hi)
            below = np.asarray(self.survival(mid)) <= u
            hi = np.where(below, mid, hi)
            lo = np.where(below, lo, mid)
        out = np.where(self.g0 <= u, 0.0, hi)
        return float(out[0]) if scalar else out


@lru_cache(maxsize=2048)
def tail_profile(w: float, cfg: DominatingConfig) -> TailProfile:
    return TailProfile(w, cfg)


def z_tail_monotone(w: float, z: float, cfg: DominatingConfig) -> float:
    return float(tail_profile(float(w), cfg).survival(z))


def z_max(w: float, cfg: DominatingConfig) -> float:
    return tail_profile(float(w), cfg).z_max


def w_star(cfg: DominatingConfig) -> float:
    """Infimum of the levels where a1(w) <= 0 and a3(w) <= 0."""
    s, c, d = cfg.sigma, cfg.tau.c, cfg.tau.d
    n_needed = math.ceil(cfg.phi / cfg.delta - 1e-12)
    w_a1 = max(0.0, ((n_needed - 1) * s - d) / c)
    w_a3 = s * cfg.phi + cfg.kappa
    return max(w_a1, w_a3)


def check_monotonicity_precondition(cfg: DominatingConfig) -> bool:
    """True when n(w) <= w holds from w* on; logs a warning otherwise."""
    ws = max(w_star(cfg), 1.0)
    ok = cfg.tau.c / cfg.sigma < 1 and _n_of(ws, cfg) <= ws
    if not ok:
        logger.warning(
            "tail monotonicity in w is not guaranteed: needs n(w) <= w beyond w*=%.6g (c/sigma=%.6g)",
            ws, cfg.tau.c / cfg.sigma,
        )
    logger.debug("w*=%.6g for %s", w_star(cfg), cfg)
    return ok

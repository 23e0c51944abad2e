#!/usr/bin/env python3
"""
norms.py - Discrete functional norms on the torus

L^p norms at the collocation points, spectral Sobolev norms H^s for any real
s (integer |k| weights), and a discrete BMO seminorm swept over periodic balls.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, List, Optional, Tuple

import numpy as np

from errors import ParameterError
from settings import worker_count
from spectral import Grid, PhysicalField, SpectralField, gradient

logger = logging.getLogger(__name__)

RADIUS_TOL = 1e-12
# Gather block size (center count x ball size) for one BMO work item.
BMO_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class BmoConfig:
    """Ball radii (fractions of the domain side) and center subsampling stride."""

    radii: Tuple[float, ...] = field(default_factory=tuple)
    center_stride: int = 4

    def __post_init__(self):
        radii = tuple(sorted(set(float(r) for r in self.radii)))
        object.__setattr__(self, "radii", radii)
        if int(self.center_stride) != self.center_stride or self.center_stride < 1:
            raise ParameterError(f"center_stride must be a positive integer, got {self.center_stride!r}")

    @classmethod
    def default(cls, grid: Grid, center_stride: int = 4) -> "BmoConfig":
        """Doubling radii 2h, 4h, ..., 1/2."""
        radii = []
        r = 2 * grid.h
        while r <= 0.5 + RADIUS_TOL:
            radii.append(r)
            r *= 2
        return cls(tuple(radii), min(center_stride, grid.n))

    @classmethod
    def exhaustive(cls, grid: Grid) -> "BmoConfig":
        """Every center and every radius 2h, 3h, ..., 1/2."""
        return cls(tuple(m * grid.h for m in range(2, grid.n // 2 + 1)), 1)

    def validate(self, grid: Grid) -> None:
        if not self.radii:
            raise ParameterError("BMO radii list is empty")
        lo, hi = 2 * grid.h, 0.5
        for r in self.radii:
            if r < lo - RADIUS_TOL or r > hi + RADIUS_TOL:
                raise ParameterError(f"BMO radius {r} outside [{lo}, {hi}] for n={grid.n}")
        if grid.n % self.center_stride != 0:
            raise ParameterError(f"center_stride {self.center_stride} does not divide n={grid.n}")

    def to_dict(self) -> dict:
        return {"radii": list(self.radii), "center_stride": int(self.center_stride)}


# ═══════════════════════════════════════════════════════════════════════════════
# L^p and Sobolev norms
# ═══════════════════════════════════════════════════════════════════════════════

def lp_norm(f: PhysicalField, p: float) -> float:
    """(h^2 sum |f|^p)^(1/p), or the collocation max for p = inf."""
    if not p >= 1:
        raise ParameterError(f"lp_norm needs p >= 1, got {p}")
    a = np.abs(f.values)
    if math.isinf(p):
        return float(a.max())
    if p == 1:
        return float(a.mean())
    if p == 2:
        return float(np.sqrt(np.mean(a * a)))
    return float(np.mean(a ** p) ** (1.0 / p))


def sobolev_norm(w: SpectralField, s: float) -> float:
    """|w|_{H^s} = sqrt(sum_{k != 0} |k|^{2s} |w_k|^2) with integer |k|."""
    lat = w.grid.lattice
    k2 = lat.k2.astype(np.float64)
    k2[0, 0] = 1.0
    weight = k2 ** s
    weight[0, 0] = 0.0
    power = (w.coeffs.real ** 2 + w.coeffs.imag ** 2)
    return float(np.sqrt(np.sum(weight * power)))


def mix_norm(theta: SpectralField, s: float = -1.0) -> float:
    """Mixing measure |theta|_{H^s} for s in {-1, -1/2}."""
    if s not in (-1, -1.0, -0.5):
        raise ParameterError(f"mix_norm is defined for s = -1 or -1/2, got {s}")
    return sobolev_norm(theta, s)


def gradient_l2_norm(w: SpectralField) -> float:
    """|grad w|_{L2} with the 2 pi derivative symbols."""
    wx, wy = gradient(w)
    return float(np.sqrt(np.sum(np.abs(wx.coeffs) ** 2 + np.abs(wy.coeffs) ** 2)))


def spectral_l2_norm(w: SpectralField) -> float:
    return float(np.sqrt(np.sum(np.abs(w.coeffs) ** 2)))


# ═══════════════════════════════════════════════════════════════════════════════
# BMO
# ═══════════════════════════════════════════════════════════════════════════════

@lru_cache(maxsize=256)
def ball_offsets(n: int, radius_cells: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Index offsets (mod n) of grid points within periodic Euclidean distance
    radius_cells (in units of h) of the origin. Each residue appears once.
    """
    d = np.arange(n)
    d = np.minimum(d, n - d).astype(np.float64)
    dist2 = d[:, None] ** 2 + d[None, :] ** 2
    ii, jj = np.nonzero(dist2 <= radius_cells * radius_cells + 1e-9)
    ii.setflags(write=False)
    jj.setflags(write=False)
    return ii, jj


def _oscillation_block(values: np.ndarray, cx: np.ndarray, cy: np.ndarray,
                       ii: np.ndarray, jj: np.ndarray) -> float:
    n = values.shape[0]
    samples = values[(cx[:, None] + ii[None, :]) % n, (cy[:, None] + jj[None, :]) % n]
    means = samples.mean(axis=1, keepdims=True)
    return float(np.abs(samples - means).mean(axis=1).max())


def _work_items(grid: Grid, cfg: BmoConfig) -> List[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    n = grid.n
    c = np.arange(0, n, int(cfg.center_stride))
    cx, cy = (a.ravel() for a in np.meshgrid(c, c, indexing="ij"))
    items = []
    for r in cfg.radii:
        ii, jj = ball_offsets(n, round(r * n, 9))
        per_block = max(1, BMO_BLOCK_ELEMENTS // len(ii))
        for start in range(0, len(cx), per_block):
            items.append((cx[start:start + per_block], cy[start:start + per_block], ii, jj))
    return items


def bmo_seminorm(f: PhysicalField, cfg: Optional[BmoConfig] = None) -> float:
    """
    Discrete BMO seminorm: the max over sampled centers and radii of the mean
    absolute deviation from the ball average, balls being the grid points
    within periodic distance r of the center.
    """
    grid = f.grid
    cfg = cfg or BmoConfig.default(grid)
    cfg.validate(grid)
    values = np.ascontiguousarray(f.values)
    items = _work_items(grid, cfg)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return max(_oscillation_block(values, *item) for item in items)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return max(pool.map(lambda item: _oscillation_block(values, *item), items))


def vector_bmo(components: Iterable[PhysicalField], cfg: Optional[BmoConfig] = None) -> float:
    """BMO of a vector/tensor field as the max over its scalar components."""
    return max(bmo_seminorm(c, cfg) for c in components)

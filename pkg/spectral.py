#!/usr/bin/env python3
"""
spectral.py - Torus discretization and Fourier-space operators

Fields live on the unit torus [0,1]^2 sampled at x_ij = (i h, j h), h = 1/n.
A SpectralField stores the coefficients of

    w(x) = sum_k w_k exp(2 pi i k.x),    w_k = n^-2 sum_x w(x) exp(-2 pi i k.x)

in numpy's fft2 layout (axis 0 is x, axis 1 is y), with integer wavenumbers
k in [-n/2, n/2). Derivative symbols carry the 2 pi, norm weights use the
integer |k|.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Tuple, Union

import numpy as np
import scipy.fft

from errors import GridError, MeanModeError
from settings import worker_count

logger = logging.getLogger(__name__)

Axis = str  # "x" or "y"

MEAN_MODE_TOL = 1e-14
TWO_PI = 2.0 * np.pi


class _Lattice(NamedTuple):
    kx: np.ndarray
    ky: np.ndarray
    k2: np.ndarray
    kmag: np.ndarray
    nyquist_x: np.ndarray
    nyquist_y: np.ndarray
    dealias: np.ndarray
    kmax_component: np.ndarray


@lru_cache(maxsize=None)
def _lattice(n: int) -> _Lattice:
    """Wavenumber arrays for an n x n grid, built once and shared read-only."""
    k = np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)
    kx, ky = np.meshgrid(k, k, indexing="ij")
    k2 = kx * kx + ky * ky
    kmag = np.sqrt(k2.astype(np.float64))
    kmax_component = np.maximum(np.abs(kx), np.abs(ky))
    arrays = _Lattice(
        kx=kx,
        ky=ky,
        k2=k2,
        kmag=kmag,
        nyquist_x=(kx == -n // 2),
        nyquist_y=(ky == -n // 2),
        dealias=(kmax_component < n / 3.0),
        kmax_component=kmax_component,
    )
    for a in arrays:
        a.setflags(write=False)
    logger.debug("built wavenumber lattice for n=%d", n)
    return arrays


@dataclass(frozen=True)
class Grid:
    """n x n collocation grid on the unit torus; n >= 16, power of two."""

    n: int

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise GridError(f"grid size must be an integer, got {n!r}")
        if n < 16 or (n & (n - 1)) != 0:
            raise GridError(f"grid size must be a power of two >= 16, got {n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def lattice(self) -> _Lattice:
        return _lattice(int(self.n))

    @property
    def kx(self) -> np.ndarray:
        return self.lattice.kx

    @property
    def ky(self) -> np.ndarray:
        return self.lattice.ky

    @property
    def dealias_cutoff(self) -> float:
        """Modes with max(|kx|, |ky|) at or above this value are removed by the 2/3 rule."""
        return self.n / 3.0

    def points(self) -> Tuple[np.ndarray, np.ndarray]:
        """Collocation coordinates (X, Y), each of shape (n, n)."""
        x = np.arange(self.n) * self.h
        return np.meshgrid(x, x, indexing="ij")


def _check_shape(grid: Grid, arr: np.ndarray, what: str) -> None:
    if arr.shape != (grid.n, grid.n):
        raise GridError(f"{what} has shape {arr.shape}, expected ({grid.n}, {grid.n})")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PhysicalField:
    """Real samples of a periodic field at the collocation points."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        _check_shape(self.grid, values, "physical field")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "PhysicalField":
        """Sample fn(X, Y) on the grid."""
        X, Y = grid.points()
        return cls(grid, np.broadcast_to(fn(X, Y), (grid.n, grid.n)))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a real, zero-mean periodic field."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.complex128)
        _check_shape(self.grid, coeffs, "spectral field")
        object.__setattr__(self, "coeffs", _frozen(coeffs))

    @classmethod
    def zeros(cls, grid: Grid) -> "SpectralField":
        return cls(grid, np.zeros((grid.n, grid.n), dtype=np.complex128))

    @property
    def mean_mode(self) -> complex:
        return complex(self.coeffs[0, 0])

    def _other(self, other: "SpectralField") -> np.ndarray:
        same_grid(self, other)
        return other.coeffs

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.coeffs + self._other(other))

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.coeffs - self._other(other))

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coeffs)

    def __mul__(self, scalar: Union[float, int]) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * float(scalar))

    __rmul__ = __mul__


def same_grid(a: Union[SpectralField, PhysicalField], b: Union[SpectralField, PhysicalField]) -> Grid:
    if a.grid.n != b.grid.n:
        raise GridError(f"grid mismatch: n={a.grid.n} vs n={b.grid.n}")
    return a.grid


def _axis_symbol(grid: Grid, axis: Axis) -> Tuple[np.ndarray, np.ndarray]:
    lat = grid.lattice
    if axis == "x":
        return lat.kx, lat.nyquist_x
    if axis == "y":
        return lat.ky, lat.nyquist_y
    raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")


# ═══════════════════════════════════════════════════════════════════════════════
# Transforms
# ═══════════════════════════════════════════════════════════════════════════════

def _forward(values: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    coeffs = scipy.fft.fft2(values, workers=worker_count()) / (n * n)
    coeffs[0, 0] = 0.0
    return coeffs


def _inverse(coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.shape[0]
    return scipy.fft.ifft2(coeffs, workers=worker_count()).real * (n * n)


def to_spectral(f: PhysicalField) -> SpectralField:
    """Forward transform; the mean mode is removed."""
    return SpectralField(f.grid, _forward(f.values))


def to_physical(w: SpectralField) -> PhysicalField:
    return PhysicalField(w.grid, _inverse(w.coeffs))


# ═══════════════════════════════════════════════════════════════════════════════
# Linear operators
# ═══════════════════════════════════════════════════════════════════════════════

def derivative(w: SpectralField, axis: Axis) -> SpectralField:
    """Spectral derivative along axis: multiply by 2 pi i k_axis, Nyquist zeroed."""
    k, nyquist = _axis_symbol(w.grid, axis)
    out = w.coeffs * (1j * TWO_PI * k)
    out[nyquist] = 0.0
    out[0, 0] = 0.0
    return SpectralField(w.grid, out)


def gradient(w: SpectralField) -> Tuple[SpectralField, SpectralField]:
    return derivative(w, "x"), derivative(w, "y")


def laplacian(w: SpectralField) -> SpectralField:
    out = w.coeffs * (-(TWO_PI ** 2) * w.grid.lattice.k2)
    out[0, 0] = 0.0
    return SpectralField(w.grid, out)


def invert_laplacian(w: SpectralField) -> SpectralField:
    """Zero-mean solution of Lap(out) = w."""
    if abs(w.coeffs[0, 0]) > MEAN_MODE_TOL:
        raise MeanModeError(f"invert_laplacian needs a zero-mean field, mean mode is {w.coeffs[0, 0]!r}")
    k2 = w.grid.lattice.k2.astype(np.float64)
    k2[0, 0] = 1.0
    out = w.coeffs / (-(TWO_PI ** 2) * k2)
    out[0, 0] = 0.0
    return SpectralField(w.grid, out)


def perp_gradient(psi: SpectralField) -> Tuple[SpectralField, SpectralField]:
    """Velocity (u, v) = (-d_y psi, d_x psi) from a streamfunction."""
    return -derivative(psi, "y"), derivative(psi, "x")


def riesz(w: SpectralField, axis: Axis) -> SpectralField:
    """Riesz transform R_axis = d_axis (-Lap)^(-1/2), symbol i k_axis / |k|."""
    k, nyquist = _axis_symbol(w.grid, axis)
    kmag = w.grid.lattice.kmag.copy()
    kmag[0, 0] = 1.0
    out = w.coeffs * (1j * k / kmag)
    out[nyquist] = 0.0
    out[0, 0] = 0.0
    return SpectralField(w.grid, out)


def dealias(w: SpectralField) -> SpectralField:
    """2/3 rule: drop modes with max(|kx|, |ky|) >= n/3."""
    return SpectralField(w.grid, np.where(w.grid.lattice.dealias, w.coeffs, 0.0))


def truncate(w: SpectralField, kmax: int) -> SpectralField:
    """Keep modes with max(|kx|, |ky|) <= kmax."""
    keep = w.grid.lattice.kmax_component <= kmax
    return SpectralField(w.grid, np.where(keep, w.coeffs, 0.0))


def band_limit(w: SpectralField, rel_tol: float = 1e-12) -> int:
    """Largest max(|kx|, |ky|) carrying a coefficient above rel_tol * max |w_k|."""
    mag = np.abs(w.coeffs)
    peak = mag.max()
    if peak == 0.0:
        return 0
    return int(w.grid.lattice.kmax_component[mag > rel_tol * peak].max())


# ═══════════════════════════════════════════════════════════════════════════════
# Nonlinear products
# ═══════════════════════════════════════════════════════════════════════════════

def jacobian(a: SpectralField, b: SpectralField) -> SpectralField:
    """
    Dealiased pseudospectral Jacobian d(a,b) = a_x b_y - a_y b_x.

    Inputs and output are filtered with the 2/3 rule; the product is formed
    at the collocation points and the mean mode of the result is removed.
    """
    grid = same_grid(a, b)
    a_d, b_d = dealias(a), dealias(b)
    ax, ay = (_inverse(d.coeffs) for d in gradient(a_d))
    bx, by = (_inverse(d.coeffs) for d in gradient(b_d))
    product = ax * by - ay * bx
    out = _forward(product)
    out[~grid.lattice.dealias] = 0.0
    return SpectralField(grid, out)


def inner_product(a: SpectralField, b: SpectralField) -> float:
    """Discrete L2 inner product (a, b) over the unit torus, via Parseval."""
    same_grid(a, b)
    return float(np.real(np.vdot(b.coeffs, a.coeffs)))


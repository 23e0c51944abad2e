#!/usr/bin/env python3
"""
scenarios.py - Named initial conditions for the flow and the scalar

Every family produces a zero-mean field whose Fourier support satisfies
max(|kx|, |ky|) <= n/4, leaving headroom under the 2/3 dealiasing rule.
Random families are seeded per field so identical specs give bit-identical
states.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from dynamics import FlowState, StepControl
from errors import BandLimitError, ScenarioError
from norms import lp_norm, mix_norm, spectral_l2_norm
from spectral import (
    Grid,
    PhysicalField,
    SpectralField,
    band_limit,
    laplacian,
    to_physical,
    to_spectral,
    truncate,
)

logger = logging.getLogger(__name__)

VORTICITY_FAMILIES = ("rest", "shear", "taylor_green", "random_band")
SCALAR_FAMILIES = ("single_mode", "checkerboard", "random_band", "gaussian_blob")

# Per-field seed streams: np.random.default_rng([seed, stream]).
OMEGA_STREAM = 0
THETA_STREAM = 1
PERTURBATION_STREAM = 2

# Periodic images summed on each side when periodizing the gaussian blob.
GAUSSIAN_IMAGES = 3


@dataclass(frozen=True)
class FieldSpec:
    """
    Initial-condition descriptor. Only the parameters of the named family are
    read:

        shear          amplitude, m           omega = A cos(2 pi m y)
        taylor_green   amplitude, m, perturbation (+ k_lo, k_hi, slope)
                                              psi = A sin(2 pi m x) sin(2 pi m y)
        single_mode    amplitude, kx, ky      theta = A cos(2 pi (kx x + ky y))
        checkerboard   amplitude, m           theta = A cos(2 pi m x) cos(2 pi m y)
        random_band    amplitude, k_lo, k_hi, slope   (amplitude is the L2 norm)
        gaussian_blob  amplitude, sigma, x0, y0
    """

    family: str
    amplitude: float = 1.0
    m: int = 1
    kx: int = 1
    ky: int = 0
    k_lo: float = 1.0
    k_hi: float = 4.0
    slope: float = 0.0
    sigma: float = 0.1
    x0: float = 0.5
    y0: float = 0.5
    perturbation: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    omega0: FieldSpec
    theta0: FieldSpec
    n: int = 128
    t_end: float = 1.0
    cfl: float = 0.4
    sample_every: float = 0.02
    seed: int = 0
    dt_max: float = 0.01
    dt_min: float = 1e-8

    @property
    def grid(self) -> Grid:
        return Grid(self.n)

    def step_control(self) -> StepControl:
        return StepControl(cfl=self.cfl, dt_max=self.dt_max, dt_min=self.dt_min)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["omega0"] = self.omega0.to_dict()
        data["theta0"] = self.theta0.to_dict()
        return data


# ═══════════════════════════════════════════════════════════════════════════════
# Field constructors
# ═══════════════════════════════════════════════════════════════════════════════

def _positive_int(value, what: str) -> int:
    if int(value) != value or value < 1:
        raise ScenarioError(f"{what} must be a positive integer, got {value!r}")
    return int(value)


def random_band_field(grid: Grid, rng: np.random.Generator, k_lo: float, k_hi: float,
                      slope: float = 0.0, amplitude: float = 1.0) -> SpectralField:
    """
    Random-phase field supported on the shell k_lo <= |k| <= k_hi, coefficient
    magnitudes proportional to |k|^(-slope/2), rescaled to L2 norm `amplitude`.

    Phases are drawn on the square |kx|, |ky| <= floor(k_hi) only, so the same
    rng state gives the same field at every resolution that resolves the shell.
    """
    if not 1.0 <= k_lo <= k_hi:
        raise ScenarioError(f"need 1 <= k_lo <= k_hi, got k_lo={k_lo}, k_hi={k_hi}")
    lat = grid.lattice
    shell = (lat.kmag >= k_lo) & (lat.kmag <= k_hi)
    if not shell.any():
        raise ScenarioError(f"no wavenumbers in the shell [{k_lo}, {k_hi}]")
    kmag = np.where(shell, lat.kmag, 1.0)
    kmax = min(int(np.floor(k_hi)), grid.n // 2 - 1)
    ks = np.arange(-kmax, kmax + 1)
    phases = np.zeros((grid.n, grid.n), dtype=np.complex128)
    phases[np.ix_(ks % grid.n, ks % grid.n)] = np.exp(2j * np.pi * rng.random((ks.size, ks.size)))
    coeffs = np.where(shell, kmag ** (-0.5 * slope) * phases, 0.0)
    # Real part of the synthesized field restores Hermitian symmetry on the same shell.
    w = to_spectral(to_physical(SpectralField(grid, coeffs)))
    norm = spectral_l2_norm(w)
    if norm == 0.0 or amplitude == 0.0:
        return SpectralField.zeros(grid)
    return w * (amplitude / norm)


def periodic_gaussian(grid: Grid, sigma: float, x0: float, y0: float) -> PhysicalField:
    """exp(-|x - x0|^2 / (2 sigma^2)) summed over the nearest periodic images."""
    if not 0.0 < sigma <= 0.5:
        raise ScenarioError(f"gaussian sigma must lie in (0, 1/2], got {sigma}")
    X, Y = grid.points()
    images = range(-GAUSSIAN_IMAGES, GAUSSIAN_IMAGES + 1)
    gx = sum(np.exp(-((X - x0 + a) ** 2) / (2.0 * sigma * sigma)) for a in images)
    gy = sum(np.exp(-((Y - y0 + b) ** 2) / (2.0 * sigma * sigma)) for b in images)
    return PhysicalField(grid, gx * gy)


def gaussian_blob(grid: Grid, fs: FieldSpec) -> Tuple[SpectralField, float]:
    """Mean-removed gaussian truncated to the band limit, with its relative L2 truncation error."""
    full = to_spectral(periodic_gaussian(grid, fs.sigma, fs.x0, fs.y0)) * fs.amplitude
    kept = truncate(full, grid.n // 4)
    total = spectral_l2_norm(full)
    error = spectral_l2_norm(full - kept) / total if total > 0.0 else 0.0
    return kept, error


def _shear(grid: Grid, fs: FieldSpec, rng: np.random.Generator) -> SpectralField:
    m = _positive_int(fs.m, "shear m")
    return to_spectral(PhysicalField.from_function(
        grid, lambda X, Y: fs.amplitude * np.cos(2.0 * np.pi * m * Y)))


def _taylor_green(grid: Grid, fs: FieldSpec, rng: np.random.Generator) -> SpectralField:
    m = _positive_int(fs.m, "taylor_green m")
    psi = to_spectral(PhysicalField.from_function(
        grid, lambda X, Y: fs.amplitude * np.sin(2.0 * np.pi * m * X) * np.sin(2.0 * np.pi * m * Y)))
    omega = laplacian(psi)
    if fs.perturbation < 0:
        raise ScenarioError(f"perturbation must be non-negative, got {fs.perturbation}")
    if fs.perturbation > 0:
        omega = omega + random_band_field(grid, rng, fs.k_lo, fs.k_hi, fs.slope,
                                          fs.perturbation * spectral_l2_norm(omega))
    return omega


def _random_band(grid: Grid, fs: FieldSpec, rng: np.random.Generator) -> SpectralField:
    return random_band_field(grid, rng, fs.k_lo, fs.k_hi, fs.slope, fs.amplitude)


def _single_mode(grid: Grid, fs: FieldSpec, rng: np.random.Generator) -> SpectralField:
    if (fs.kx, fs.ky) == (0, 0) or int(fs.kx) != fs.kx or int(fs.ky) != fs.ky:
        raise ScenarioError(f"single_mode needs a nonzero integer wavevector, got ({fs.kx}, {fs.ky})")
    return to_spectral(PhysicalField.from_function(
        grid, lambda X, Y: fs.amplitude * np.cos(2.0 * np.pi * (fs.kx * X + fs.ky * Y))))


def _checkerboard(grid: Grid, fs: FieldSpec, rng: np.random.Generator) -> SpectralField:
    m = _positive_int(fs.m, "checkerboard m")
    return to_spectral(PhysicalField.from_function(
        grid, lambda X, Y: fs.amplitude * np.cos(2.0 * np.pi * m * X) * np.cos(2.0 * np.pi * m * Y)))


def _gaussian_blob(grid: Grid, fs: FieldSpec, rng: np.random.Generator) -> SpectralField:
    return gaussian_blob(grid, fs)[0]


Builder = Callable[[Grid, FieldSpec, np.random.Generator], SpectralField]

_VORTICITY_BUILDERS: Dict[str, Builder] = {
    "rest": lambda grid, fs, rng: SpectralField.zeros(grid),
    "shear": _shear,
    "taylor_green": _taylor_green,
    "random_band": _random_band,
}

_SCALAR_BUILDERS: Dict[str, Builder] = {
    "single_mode": _single_mode,
    "checkerboard": _checkerboard,
    "random_band": _random_band,
    "gaussian_blob": _gaussian_blob,
}


def _build_field(grid: Grid, fs: FieldSpec, builders: Dict[str, Builder],
                 rng: np.random.Generator, what: str) -> SpectralField:
    builder = builders.get(fs.family)
    if builder is None:
        raise ScenarioError(f"unknown {what} family {fs.family!r} (expected one of {', '.join(builders)})")
    w = builder(grid, fs, rng)
    limit = band_limit(w)
    if limit > grid.n // 4:
        raise BandLimitError(f"{what} family {fs.family!r} reaches wavenumber {limit} > n/4 = {grid.n // 4}")
    return w


# ═══════════════════════════════════════════════════════════════════════════════
# Public API
# ═══════════════════════════════════════════════════════════════════════════════

def build(spec: ScenarioSpec) -> FlowState:
    """Deterministic initial FlowState at t = 0."""
    grid = spec.grid
    # Taylor-Green perturbations draw from their own stream.
    stream = PERTURBATION_STREAM if spec.omega0.family == "taylor_green" else OMEGA_STREAM
    omega = _build_field(grid, spec.omega0, _VORTICITY_BUILDERS,
                         np.random.default_rng([spec.seed, stream]), "vorticity")
    theta = _build_field(grid, spec.theta0, _SCALAR_BUILDERS,
                         np.random.default_rng([spec.seed, THETA_STREAM]), "scalar")
    logger.debug("built scenario %s at n=%d", spec.name, spec.n)
    return FlowState(omega, theta, 0.0)


def describe(spec: ScenarioSpec, state: FlowState) -> dict:
    """Initial-data summary copied into run reports."""
    omega_phys = to_physical(state.omega)
    info = {
        "name": spec.name,
        "n": spec.n,
        "seed": spec.seed,
        "omega0": spec.omega0.to_dict(),
        "theta0": spec.theta0.to_dict(),
        "linf_omega0": lp_norm(omega_phys, math.inf),
        "enstrophy0": 0.5 * spectral_l2_norm(state.omega) ** 2,
        "l2_theta0": spectral_l2_norm(state.theta),
        "hm1_theta0": mix_norm(state.theta, -1.0),
    }
    if spec.theta0.family == "gaussian_blob":
        info["gaussian_truncation_error"] = gaussian_blob(spec.grid, spec.theta0)[1]
    return info


def time_reversed(state: FlowState) -> FlowState:
    """Same scalar, velocity negated (omega -> -omega)."""
    return FlowState(-state.omega, state.theta, state.t)


def scaled(state: FlowState, omega_factor: float = 1.0, theta_factor: float = 1.0,
           t: Optional[float] = None) -> FlowState:
    """Rescaled copy; omega -> a omega runs the same trajectory at a times the speed."""
    return FlowState(state.omega * omega_factor, state.theta * theta_factor,
                     state.t if t is None else t)

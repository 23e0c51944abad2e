#!/usr/bin/env python3
"""
diagnostics.py - Per-sample norms, conserved quantities and rate identities

A DiagnosticRecord is one time sample of everything the bound checks need.
The rate identities compare d/dt |grad phi|^2 (phi = Lap^-1 theta) and
d/dt |grad s|^2 computed directly against their integrated-by-parts forms.
"""

import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import TYPE_CHECKING, Dict, Mapping, Tuple

import numpy as np

from errors import ParameterError, RecordError
from norms import (
    BmoConfig,
    bmo_seminorm,
    gradient_l2_norm,
    lp_norm,
    mix_norm,
    vector_bmo,
)
from spectral import (
    SpectralField,
    dealias,
    derivative,
    gradient,
    invert_laplacian,
    laplacian,
    perp_gradient,
    riesz,
    same_grid,
    to_physical,
)

if TYPE_CHECKING:
    from dynamics import FlowState

logger = logging.getLogger(__name__)

VELOCITY_GRADIENT_KEYS = ("du_dx", "du_dy", "dv_dx", "dv_dy")
UNDER_RESOLVED_FRACTION = 0.01


@dataclass(frozen=True)
class DiagnosticRecord:
    t: float
    hm1_theta: float
    hm12_theta: float
    grad_l2_theta: float
    grad_l2_omega: float
    linf_omega: float
    bmo_omega: float
    energy: float
    enstrophy: float
    l2_theta: float
    resolved_fraction: float
    linf_theta: float
    grad_v_linf: float
    grad_v_bmo: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping) -> "DiagnosticRecord":
        if not isinstance(data, Mapping):
            raise RecordError(f"record must be an object, got {type(data).__name__}")
        missing = [name for name in FIELD_NAMES if name not in data]
        if missing:
            raise RecordError(f"record is missing {', '.join(missing)}")
        values = {}
        for name in FIELD_NAMES:
            try:
                value = float(data[name])
            except (TypeError, ValueError):
                raise RecordError(f"record field {name} is not a number: {data[name]!r}")
            if not math.isfinite(value):
                raise RecordError(f"record field {name} is not finite: {value}")
            values[name] = value
        return cls(**values)


FIELD_NAMES = tuple(f.name for f in fields(DiagnosticRecord))


# ═══════════════════════════════════════════════════════════════════════════════
# Velocity and its gradient
# ═══════════════════════════════════════════════════════════════════════════════

def velocity(omega: SpectralField) -> Tuple[SpectralField, SpectralField]:
    return perp_gradient(invert_laplacian(omega))


def velocity_gradient(omega: SpectralField) -> Dict[str, SpectralField]:
    """grad v by differentiating v = perp-grad Lap^-1 omega."""
    u, v = velocity(omega)
    return {
        "du_dx": derivative(u, "x"),
        "du_dy": derivative(u, "y"),
        "dv_dx": derivative(v, "x"),
        "dv_dy": derivative(v, "y"),
    }


def velocity_gradient_riesz(omega: SpectralField) -> Dict[str, SpectralField]:
    """grad v = (R_x, R_y)(R_y, -R_x) omega, entry [a][i] = d_a v_i."""
    rx, ry = riesz(omega, "x"), riesz(omega, "y")
    return {
        "du_dx": riesz(ry, "x"),
        "du_dy": riesz(ry, "y"),
        "dv_dx": -riesz(rx, "x"),
        "dv_dy": -riesz(rx, "y"),
    }


# ═══════════════════════════════════════════════════════════════════════════════
# Conserved quantities
# ═══════════════════════════════════════════════════════════════════════════════

def energy(omega: SpectralField) -> float:
    """Kinetic energy 1/2 |v|^2_{L2}."""
    u, v = velocity(omega)
    return 0.5 * float(np.sum(np.abs(u.coeffs) ** 2 + np.abs(v.coeffs) ** 2))


def enstrophy(omega: SpectralField) -> float:
    """1/2 |omega|^2_{L2}."""
    return 0.5 * float(np.sum(np.abs(omega.coeffs) ** 2))


def resolved_fraction(omega: SpectralField) -> float:
    """Share of enstrophy in the top third of the modes kept by the 2/3 rule."""
    lat = omega.grid.lattice
    power = np.abs(omega.coeffs) ** 2
    total = float(power.sum())
    if total == 0.0:
        return 0.0
    tail = lat.dealias & (lat.kmax_component >= (2.0 / 3.0) * omega.grid.dealias_cutoff)
    return float(power[tail].sum()) / total


def diagnose(state: "FlowState", bmo: BmoConfig) -> DiagnosticRecord:
    """Evaluate one DiagnosticRecord at the state's time."""
    omega, theta = state.omega, state.theta
    omega_phys = to_physical(omega)
    theta_phys = to_physical(theta)
    grad_v = [to_physical(g) for g in velocity_gradient(omega).values()]
    return DiagnosticRecord(
        t=float(state.t),
        hm1_theta=mix_norm(theta, -1.0),
        hm12_theta=mix_norm(theta, -0.5),
        grad_l2_theta=gradient_l2_norm(theta),
        grad_l2_omega=gradient_l2_norm(omega),
        linf_omega=lp_norm(omega_phys, math.inf),
        bmo_omega=bmo_seminorm(omega_phys, bmo),
        energy=energy(omega),
        enstrophy=enstrophy(omega),
        l2_theta=lp_norm(theta_phys, 2),
        resolved_fraction=resolved_fraction(omega),
        linf_theta=lp_norm(theta_phys, math.inf),
        grad_v_linf=max(lp_norm(g, math.inf) for g in grad_v),
        grad_v_bmo=vector_bmo(grad_v, bmo),
    )


# ═══════════════════════════════════════════════════════════════════════════════
# Rate identities
# ═══════════════════════════════════════════════════════════════════════════════
# All products below are formed at the collocation points from 2/3-filtered
# inputs; triple products then stay below n and the grid quadrature is exact.

def _phys(w: SpectralField) -> np.ndarray:
    return to_physical(w).values


def _mean(a: np.ndarray) -> float:
    return float(np.mean(a))


def _jacobian_values(a: SpectralField, b: SpectralField) -> np.ndarray:
    ax, ay = (_phys(d) for d in gradient(a))
    bx, by = (_phys(d) for d in gradient(b))
    return ax * by - ay * bx


def mixing_rate(state: "FlowState") -> Tuple[float, float]:
    """
    d/dt |grad phi|^2 with phi = Lap^-1 theta, as (direct, via_jacobian):

        direct       = 2 (phi, d(psi, theta))
        via_jacobian = 2 sum_j (d(d_j psi, phi), d_j phi)
    """
    omega, theta = dealias(state.omega), dealias(state.theta)
    psi = invert_laplacian(omega)
    phi = invert_laplacian(theta)
    direct = 2.0 * _mean(_phys(phi) * _jacobian_values(psi, theta))
    via = 0.0
    for axis in ("x", "y"):
        psi_j = derivative(psi, axis)
        phi_j = derivative(phi, axis)
        via += 2.0 * _mean(_jacobian_values(psi_j, phi) * _phys(phi_j))
    return direct, via


def gradient_rate(state: "FlowState", which: str = "theta") -> Tuple[float, float]:
    """
    d/dt |grad s|^2 for s = theta or omega, as (direct, via_velocity_gradient):

        direct = 2 (Lap s, d(psi, s))
        via    = -2 sum_j ((d_j v) . grad s, d_j s)
    """
    if which not in ("theta", "omega"):
        raise ParameterError(f"which must be 'theta' or 'omega', got {which!r}")
    omega = dealias(state.omega)
    s = dealias(state.theta if which == "theta" else state.omega)
    psi = invert_laplacian(omega)
    direct = 2.0 * _mean(_phys(laplacian(s)) * _jacobian_values(psi, s))
    grad_v = {k: _phys(g) for k, g in velocity_gradient(omega).items()}
    sx, sy = (_phys(d) for d in gradient(s))
    via = -2.0 * (
        _mean((grad_v["du_dx"] * sx + grad_v["dv_dx"] * sy) * sx)
        + _mean((grad_v["du_dy"] * sx + grad_v["dv_dy"] * sy) * sy)
    )
    return direct, via


def jacobian_identity_residual(omega: SpectralField, phi: SpectralField) -> float:
    """
    Relative residual of (v . grad Lap phi, phi) = sum_j ((d_j v) . grad phi, d_j phi).

    The residual |A - B| is scaled by the sum of the absolute values of the
    four terms making up B.
    """
    same_grid(omega, phi)
    omega, phi = dealias(omega), dealias(phi)
    u, v = (_phys(c) for c in velocity(omega))
    lap_x, lap_y = (_phys(d) for d in gradient(laplacian(phi)))
    phi_vals = _phys(phi)
    a_term = _mean((u * lap_x + v * lap_y) * phi_vals)

    grad_v = {k: _phys(g) for k, g in velocity_gradient(omega).items()}
    px, py = (_phys(d) for d in gradient(phi))
    pieces = [
        _mean(grad_v["du_dx"] * px * px),
        _mean(grad_v["dv_dx"] * py * px),
        _mean(grad_v["du_dy"] * px * py),
        _mean(grad_v["dv_dy"] * py * py),
    ]
    b_term = sum(pieces)
    scale = sum(abs(p) for p in pieces)
    if scale == 0.0:
        return abs(a_term - b_term)
    return abs(a_term - b_term) / scale

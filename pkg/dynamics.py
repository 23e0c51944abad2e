#!/usr/bin/env python3
"""
dynamics.py - Inviscid vorticity equation with passive scalar transport

    d_t omega + d(psi, omega) = 0,    d_t theta + d(psi, theta) = 0,    Lap psi = omega

advanced with classical RK4 on the dealiased pseudospectral tendency. Both
fields share the step size and the RK stages.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Protocol, Tuple

import numpy as np

from diagnostics import UNDER_RESOLVED_FRACTION, DiagnosticRecord, diagnose
from errors import MeanModeError, ParameterError, StepSizeError
from norms import BmoConfig
from spectral import (
    MEAN_MODE_TOL,
    Grid,
    SpectralField,
    invert_laplacian,
    jacobian,
    perp_gradient,
    same_grid,
    to_physical,
)

logger = logging.getLogger(__name__)

VELOCITY_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class FlowState:
    """Spectral vorticity, spectral scalar and time."""

    omega: SpectralField
    theta: SpectralField
    t: float = 0.0

    def __post_init__(self):
        same_grid(self.omega, self.theta)
        for name, w in (("omega", self.omega), ("theta", self.theta)):
            if abs(w.mean_mode) > MEAN_MODE_TOL:
                raise MeanModeError(f"{name} must have zero mean, mean mode is {w.mean_mode!r}")

    @property
    def grid(self) -> Grid:
        return self.omega.grid

    def streamfunction(self) -> SpectralField:
        return invert_laplacian(self.omega)

    def velocity(self) -> Tuple[SpectralField, SpectralField]:
        return perp_gradient(self.streamfunction())


@dataclass(frozen=True)
class StepControl:
    cfl: float = 0.4
    dt_max: float = 0.01
    dt_min: float = 1e-8

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ParameterError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not 0.0 < self.dt_min < self.dt_max:
            raise ParameterError(f"need 0 < dt_min < dt_max, got dt_min={self.dt_min}, dt_max={self.dt_max}")


class DiagnosticSink(Protocol):
    """Consumer of DiagnosticRecords, fed sequentially by one run."""

    def emit(self, record: DiagnosticRecord) -> None:
        ...


class ListSink:
    """Keeps records in memory."""

    def __init__(self):
        self.records: List[DiagnosticRecord] = []

    def emit(self, record: DiagnosticRecord) -> None:
        self.records.append(record)


def tendency(state: FlowState) -> Tuple[SpectralField, SpectralField]:
    """(d_t omega, d_t theta) = (-d(psi, omega), -d(psi, theta))."""
    psi = state.streamfunction()
    return -jacobian(psi, state.omega), -jacobian(psi, state.theta)


def step(state: FlowState, dt: float) -> FlowState:
    """One classical RK4 step of size dt."""
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    w0, s0, t0 = state.omega, state.theta, state.t

    k1w, k1s = tendency(state)
    k2w, k2s = tendency(FlowState(w0 + 0.5 * dt * k1w, s0 + 0.5 * dt * k1s, t0 + 0.5 * dt))
    k3w, k3s = tendency(FlowState(w0 + 0.5 * dt * k2w, s0 + 0.5 * dt * k2s, t0 + 0.5 * dt))
    k4w, k4s = tendency(FlowState(w0 + dt * k3w, s0 + dt * k3s, t0 + dt))

    omega = w0 + (dt / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
    theta = s0 + (dt / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
    return FlowState(omega, theta, t0 + dt)


def cfl_dt(state: FlowState, ctl: StepControl) -> float:
    """min(dt_max, cfl h / max(|u|_inf, |v|_inf)); StepSizeError below dt_min."""
    u, v = state.velocity()
    speed = max(
        float(np.abs(to_physical(u).values).max()),
        float(np.abs(to_physical(v).values).max()),
        VELOCITY_FLOOR,
    )
    dt = min(ctl.dt_max, ctl.cfl * state.grid.h / speed)
    if dt < ctl.dt_min:
        raise StepSizeError(state.t, dt, ctl.dt_min)
    return dt


def sample_times(t0: float, t_end: float, sample_every: float) -> List[float]:
    """t0, t0 + sample_every, ... strictly below t_end, then t_end."""
    if t_end < t0:
        raise ParameterError(f"t_end={t_end} precedes the initial time {t0}")
    if not sample_every > 0:
        raise ParameterError(f"sample_every must be positive, got {sample_every}")
    if t_end == t0:
        return [t0]
    count = int(math.ceil((t_end - t0) / sample_every - 1e-9))
    times = [t0 + j * sample_every for j in range(count)]
    return times + [t_end]


def advance_to(state: FlowState, target: float, ctl: StepControl) -> Tuple[FlowState, int]:
    """Adaptive CFL steps until state.t == target; the last step is shortened to land on it."""
    steps = 0
    while state.t < target:
        dt = cfl_dt(state, ctl)
        remaining = target - state.t
        if dt >= remaining:
            advanced = step(state, remaining)
            state = FlowState(advanced.omega, advanced.theta, target)
        else:
            state = step(state, dt)
        steps += 1
    return state, steps


def run(
    state0: FlowState,
    ctl: StepControl,
    t_end: float,
    sample_every: float,
    sink: DiagnosticSink,
    bmo: Optional[BmoConfig] = None,
) -> FlowState:
    """
    Integrate from state0.t to t_end, emitting a DiagnosticRecord at every
    sampling instant (first and last included). StepSizeError carries the
    time of failure.
    """
    bmo = bmo or BmoConfig.default(state0.grid)
    state = state0
    flagged = False
    total_steps = 0
    for target in sample_times(state0.t, t_end, sample_every):
        state, steps = advance_to(state, target, ctl)
        total_steps += steps
        record = diagnose(state, bmo)
        sink.emit(record)
        logger.info("t=%.6g steps=%d hm1=%.6e enstrophy=%.12e", record.t, total_steps,
                    record.hm1_theta, record.enstrophy)
        if not flagged and record.resolved_fraction >= UNDER_RESOLVED_FRACTION:
            flagged = True
            logger.warning("under-resolved at t=%.6g: %.2f%% of enstrophy in the top third of retained modes",
                           record.t, 100.0 * record.resolved_fraction)
    return state

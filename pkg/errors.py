#!/usr/bin/env python3
"""
errors.py - Exception hierarchy shared by every mixbound step
"""

from typing import Optional


class MixboundError(Exception):
    """Base class for all mixbound failures."""


class GridError(MixboundError, ValueError):
    """Invalid resolution, or fields living on different grids."""


class MeanModeError(MixboundError, ValueError):
    """A field that must have zero mean carries a nonzero k = 0 coefficient."""


class BandLimitError(MixboundError, ValueError):
    """Initial data has energy above the admissible wavenumber."""


class ScenarioError(MixboundError, ValueError):
    """Unknown initial-condition family or bad family parameters."""


class StepSizeError(MixboundError, RuntimeError):
    """CFL step fell below dt_min (velocity blow-up guard)."""

    def __init__(self, t: float, dt: float, dt_min: float, message: Optional[str] = None):
        self.t = t
        self.dt = dt
        self.dt_min = dt_min
        super().__init__(message or f"time step {dt:.3e} below dt_min {dt_min:.3e} at t = {t:.6g}")


class RecordError(MixboundError, ValueError):
    """Malformed diagnostic record series."""


class ConfigError(MixboundError, ValueError):
    """Configuration does not match the schema."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ParameterError(MixboundError, ValueError):
    """Numeric argument outside its admissible range."""

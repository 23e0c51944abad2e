#!/usr/bin/env python3
"""
bounds.py - Trajectory bound checks and functional-inequality constants

Lower bounds on the mix-norm have the form

    log |theta(t)|^2_{H^-1} >= log |theta(0)|^2_{H^-1} - lambda I(t)

for an exponent integral I(t) (BMO or sup norm of vorticity, or a norm of
grad v). Upper bounds on gradient growth read

    log |grad s(t)|^2 <= log |grad s(0)|^2 + lambda t |omega(0)|_inf.

The constant is fitted as the smallest lambda making the bound hold at every
sample; margins are reported in log space.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from diagnostics import DiagnosticRecord, velocity_gradient, velocity_gradient_riesz
from errors import ParameterError, RecordError
from norms import BmoConfig, bmo_seminorm, gradient_l2_norm, lp_norm, vector_bmo
from scenarios import random_band_field
from settings import single_worker, worker_count
from spectral import Grid, PhysicalField, SpectralField, gradient, to_physical

logger = logging.getLogger(__name__)

FIT_INFLATION = 1e-9
LOG_SLACK = 1e-12
RATIO_FLOOR = 1e-12
QUANTILES = (0.5, 0.9, 0.99)
VECTOR_NORM = "max-component"


@dataclass(frozen=True)
class BoundReport:
    kind: str
    lambda_fit: float
    margin_series: Tuple[float, ...]
    holds: bool
    reference_lambda: float
    samples: int
    vector_norm: str = VECTOR_NORM

    def to_dict(self) -> dict:
        data = asdict(self)
        data["margin_series"] = list(self.margin_series)
        data["min_margin"] = min(self.margin_series)
        return data


# ═══════════════════════════════════════════════════════════════════════════════
# Record series helpers
# ═══════════════════════════════════════════════════════════════════════════════

def _series(records: Sequence[DiagnosticRecord], name: str) -> np.ndarray:
    return np.array([getattr(r, name) for r in records], dtype=np.float64)


def _times(records: Sequence[DiagnosticRecord]) -> np.ndarray:
    if len(records) < 2:
        raise RecordError(f"bound checks need at least 2 records, got {len(records)}")
    t = _series(records, "t")
    bad = np.nonzero(np.diff(t) <= 0)[0]
    if bad.size:
        i = int(bad[0])
        raise RecordError(f"record times must increase strictly: t[{i}]={t[i]} then t[{i + 1}]={t[i + 1]}")
    return t


def _log_square(values: np.ndarray, what: str, times: np.ndarray) -> np.ndarray:
    if values[0] <= 0:
        raise RecordError(f"initial {what} is zero; the bound is vacuous")
    nonpositive = np.nonzero(values <= 0)[0]
    if nonpositive.size:
        i = int(nonpositive[0])
        raise RecordError(f"{what} vanishes at t={times[i]}")
    return 2.0 * np.log(values)


def time_integral(records: Sequence[DiagnosticRecord], name: str) -> np.ndarray:
    """Cumulative trapezoid integral of a record column, zero at the first sample."""
    return cumulative_trapezoid(_series(records, name), _times(records), initial=0.0)


def sup_exponent(records: Sequence[DiagnosticRecord]) -> np.ndarray:
    """(t - t0) |omega(t0)|_inf."""
    t = _times(records)
    return (t - t[0]) * records[0].linf_omega


# ═══════════════════════════════════════════════════════════════════════════════
# Fitting
# ═══════════════════════════════════════════════════════════════════════════════

def _fit(kind: str, deficit: np.ndarray, exponent: np.ndarray,
         reference_lambda: Optional[float]) -> BoundReport:
    """
    Bounds of the form deficit(t) <= lambda exponent(t), deficit(0) = 0.

    lambda_fit is the max of deficit/exponent over samples with a positive
    deficit and exponent, clipped at 0. A positive deficit over a zero
    exponent cannot be absorbed by any lambda and fails the check.
    """
    ok = (exponent[1:] > 0) & (deficit[1:] > 0)
    ratios = deficit[1:][ok] / exponent[1:][ok]
    lambda_fit = float(max(0.0, ratios.max())) if ratios.size else 0.0
    lam_check = lambda_fit * (1.0 + FIT_INFLATION)
    holds = bool(np.all(lam_check * exponent - deficit >= -LOG_SLACK))
    reference = lambda_fit if reference_lambda is None else float(reference_lambda)
    if reference < 0:
        raise ParameterError(f"reference lambda must be non-negative, got {reference}")
    margin = reference * exponent - deficit
    logger.debug("%s: lambda_fit=%.6e holds=%s", kind, lambda_fit, holds)
    return BoundReport(
        kind=kind,
        lambda_fit=lambda_fit,
        margin_series=tuple(float(m) for m in margin),
        holds=holds,
        reference_lambda=reference,
        samples=len(deficit),
    )


def _mixing_check(kind: str, records: Sequence[DiagnosticRecord], exponent: np.ndarray,
                  reference_lambda: Optional[float]) -> BoundReport:
    times = _times(records)
    log_h = _log_square(_series(records, "hm1_theta"), "hm1_theta", times)
    return _fit(kind, log_h[0] - log_h, exponent, reference_lambda)


def check_mixing_bmo(records: Sequence[DiagnosticRecord],
                     reference_lambda: Optional[float] = None) -> BoundReport:
    """|theta(t)|^2_{H^-1} >= |theta(0)|^2_{H^-1} exp(-lambda int_0^t |omega|_BMO)."""
    return _mixing_check("mixing_bmo", records, time_integral(records, "bmo_omega"), reference_lambda)


def check_mixing_sup(records: Sequence[DiagnosticRecord],
                     reference_lambda: Optional[float] = None) -> BoundReport:
    """|theta(t)|^2_{H^-1} >= |theta(0)|^2_{H^-1} exp(-lambda t |omega(0)|_inf)."""
    return _mixing_check("mixing_sup", records, sup_exponent(records), reference_lambda)


def check_mixing_gradv_linf(records: Sequence[DiagnosticRecord],
                            reference_lambda: Optional[float] = None) -> BoundReport:
    return _mixing_check("mixing_gradv_linf", records, time_integral(records, "grad_v_linf"),
                         reference_lambda)


def check_mixing_gradv_bmo(records: Sequence[DiagnosticRecord],
                           reference_lambda: Optional[float] = None) -> BoundReport:
    return _mixing_check("mixing_gradv_bmo", records, time_integral(records, "grad_v_bmo"),
                         reference_lambda)


def check_gradient_growth(records: Sequence[DiagnosticRecord], which: str = "theta",
                          reference_lambda: Optional[float] = None) -> BoundReport:
    """|grad s(t)|^2 <= |grad s(0)|^2 exp(lambda t |omega(0)|_inf) for s = theta or omega."""
    if which not in ("theta", "omega"):
        raise ParameterError(f"which must be 'theta' or 'omega', got {which!r}")
    column = f"grad_l2_{which}"
    times = _times(records)
    log_g = _log_square(_series(records, column), column, times)
    return _fit(f"gradient_{which}", log_g - log_g[0], sup_exponent(records), reference_lambda)


CHECKS: Dict[str, Callable[..., BoundReport]] = {
    "mixing_bmo": check_mixing_bmo,
    "mixing_sup": check_mixing_sup,
    "gradient_theta": lambda records, reference_lambda=None: check_gradient_growth(records, "theta", reference_lambda),
    "gradient_omega": lambda records, reference_lambda=None: check_gradient_growth(records, "omega", reference_lambda),
    "mixing_gradv_linf": check_mixing_gradv_linf,
    "mixing_gradv_bmo": check_mixing_gradv_bmo,
}


def run_checks(records: Sequence[DiagnosticRecord], names: Sequence[str]) -> List[BoundReport]:
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise ParameterError(f"unknown bound check(s): {', '.join(unknown)}")
    return [CHECKS[name](records) for name in names]


# ═══════════════════════════════════════════════════════════════════════════════
# Trajectory-level verdicts
# ═══════════════════════════════════════════════════════════════════════════════

def no_perfect_mixing(records: Sequence[DiagnosticRecord]) -> bool:
    return bool(records) and min(r.hm1_theta for r in records) > 0.0


def exponent_gap(records: Sequence[DiagnosticRecord]) -> np.ndarray:
    """t |omega(0)|_inf - int_0^t |omega|_BMO; non-negative up to L-inf drift."""
    return sup_exponent(records) - time_integral(records, "bmo_omega")


CONSERVED = ("energy", "enstrophy", "l2_theta", "linf_omega", "linf_theta")


def conservation_drifts(records: Sequence[DiagnosticRecord]) -> Dict[str, float]:
    """Max relative deviation from the initial value of each conserved quantity."""
    drifts = {}
    for name in CONSERVED:
        values = _series(records, name)
        ref = abs(values[0])
        dev = float(np.abs(values - values[0]).max())
        drifts[name] = dev / ref if ref > 0 else dev
    return drifts


# ═══════════════════════════════════════════════════════════════════════════════
# Constant estimation
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class EnsembleSpec:
    """Random band-limited members; member i draws from default_rng([seed, i])."""

    size: int
    seed: int = 0
    k_lo: float = 1.0
    k_hi: float = 8.0
    slope: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ParameterError(f"ensemble size must be a positive integer, got {self.size!r}")
        if self.amplitude < 0:
            raise ParameterError(f"ensemble amplitude must be non-negative, got {self.amplitude}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ConstantEstimate:
    kind: str
    n: int
    size: int
    max_ratio: Optional[float]
    quantiles: Dict[str, float] = field(default_factory=dict)
    skipped: int = 0
    path_error: Optional[float] = None
    vector_norm: str = VECTOR_NORM

    def to_dict(self) -> dict:
        return asdict(self)


def _physical_gradient(w: SpectralField) -> List[PhysicalField]:
    return [to_physical(d) for d in gradient(w)]


def jacobian_l2(zeta: SpectralField, phi: SpectralField) -> float:
    """|d(zeta, phi)|_{L2} with the product formed at the collocation points."""
    zx, zy = (f.values for f in _physical_gradient(zeta))
    px, py = (f.values for f in _physical_gradient(phi))
    return lp_norm(PhysicalField(zeta.grid, zx * py - zy * px), 2)


def jacobian_bmo_ratio(zeta: SpectralField, phi: SpectralField, cfg: BmoConfig) -> Optional[float]:
    """|d(zeta, phi)|_{L2} / (|grad zeta|_BMO |grad phi|_{L2}); None when the denominator underflows."""
    denom = vector_bmo(_physical_gradient(zeta), cfg) * gradient_l2_norm(phi)
    if denom < RATIO_FLOOR:
        return None
    return jacobian_l2(zeta, phi) / denom


def riesz_bmo_ratio(omega: SpectralField, cfg: BmoConfig) -> Tuple[Optional[float], float]:
    """
    (|grad v|_BMO / |omega|_BMO, path disagreement). grad v is computed from the
    streamfunction and through Riesz transforms; the disagreement is the max
    entrywise deviation relative to the largest direct entry.
    """
    direct = velocity_gradient(omega)
    composed = velocity_gradient_riesz(omega)
    scale = max(float(np.abs(g.coeffs).max()) for g in direct.values())
    deviation = max(float(np.abs(direct[k].coeffs - composed[k].coeffs).max()) for k in direct)
    path_error = deviation / scale if scale > 0 else deviation
    denom = bmo_seminorm(to_physical(omega), cfg)
    if denom < RATIO_FLOOR:
        return None, path_error
    return vector_bmo([to_physical(g) for g in direct.values()], cfg) / denom, path_error


def _summarize(kind: str, grid: Grid, ensemble: EnsembleSpec, ratios: List[Optional[float]],
               path_error: Optional[float] = None) -> ConstantEstimate:
    kept = np.array([r for r in ratios if r is not None], dtype=np.float64)
    skipped = len(ratios) - kept.size
    if skipped:
        logger.info("%s at n=%d: skipped %d degenerate member(s)", kind, grid.n, skipped)
    if kept.size == 0:
        return ConstantEstimate(kind, grid.n, ensemble.size, None, {}, skipped, path_error)
    quantiles = {str(q): float(v) for q, v in zip(QUANTILES, np.quantile(kept, QUANTILES))}
    return ConstantEstimate(kind, grid.n, ensemble.size, float(kept.max()), quantiles, skipped, path_error)


def _map_members(fn: Callable[[int], object], size: int) -> list:
    workers = min(worker_count(), size)
    if workers <= 1:
        return [fn(i) for i in range(size)]

    def serial_member(i: int):
        with single_worker():
            return fn(i)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(serial_member, range(size)))


def estimate_jacobian_bmo_constant(ensemble: EnsembleSpec, grid: Grid,
                                   bmo: Optional[BmoConfig] = None) -> ConstantEstimate:
    """Ensemble of c in |d(zeta, phi)|_{L2} <= c |grad zeta|_BMO |grad phi|_{L2}."""
    bmo = bmo or BmoConfig.default(grid)

    def member(i: int) -> Optional[float]:
        rng = np.random.default_rng([ensemble.seed, i])
        zeta = random_band_field(grid, rng, ensemble.k_lo, ensemble.k_hi, ensemble.slope, ensemble.amplitude)
        phi = random_band_field(grid, rng, ensemble.k_lo, ensemble.k_hi, ensemble.slope, ensemble.amplitude)
        return jacobian_bmo_ratio(zeta, phi, bmo)

    return _summarize("jacobian_bmo", grid, ensemble, _map_members(member, ensemble.size))


def estimate_riesz_bmo_constant(ensemble: EnsembleSpec, grid: Grid,
                                bmo: Optional[BmoConfig] = None) -> ConstantEstimate:
    """Ensemble of c in |grad v|_BMO <= c |omega|_BMO."""
    bmo = bmo or BmoConfig.default(grid)

    def member(i: int) -> Tuple[Optional[float], float]:
        rng = np.random.default_rng([ensemble.seed, i])
        omega = random_band_field(grid, rng, ensemble.k_lo, ensemble.k_hi, ensemble.slope, ensemble.amplitude)
        return riesz_bmo_ratio(omega, bmo)

    results = _map_members(member, ensemble.size)
    path_error = max(err for _, err in results)
    return _summarize("riesz_bmo", grid, ensemble, [r for r, _ in results], path_error)

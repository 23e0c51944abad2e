#!/usr/bin/env python3
"""
config.py - JSON configuration for the simulate and estimate-constants steps

Documents are validated against schemas/run.schema.json and
schemas/estimate.schema.json with jsonschema; constraints that span keys or
depend on the grid (power-of-two n, dt_min < dt_max, BMO radii and stride,
k_hi <= n/4) are checked here afterwards. Either way a violation raises
ConfigError naming the offending key path, e.g.
"scenario.omega0.family: 'vortex' is not one of [...]".
"""

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple

from jsonschema import Draft202012Validator
from jsonschema.exceptions import ValidationError, best_match

from bounds import EnsembleSpec
from errors import ConfigError, MixboundError, ParameterError
from norms import BmoConfig
from scenarios import FieldSpec, ScenarioSpec
from settings import default_output_dir
from spectral import Grid

SCHEMA_DIR = Path(__file__).resolve().parent / "schemas"

DEFAULT_CHECKS = ("mixing_bmo", "mixing_sup", "gradient_theta", "gradient_omega")
ESTIMATORS = ("jacobian_bmo", "riesz_bmo")
DEFAULT_SAMPLES_PER_UNIT_TIME = 50

_INT_KEYS = ("m", "kx", "ky", "n", "seed", "size", "center_stride")


# ═══════════════════════════════════════════════════════════════════════════════
# Schema validation
# ═══════════════════════════════════════════════════════════════════════════════

@lru_cache(maxsize=None)
def load_schema(name: str) -> Dict[str, Any]:
    with open(SCHEMA_DIR / f"{name}.schema.json", "r") as f:
        schema = json.load(f)
    Draft202012Validator.check_schema(schema)
    return schema


def key_path(parts: Iterable) -> str:
    """["scenario", "omega0", "m"] -> "scenario.omega0.m", ["checks", 1] -> "checks[1]"."""
    out = ""
    for part in parts:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out = f"{out}.{part}" if out else str(part)
    return out


def _describe(error: ValidationError) -> Tuple[str, str]:
    parts = list(error.absolute_path)
    if error.validator == "additionalProperties":
        allowed = sorted(error.schema.get("properties", {}))
        extra = sorted(set(error.instance) - set(allowed))
        return key_path(parts + extra[:1]), f"unknown key (allowed: {', '.join(allowed)})"
    if error.validator == "required":
        missing = [key for key in error.validator_value if key not in error.instance]
        return key_path(parts + missing[:1]), "is required"
    return key_path(parts), error.message


def validate(data: Any, schema_name: str) -> Mapping:
    validator = Draft202012Validator(load_schema(schema_name))
    error = best_match(validator.iter_errors(data))
    if error is not None:
        raise ConfigError(*_describe(error))
    return data


def _typed(data: Mapping) -> Dict[str, Any]:
    """Validated JSON numbers as the ints and floats the dataclasses expect."""
    out = {}
    for key, value in data.items():
        if key in _INT_KEYS:
            value = int(value)
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            value = float(value)
        out[key] = value
    return out


# ═══════════════════════════════════════════════════════════════════════════════
# Sections
# ═══════════════════════════════════════════════════════════════════════════════

def parse_scenario(data: Mapping, path: str = "scenario") -> ScenarioSpec:
    values = _typed({k: v for k, v in data.items() if k not in ("omega0", "theta0")})
    values.setdefault("name", "scenario")
    values.setdefault("sample_every", 1.0 / DEFAULT_SAMPLES_PER_UNIT_TIME)
    spec = ScenarioSpec(omega0=FieldSpec(**_typed(data["omega0"])),
                        theta0=FieldSpec(**_typed(data["theta0"])), **values)
    try:
        Grid(spec.n)
    except MixboundError as e:
        raise ConfigError(f"{path}.n", str(e))
    try:
        spec.step_control()
    except MixboundError as e:
        raise ConfigError(path, str(e))
    return spec


@dataclass(frozen=True)
class BmoSettings:
    """
    BMO sweep settings, resolved against each grid. centers_per_side, when
    set, replaces center_stride with n // centers_per_side so every
    resolution samples the same physical centers.
    """

    center_stride: int = 4
    radii: Optional[Tuple[float, ...]] = None
    exhaustive: bool = False
    centers_per_side: Optional[int] = None

    def stride(self, grid: Grid) -> int:
        if self.centers_per_side is None:
            return self.center_stride
        if grid.n % self.centers_per_side != 0:
            raise ParameterError(f"centers_per_side {self.centers_per_side} does not divide n={grid.n}")
        return grid.n // self.centers_per_side

    def resolve(self, grid: Grid) -> BmoConfig:
        if self.exhaustive:
            cfg = BmoConfig.exhaustive(grid)
        elif self.radii is None:
            cfg = BmoConfig.default(grid, self.stride(grid))
        else:
            cfg = BmoConfig(self.radii, self.stride(grid))
        cfg.validate(grid)
        return cfg


def parse_bmo(data: Optional[Mapping], path: str = "bmo") -> BmoSettings:
    if data is None:
        return BmoSettings()
    if "center_stride" in data and "centers_per_side" in data:
        raise ConfigError(path, "give center_stride or centers_per_side, not both")
    radii = data.get("radii")
    per_side = data.get("centers_per_side")
    return BmoSettings(
        center_stride=int(data.get("center_stride", 4)),
        radii=None if radii is None else tuple(float(r) for r in radii),
        exhaustive=data.get("exhaustive", False),
        centers_per_side=None if per_side is None else int(per_side),
    )


# ═══════════════════════════════════════════════════════════════════════════════
# Top-level configs
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class OutputPaths:
    directory: Path
    records: str = "records.ndjson"
    csv: str = "records.csv"
    report: str = "report.json"
    plot: Optional[str] = None

    def path(self, name: str) -> Path:
        return self.directory / name


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioSpec
    bmo: BmoSettings
    outputs: OutputPaths
    checks: Tuple[str, ...] = field(default=DEFAULT_CHECKS)


@dataclass(frozen=True)
class EstimateConfig:
    ensemble: EnsembleSpec
    resolutions: Tuple[int, ...]
    bmo: BmoSettings
    estimators: Tuple[str, ...]
    output: Path


def _resolve_dir(raw: Optional[str], base: Path, fallback: str) -> Path:
    if raw is None:
        env_dir = default_output_dir()
        return (env_dir or Path("runs")) / fallback
    p = Path(raw)
    return p if p.is_absolute() else base / p


def parse_outputs(data: Optional[Mapping], base: Path, scenario_name: str) -> OutputPaths:
    data = data or {}
    return OutputPaths(
        directory=_resolve_dir(data.get("dir"), base, scenario_name),
        records=data.get("records", "records.ndjson"),
        csv=data.get("csv", "records.csv"),
        report=data.get("report", "report.json"),
        plot=data.get("plot"),
    )


def parse_run_config(data: Any, base: Path = Path(".")) -> RunConfig:
    validate(data, "run")
    scenario = parse_scenario(data["scenario"])
    bmo = parse_bmo(data.get("bmo"))
    try:
        bmo.resolve(scenario.grid)
    except MixboundError as e:
        raise ConfigError("bmo", str(e))
    return RunConfig(
        scenario=scenario,
        bmo=bmo,
        outputs=parse_outputs(data.get("outputs"), base, scenario.name),
        checks=tuple(data.get("checks", DEFAULT_CHECKS)),
    )


def parse_estimate_config(data: Any, base: Path = Path(".")) -> EstimateConfig:
    validate(data, "estimate")
    values = _typed(data.get("ensemble", {}))
    values.setdefault("size", 100)
    try:
        ensemble = EnsembleSpec(**values)
    except MixboundError as e:
        raise ConfigError("ensemble", str(e))
    if ensemble.k_lo > ensemble.k_hi:
        raise ConfigError("ensemble", f"need k_lo <= k_hi, got k_lo={ensemble.k_lo}, k_hi={ensemble.k_hi}")

    resolutions = tuple(int(n) for n in data.get("resolutions", (64, 128, 256)))
    bmo = parse_bmo(data.get("bmo"))
    for i, n in enumerate(resolutions):
        try:
            bmo.resolve(Grid(n))
        except MixboundError as e:
            raise ConfigError(f"resolutions[{i}]", str(e))
        if ensemble.k_hi > n // 4:
            raise ConfigError(f"resolutions[{i}]", f"ensemble k_hi={ensemble.k_hi} exceeds n/4 = {n // 4}")

    raw_output = data.get("output")
    if raw_output is None:
        output = _resolve_dir(None, base, "constants") / "constants.json"
    else:
        output = Path(raw_output) if Path(raw_output).is_absolute() else base / raw_output
    return EstimateConfig(ensemble, resolutions, bmo, tuple(data.get("estimators", ESTIMATORS)), output)


def load_json(config_path: Path) -> Any:
    try:
        with open(config_path, "r") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigError("", f"config file not found: {config_path}")
    except json.JSONDecodeError as e:
        raise ConfigError("", f"{config_path} is not valid JSON: {e}")


def load_run_config(config_path: Path) -> RunConfig:
    config_path = Path(config_path)
    return parse_run_config(load_json(config_path), config_path.parent)


def load_estimate_config(config_path: Path) -> EstimateConfig:
    config_path = Path(config_path)
    return parse_estimate_config(load_json(config_path), config_path.parent)


def prepare_directory(directory: Path, key: str = "outputs.dir") -> Path:
    """Create the output directory and make sure it is writable."""
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(key, f"cannot create {directory}: {e}")
    if not os.access(directory, os.W_OK):
        raise ConfigError(key, f"{directory} is not writable")
    return directory

"""Run configuration: schema, defaults, environment overrides and hashing.

A config is a JSON document. Unknown keys are rejected at every level.
Any key can be overridden from the environment with
``NETLOAD_UQ_<SECTION>__<KEY>=<json value>``; for example
``NETLOAD_UQ_GRID__PV_LEVELS=[0,2,4]`` or ``NETLOAD_UQ_SEED=7``. Values that
are not valid JSON are taken as plain strings.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Any, Literal, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigError
from .report import MetricOptions
from .scenario import EV_PRESETS, EvModelParams

ENV_PREFIX = "NETLOAD_UQ_"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SyntheticBase(_Strict):
    """Generated base load, used when no CSV is given."""

    kind: Literal["residential", "constant", "morning_dip", "operational", "office"] = "residential"
    n_days: int = Field(365, ge=1)
    dt_h: float = Field(0.25, gt=0)
    annual_kwh: Optional[float] = Field(None, gt=0)


class InputsConfig(_Strict):
    """Where the base load and the per-kWp PV shape come from.

    ``base`` / ``pv_norm`` are CSV paths (relative paths resolve against the
    config file). When absent, synthetic stand-ins are generated from
    ``synthetic`` and the run seed.
    """

    base: Optional[str] = None
    pv_norm: Optional[str] = None
    synthetic: SyntheticBase = SyntheticBase()
    pv_annual_yield: float = Field(950.0, gt=0)


class EvConfig(_Strict):
    """EV behaviour: a preset plus optional field overrides."""

    preset: Literal["residential", "industrial", "office"] = "residential"
    overrides: dict[str, Any] = Field(default_factory=dict)

    def params(self, seed: int) -> EvModelParams:
        known = set(EvModelParams.__dataclass_fields__)
        unknown = set(self.overrides) - known
        if unknown:
            raise ConfigError(f"unknown EV model fields {sorted(unknown)}; allowed: {sorted(known)}")
        return EV_PRESETS[self.preset](**{"seed": seed, **self.overrides})


class GridConfig(_Strict):
    """Penetration levels: PV in kWp, EV charger power in kW."""

    pv_levels: list[float] = Field(default_factory=lambda: [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0])
    ev_levels: list[float] = Field(default_factory=lambda: [0.0, 3.7, 7.4, 11.0])

    @field_validator("pv_levels", "ev_levels")
    @classmethod
    def _non_negative(cls, v):
        if any(x < 0 for x in v):
            raise ValueError("levels must be non-negative")
        return v


class MetricsConfig(_Strict):
    """Metric knobs. ``kld_smoothing`` null means strict KL divergence."""

    entropy_bins: Union[int, Literal["sqrt", "fd", "sturges"]] = "sqrt"
    divergence_bins: int = Field(50, ge=1)
    kld_smoothing: Optional[float] = Field(None, gt=0)
    percentile_method: Literal["linear"] = "linear"
    energy_unit: Literal["kWh", "MWh", "GWh"] = "MWh"

    def options(self) -> MetricOptions:
        return MetricOptions(
            entropy_bins=self.entropy_bins,
            divergence_bins=self.divergence_bins,
            kld_smoothing=self.kld_smoothing,
            energy_unit=self.energy_unit,
            percentile_method=self.percentile_method,
        )


class SensitivityConfig(_Strict):
    """``pool_size`` >= 2 adds the base profile as a third input."""

    pool_size: int = Field(0, ge=0)
    consumers: int = Field(1, ge=1)


class InteractionConfig(_Strict):
    pool_size: int = Field(10, ge=1)
    n_iter: int = Field(100, ge=1)
    pv_level: float = Field(5.0, ge=0)
    ev_level: Optional[float] = Field(None, ge=0)
    levels: Optional[list[float]] = None


class RunConfig(_Strict):
    inputs: InputsConfig = InputsConfig()
    ev_model: EvConfig = EvConfig()
    grid: GridConfig = GridConfig()
    metrics: MetricsConfig = MetricsConfig()
    resolutions_min: list[float] = Field(default_factory=lambda: [1.0, 5.0, 15.0, 30.0, 60.0])
    sensitivity: SensitivityConfig = SensitivityConfig()
    interaction: InteractionConfig = InteractionConfig()
    seed: int = Field(0, ge=0, lt=2**64)
    output_dir: str = "out"
    threads: int = Field(1, ge=1)

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


def _set_path(doc: dict, path: list[str], value: Any) -> None:
    node = doc
    for key in path[:-1]:
        nxt = node.setdefault(key, {})
        if not isinstance(nxt, dict):
            raise ConfigError(f"cannot override {'.'.join(path)}: {key} is not a section")
        node = nxt
    node[path[-1]] = value


def env_overrides(environ: Mapping[str, str] | None = None) -> dict[str, Any]:
    """Nested override document built from ``NETLOAD_UQ_*`` variables."""
    environ = os.environ if environ is None else environ
    doc: dict[str, Any] = {}
    for name in sorted(environ):
        if not name.startswith(ENV_PREFIX):
            continue
        path = [part.lower() for part in name[len(ENV_PREFIX):].split("__") if part]
        if not path:
            continue
        raw = environ[name]
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        _set_path(doc, path, value)
    return doc


def _merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _describe(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        where = ".".join(str(x) for x in e["loc"]) or "<root>"
        parts.append(f"{where}: {e['msg']}")
    return "; ".join(parts)


def build_config(doc: Mapping[str, Any] | None = None, environ: Mapping[str, str] | None = None) -> RunConfig:
    merged = _merge(dict(doc or {}), env_overrides(environ))
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as err:
        raise ConfigError(f"invalid config: {_describe(err)}") from None


def load_config(path: str | Path | None = None, environ: Mapping[str, str] | None = None) -> RunConfig:
    """Read a JSON config (or start from defaults), then apply env overrides.

    Relative input paths are made absolute against the config file location.
    """
    doc: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as err:
            raise ConfigError(f"{path}: invalid JSON at line {err.lineno}: {err.msg}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: top level must be an object")
        inputs = doc.get("inputs")
        if isinstance(inputs, dict):
            for key in ("base", "pv_norm"):
                if isinstance(inputs.get(key), str) and not Path(inputs[key]).is_absolute():
                    inputs[key] = str((path.parent / inputs[key]).resolve())
    return build_config(doc, environ)

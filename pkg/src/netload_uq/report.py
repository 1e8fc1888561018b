"""The full metric suite for one scenario and its serializable report."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

from .metrics_basefree import basefree_report
from .metrics_relative import relative_report
from .profile_core import DEFAULT_DIVERGENCE_BINS, DEFAULT_ENTROPY_BINS, BinPolicy, as_partition

# row order of the result tables: moments, extremes/quartiles, other, distances, errors
METRIC_NAMES = (
    "c_annual",
    "sigma",
    "skew",
    "kurt",
    "ramp",
    "entropy",
    "c_min",
    "q5",
    "lql",
    "c_max",
    "q95",
    "uql",
    "kld",
    "tvd",
    "wass",
    "mae",
    "rmse",
)

BASEFREE_METRICS = METRIC_NAMES[:12]
RELATIVE_METRICS = METRIC_NAMES[12:]

_ENERGY_SCALE = {"kWh": 1.0, "MWh": 1e-3, "GWh": 1e-6}

METRIC_UNITS = {
    "sigma": "kW",
    "skew": "-",
    "kurt": "-",
    "ramp": "kW",
    "entropy": "bit",
    "c_min": "kW",
    "q5": "kW",
    "lql": "kW",
    "c_max": "kW",
    "q95": "kW",
    "uql": "kW",
    "kld": "bit",
    "tvd": "-",
    "wass": "kW",
    "mae": "kW",
    "rmse": "kW",
}


@dataclass(frozen=True)
class MetricOptions:
    """Knobs that change metric values; every field is part of the config hash."""

    entropy_bins: BinPolicy = DEFAULT_ENTROPY_BINS
    divergence_bins: int = DEFAULT_DIVERGENCE_BINS
    kld_smoothing: float | None = None
    energy_unit: str = "MWh"
    percentile_method: str = "linear"

    def __post_init__(self):
        if self.energy_unit not in _ENERGY_SCALE:
            raise ValueError(f"energy_unit must be one of {sorted(_ENERGY_SCALE)}")
        if self.percentile_method != "linear":
            raise ValueError("only the 'linear' (type 7) percentile method is supported")

    def units(self) -> dict[str, str]:
        return {"c_annual": self.energy_unit, **METRIC_UNITS}


@dataclass
class MetricReport:
    """Metric values of one scenario in display units, with diagnostics.

    ``values`` holds every name in :data:`METRIC_NAMES`; a value of ``None``
    means undefined, and ``diagnostics["undefined"]`` says why.
    """

    values: dict[str, float | None]
    units: dict[str, str]
    diagnostics: dict[str, Any] = field(default_factory=dict)
    scenario: dict[str, Any] = field(default_factory=dict)
    provenance: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, name: str) -> float | None:
        return self.values[name]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "MetricReport":
        return cls(
            values=dict(data["values"]),
            units=dict(data["units"]),
            diagnostics=dict(data.get("diagnostics", {})),
            scenario=dict(data.get("scenario", {})),
            provenance=dict(data.get("provenance", {})),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "MetricReport":
        return cls.from_dict(json.loads(text))


def compute_metrics(base, net, options: MetricOptions | None = None, scenario: dict | None = None) -> MetricReport:
    """Evaluate all 17 metrics of ``net`` against ``base``.

    Both arguments may be profiles or daily partitions; everything is computed
    on whole days only.
    """
    options = options or MetricOptions()
    base_part, net_part = as_partition(base), as_partition(net)
    free = basefree_report(net_part, options.entropy_bins)
    rel = relative_report(base_part, net_part, options.divergence_bins, options.kld_smoothing)

    values: dict[str, float | None] = {name: getattr(free, name) for name in BASEFREE_METRICS}
    values["c_annual"] = free.c_annual * _ENERGY_SCALE[options.energy_unit]
    values.update({name: getattr(rel, name) for name in RELATIVE_METRICS})

    undefined = {}
    if values["kld"] is None:
        undefined["kld"] = "UndefinedKLD"
    if values["skew"] is None:
        undefined["skew"] = undefined["kurt"] = "AllDaysDegenerate"

    diagnostics = {
        "c_annual_kwh": free.c_annual,
        "days": net_part.D,
        "steps_per_day": net_part.T,
        "degenerate_days": free.degenerate_days,
        "kld_problem_bins": rel.kld_problem_bins,
        "kld_infinite_bins": rel.kld_infinite_bins,
        "kld_days_affected": rel.days_affected,
        "undefined": undefined,
    }
    return MetricReport(
        values=values,
        units=options.units(),
        diagnostics=diagnostics,
        scenario=dict(scenario or {}),
    )

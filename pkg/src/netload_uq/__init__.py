"""Uncertainty metrics for net-load profiles under EV and PV penetration."""

from .errors import NetloadError
from .interaction import InteractionInputs, monte_carlo_interaction, median_regression, reduction
from .profile_core import DailyPartition, TimeSeriesProfile, partition_daily, percentile, resample
from .report import METRIC_NAMES, MetricOptions, MetricReport, compute_metrics
from .scenario import EvModelParams, EvRealization, compose_net, scale_pv, sweep
from .sensitivity import first_order_indices_grid, first_order_indices_with_baseload

__all__ = [
    "DailyPartition",
    "EvModelParams",
    "EvRealization",
    "InteractionInputs",
    "METRIC_NAMES",
    "MetricOptions",
    "MetricReport",
    "NetloadError",
    "TimeSeriesProfile",
    "compose_net",
    "compute_metrics",
    "first_order_indices_grid",
    "first_order_indices_with_baseload",
    "median_regression",
    "monte_carlo_interaction",
    "partition_daily",
    "percentile",
    "reduction",
    "resample",
    "scale_pv",
    "sweep",
]

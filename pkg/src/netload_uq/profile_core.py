"""Time-series container, daily partitioning, percentiles, histograms and resampling.

Every other module works on the two containers defined here: a flat
:class:`TimeSeriesProfile` and its calendar-day view :class:`DailyPartition`.
Both are immutable; the numpy buffers they hold are flagged read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from functools import cached_property
from typing import Union

import numpy as np

from .errors import (
    EmptyInput,
    EmptyPartition,
    IncompatibleResolution,
    InvalidProfile,
    NonIntegerStepsPerDay,
    TooShort,
)

BinPolicy = Union[int, str]

DEFAULT_START = datetime(2022, 1, 1)
DEFAULT_ENTROPY_BINS: BinPolicy = "sqrt"
DEFAULT_DIVERGENCE_BINS = 50

# relative tolerance used when checking that ratios of intervals are integers
_RATIO_TOL = 1e-9
FLAT_REL_TOL = 1e-12


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


def _integral_ratio(num: float, den: float) -> int | None:
    ratio = num / den
    k = round(ratio)
    if k < 1 or abs(ratio - k) > _RATIO_TOL * max(1.0, ratio):
        return None
    return int(k)


@dataclass(frozen=True, eq=False)
class TimeSeriesProfile:
    """Uniformly sampled power series in kW.

    ``dt`` is the sampling interval in hours (0.25 for 15-minute data) and
    ``start`` the local timestamp of the first sample.
    """

    values: np.ndarray
    dt: float
    start: datetime = DEFAULT_START

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 1:
            raise InvalidProfile(f"values must be one-dimensional, got shape {values.shape}")
        if values.size < 1:
            raise InvalidProfile("profile needs at least one sample")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidProfile(f"dt must be a positive number of hours, got {self.dt!r}")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise InvalidProfile(f"non-finite value at sample {bad}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def steps_per_day(self) -> float:
        return 24.0 / self.dt

    def timestamps(self) -> list[datetime]:
        step = timedelta(hours=self.dt)
        return [self.start + i * step for i in range(self.n)]

    def with_values(self, values) -> "TimeSeriesProfile":
        """Same clock, new samples (length may differ)."""
        return TimeSeriesProfile(values, self.dt, self.start)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"TimeSeriesProfile(n={self.n}, dt={self.dt}, start={self.start.isoformat()})"


@dataclass(frozen=True, eq=False)
class DailyPartition:
    """A profile reshaped into ``D`` full calendar days of ``T`` steps each."""

    days: np.ndarray
    dt: float
    start: datetime = DEFAULT_START

    def __post_init__(self):
        days = _frozen(self.days)
        if days.ndim != 2 or days.shape[0] < 1 or days.shape[1] < 1:
            raise EmptyPartition(f"need a non-empty D x T matrix, got shape {days.shape}")
        if not np.all(np.isfinite(days)):
            raise InvalidProfile("partition contains non-finite values")
        t = _integral_ratio(24.0, self.dt)
        if t is None or t != days.shape[1]:
            raise NonIntegerStepsPerDay(
                f"{days.shape[1]} steps of {self.dt} h do not make a 24 h day"
            )
        object.__setattr__(self, "days", days)

    @property
    def D(self) -> int:
        return int(self.days.shape[0])

    @property
    def T(self) -> int:
        return int(self.days.shape[1])

    @property
    def values(self) -> np.ndarray:
        """Retained samples, flattened in time order."""
        return self.days.reshape(-1)

    @property
    def n(self) -> int:
        return self.D * self.T

    @cached_property
    def day_mean(self) -> np.ndarray:
        return self.days.mean(axis=1)

    @cached_property
    def day_std(self) -> np.ndarray:
        dev = self.days - self.day_mean[:, None]
        return np.sqrt(np.mean(dev * dev, axis=1))

    def to_profile(self) -> TimeSeriesProfile:
        return TimeSeriesProfile(self.values, self.dt, self.start)


@dataclass(frozen=True)
class PercentileSpec:
    i: float

    def __post_init__(self):
        if not (0.0 <= float(self.i) <= 100.0):
            raise ValueError(f"percentile rank must lie in [0, 100], got {self.i}")


def partition_daily(profile: TimeSeriesProfile) -> DailyPartition:
    """Cut ``profile`` into whole local-clock days.

    Samples before the first midnight at or after ``profile.start`` and the
    incomplete tail after the last full day are dropped, never padded.
    """
    t = _integral_ratio(24.0, profile.dt)
    if t is None:
        raise NonIntegerStepsPerDay(f"24 h / {profile.dt} h is not an integer")
    midnight = profile.start.replace(hour=0, minute=0, second=0, microsecond=0)
    if midnight < profile.start:
        midnight += timedelta(days=1)
    lead_h = (midnight - profile.start).total_seconds() / 3600.0
    offset = math.ceil(lead_h / profile.dt - _RATIO_TOL)
    n_days = (profile.n - offset) // t if profile.n > offset else 0
    if n_days < 1:
        raise EmptyPartition(
            f"{profile.n} samples of {profile.dt} h starting {profile.start.isoformat()} "
            "contain no full day"
        )
    first = profile.start + timedelta(hours=offset * profile.dt)
    block = profile.values[offset : offset + n_days * t]
    return DailyPartition(block.reshape(n_days, t), profile.dt, first)


def as_partition(obj) -> DailyPartition:
    if isinstance(obj, DailyPartition):
        return obj
    if isinstance(obj, TimeSeriesProfile):
        return partition_daily(obj)
    raise TypeError(f"expected TimeSeriesProfile or DailyPartition, got {type(obj).__name__}")


def percentile(values, spec: float | PercentileSpec) -> float:
    """Percentile with linear interpolation between closest ranks.

    This is the "type 7" estimator: rank ``i/100 * (n - 1)`` in the sorted
    sample, so rank 0 is the minimum and rank 100 the maximum.
    """
    if not isinstance(spec, PercentileSpec):
        spec = PercentileSpec(spec)
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInput("percentile of an empty sequence")
    return float(np.percentile(arr, spec.i, method="linear"))


# --------------------------------------------------------------------------- #
# Histograms
# --------------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class Histogram:
    """Discrete PDF on a uniform grid; ``probs[i]`` is the mass of ``[edges[i], edges[i+1])``."""

    edges: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        edges = _frozen(self.edges)
        probs = _frozen(self.probs)
        if edges.size != probs.size + 1 or probs.size < 1:
            raise ValueError("need B >= 1 probabilities and B + 1 edges")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("histogram edges must be strictly increasing")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "probs", probs)

    @property
    def n_bins(self) -> int:
        return int(self.probs.size)

    @property
    def bin_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    def cumulative(self) -> "CumulativeHistogram":
        return CumulativeHistogram(self.edges, cumulative_masses(self.probs))


@dataclass(frozen=True, eq=False)
class CumulativeHistogram:
    """Discrete CDF; ``cums[i]`` is the mass at or below ``edges[i+1]``."""

    edges: np.ndarray
    cums: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "edges", _frozen(self.edges))
        object.__setattr__(self, "cums", _frozen(self.cums))

    @property
    def bin_width(self) -> float:
        return float(self.edges[1] - self.edges[0])


def cumulative_masses(probs: np.ndarray) -> np.ndarray:
    cums = np.cumsum(probs, axis=-1)
    np.minimum(cums, 1.0, out=cums)
    cums[..., -1] = 1.0
    return cums


def has_spread(lo, hi):
    """True where ``[lo, hi]`` is wide enough to split into bins.

    Ranges below ``FLAT_REL_TOL`` of the values' magnitude are rounding
    noise and are treated like a constant day.
    """
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    scale = np.maximum(1.0, np.maximum(np.abs(lo), np.abs(hi)))
    return (hi - lo) > FLAT_REL_TOL * scale


def _degenerate_width(value) -> np.ndarray:
    return 1e-6 * np.maximum(1.0, np.abs(value))


def resolve_bins(policy: BinPolicy, values) -> int:
    """Number of bins a policy asks for on a sample of ``values``.

    Integers are taken as-is; ``"sqrt"`` gives ``ceil(sqrt(n))``; ``"fd"``
    (Freedman-Diaconis) and ``"sturges"`` defer to numpy's estimators.
    """
    if isinstance(policy, (int, np.integer)) and not isinstance(policy, bool):
        if policy < 1:
            raise ValueError(f"bin count must be >= 1, got {policy}")
        return int(policy)
    arr = np.asarray(values, dtype=np.float64)
    if policy == "sqrt":
        return max(1, math.ceil(math.sqrt(arr.size)))
    if policy in ("fd", "sturges"):
        if np.ptp(arr) == 0:
            return 1
        return max(1, len(np.histogram_bin_edges(arr, bins=policy)) - 1)
    raise ValueError(f"unknown bin policy {policy!r}")


def grid_edges(lo, hi, n_bins: int) -> np.ndarray:
    """Uniform edges for each row's ``[lo, hi]``; degenerate rows get a tiny width.

    Works on scalars or 1-D arrays of per-day bounds; the result has shape
    ``(..., n_bins + 1)``.
    """
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    wide = has_spread(lo, hi)
    width = np.where(wide, (hi - lo) / n_bins, _degenerate_width(lo))
    top = np.where(wide, hi, lo + n_bins * width)
    edges = lo[..., None] + np.arange(n_bins + 1) * width[..., None]
    edges[..., -1] = top
    return edges


def bin_counts(x: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Per-row counts of ``x`` (D x T) in ``[edges[i], edges[i+1])``, last bin closed.

    Values are assumed to lie within each row's outer edges.
    """
    x = np.atleast_2d(x)
    edges = np.atleast_2d(edges)
    n_rows, n_bins = edges.shape[0], edges.shape[1] - 1
    lo = edges[:, :1]
    width = (edges[:, -1:] - lo) / n_bins
    idx = np.floor((x - lo) / width).astype(np.intp)
    np.clip(idx, 0, n_bins - 1, out=idx)
    # floor can be off by one either way near an edge; compare against the real edges
    idx -= x < np.take_along_axis(edges, idx, axis=1)
    np.clip(idx, 0, n_bins - 1, out=idx)
    idx += (x >= np.take_along_axis(edges, idx + 1, axis=1)) & (idx < n_bins - 1)
    flat = idx + (np.arange(n_rows) * n_bins)[:, None]
    return np.bincount(flat.ravel(), minlength=n_rows * n_bins).reshape(n_rows, n_bins)


def histogram_day(day_values, bins: BinPolicy = DEFAULT_ENTROPY_BINS, value_range=None) -> Histogram:
    """Histogram of one day's values on a uniform grid.

    The grid spans the day's own ``[min, max]`` unless ``value_range`` is given.
    A day with a single distinct value gets one bin holding all the mass.
    """
    x = np.asarray(day_values, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptyInput("histogram of an empty day")
    if value_range is None:
        lo, hi = float(x.min()), float(x.max())
    else:
        lo, hi = map(float, value_range)
        if x.min() < lo or x.max() > hi:
            raise ValueError(f"values fall outside the supplied range [{lo}, {hi}]")
    n_bins = resolve_bins(bins, x) if has_spread(lo, hi) else 1
    edges = grid_edges(lo, hi, n_bins)
    counts = bin_counts(x[None, :], edges[None, :])[0]
    return Histogram(edges, counts / x.size)


def shared_histogram_pair(base_day, net_day, bins: int = DEFAULT_DIVERGENCE_BINS):
    """Histograms of two days on one grid spanning the union of their ranges."""
    b = np.asarray(base_day, dtype=np.float64).ravel()
    n = np.asarray(net_day, dtype=np.float64).ravel()
    if b.size == 0 or n.size == 0:
        raise EmptyInput("shared histogram of an empty day")
    lo = min(b.min(), n.min())
    hi = max(b.max(), n.max())
    value_range = (lo, hi)
    return (
        histogram_day(b, bins, value_range),
        histogram_day(n, bins, value_range),
    )


def daily_probabilities(partition: DailyPartition, bins: BinPolicy = DEFAULT_ENTROPY_BINS):
    """Per-day bin masses on each day's own ``[min, max]`` grid.

    Returns a ``(D, B)`` array when every day gets the same bin count, else a
    list of per-day arrays (data-dependent policies such as ``"fd"``).
    Degenerate days put all their mass in the first bin, which is equivalent
    to the single-bin histogram for every metric computed from it.
    """
    days = partition.days
    if isinstance(bins, str) and bins != "sqrt":
        return [histogram_day(row, bins).probs for row in days]
    n_bins = resolve_bins(bins, days[0])
    edges = grid_edges(days.min(axis=1), days.max(axis=1), n_bins)
    return bin_counts(days, edges) / partition.T


def shared_daily_histograms(base: DailyPartition, net: DailyPartition, bins: int = DEFAULT_DIVERGENCE_BINS):
    """Base and net masses per day on each day's shared grid.

    Returns ``(p, q, width)`` with ``p`` and ``q`` of shape ``(D, bins)`` and
    ``width`` the per-day bin width in kW.
    """
    lo = np.minimum(base.days.min(axis=1), net.days.min(axis=1))
    hi = np.maximum(base.days.max(axis=1), net.days.max(axis=1))
    n_bins = resolve_bins(bins, base.days[0])
    edges = grid_edges(lo, hi, n_bins)
    p = bin_counts(base.days, edges) / base.T
    q = bin_counts(net.days, edges) / net.T
    width = np.where(has_spread(lo, hi), (hi - lo) / n_bins, 0.0)
    return p, q, width


# --------------------------------------------------------------------------- #
# Resolution changes
# --------------------------------------------------------------------------- #


def resample(profile: TimeSeriesProfile, new_dt: float) -> TimeSeriesProfile:
    """Block-average ``profile`` onto a coarser interval ``new_dt`` (hours).

    A trailing remainder shorter than one block is dropped, so the energy of
    the retained window is preserved.
    """
    k = _integral_ratio(new_dt, profile.dt)
    if k is None:
        raise IncompatibleResolution(f"{new_dt} h is not an integer multiple of {profile.dt} h")
    n_blocks = profile.n // k
    if n_blocks < 1:
        raise TooShort(f"{profile.n} samples cannot fill one block of {k}")
    means = profile.values[: n_blocks * k].reshape(n_blocks, k).mean(axis=1)
    return TimeSeriesProfile(means, profile.dt * k, profile.start)


def resample_minutes(profile: TimeSeriesProfile, minutes: float) -> TimeSeriesProfile:
    return resample(profile, minutes / 60.0)

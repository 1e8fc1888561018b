"""Metrics computed from a single load profile, without a reference baseline.

Statistics that are defined per day (spread, shape, entropy, quartile
lengths) are averaged over the days of a :class:`DailyPartition`; annual
energy, extremes, tail percentiles and the mean ramp use the whole retained
year as one series.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import AllDaysDegenerate, TooShort
from .profile_core import (
    DEFAULT_ENTROPY_BINS,
    BinPolicy,
    DailyPartition,
    as_partition,
    daily_probabilities,
)

# a day whose std is below this fraction of its magnitude counts as constant
DEGENERATE_REL_TOL = 1e-12


def annual_consumption(profile) -> float:
    """Signed energy in kWh: sum of samples times the interval."""
    return float(np.sum(profile.values) * profile.dt)


def mean_daily_std(partition: DailyPartition) -> float:
    """Average over days of the population standard deviation (divisor T)."""
    return float(np.mean(partition.day_std))


def degenerate_days(partition: DailyPartition) -> np.ndarray:
    scale = np.maximum(1.0, np.max(np.abs(partition.days), axis=1))
    return partition.day_std <= DEGENERATE_REL_TOL * scale


def daily_standardized_moments(partition: DailyPartition) -> tuple[float, float, int]:
    """Mean daily skewness and excess kurtosis, plus the number of skipped days.

    Days with zero spread have no standardized moments and are left out of
    both averages.
    """
    skip = degenerate_days(partition)
    keep = ~skip
    if not np.any(keep):
        raise AllDaysDegenerate(f"all {partition.D} days have zero standard deviation")
    days = partition.days[keep]
    z = (days - partition.day_mean[keep, None]) / partition.day_std[keep, None]
    z2 = z * z
    skew = np.mean(np.mean(z2 * z, axis=1))
    kurt = np.mean(np.mean(z2 * z2, axis=1) - 3.0)
    return float(skew), float(kurt), int(np.count_nonzero(skip))


def mean_daily_skew(partition: DailyPartition) -> float:
    return daily_standardized_moments(partition)[0]


def mean_daily_kurt(partition: DailyPartition) -> float:
    """Mean daily excess kurtosis (a normal day scores 0)."""
    return daily_standardized_moments(partition)[1]


def mean_ramp(profile) -> float:
    """Mean absolute step-to-step change over the whole series, midnights included."""
    x = np.asarray(profile.values)
    if x.size < 2:
        raise TooShort("ramp needs at least two samples")
    return float(np.mean(np.abs(np.diff(x))))


def ramp_rate(profile) -> float:
    """Mean ramp per minute of sampling interval, in kW/min."""
    return mean_ramp(profile) / (profile.dt * 60.0)


def entropy_bits(probs) -> np.ndarray:
    """Shannon entropy in bits along the last axis, with 0 log 0 = 0."""
    p = np.asarray(probs, dtype=np.float64)
    logs = np.log2(p, out=np.zeros_like(p), where=p > 0)
    return -np.sum(p * logs, axis=-1)


def mean_daily_entropy(partition: DailyPartition, bins: BinPolicy = DEFAULT_ENTROPY_BINS) -> float:
    probs = daily_probabilities(partition, bins)
    if isinstance(probs, list):
        per_day = np.array([entropy_bits(p) for p in probs])
    else:
        per_day = entropy_bits(probs)
    return float(np.mean(per_day))


class ExtremesAndQuartiles(NamedTuple):
    c_min: float
    c_max: float
    q5: float
    q95: float
    lql: float
    uql: float


def extremes_and_quartiles(partition: DailyPartition) -> ExtremesAndQuartiles:
    """Yearly extremes and 5/95 percentiles; mean daily lower/upper quartile lengths."""
    x = partition.values
    q5, q95 = np.percentile(x, [5.0, 95.0], method="linear")
    days = partition.days
    q25, q75 = np.percentile(days, [25.0, 75.0], axis=1, method="linear")
    lql = np.mean(q25 - days.min(axis=1))
    uql = np.mean(days.max(axis=1) - q75)
    return ExtremesAndQuartiles(
        c_min=float(x.min()),
        c_max=float(x.max()),
        q5=float(q5),
        q95=float(q95),
        lql=float(lql),
        uql=float(uql),
    )


@dataclass(frozen=True)
class BasefreeReport:
    c_annual: float  # kWh
    sigma: float
    skew: float | None
    kurt: float | None
    ramp: float
    entropy: float
    c_min: float
    c_max: float
    q5: float
    q95: float
    lql: float
    uql: float
    degenerate_days: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def basefree_report(profile, entropy_bins: BinPolicy = DEFAULT_ENTROPY_BINS) -> BasefreeReport:
    """All baseline-free metrics of one profile (or partition).

    Skewness and kurtosis are ``None`` when every day is constant.
    """
    part = as_partition(profile)
    try:
        skew, kurt, n_degenerate = daily_standardized_moments(part)
    except AllDaysDegenerate:
        skew, kurt, n_degenerate = None, None, part.D
    extremes = extremes_and_quartiles(part)
    return BasefreeReport(
        c_annual=annual_consumption(part),
        sigma=mean_daily_std(part),
        skew=skew,
        kurt=kurt,
        ramp=mean_ramp(part),
        entropy=mean_daily_entropy(part, entropy_bins),
        degenerate_days=n_degenerate,
        **extremes._asdict(),
    )

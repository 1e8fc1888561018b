"""Distances between a net-load profile and its base load.

Distribution distances (KL divergence, total variation, Wasserstein-1) are
computed day by day on a grid shared by the base and net day, then averaged.
Error metrics (MAE, RMSE) compare the two series sample by sample.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import LengthMismatch, MismatchedPartitions, UndefinedKLD
from .profile_core import (
    DEFAULT_DIVERGENCE_BINS,
    DailyPartition,
    as_partition,
    cumulative_masses,
    shared_daily_histograms,
)

DEFAULT_KLD_EPSILON = 1e-9


# --------------------------------------------------------------------------- #
# Distances between discrete distributions (last axis = bins)
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class KLDResult:
    value: float
    problem_bins: int
    infinite_bins: int
    days_affected: int
    smoothing: float | None = None


def _smooth(p: np.ndarray, eps: float) -> np.ndarray:
    return (p + eps) / (1.0 + p.shape[-1] * eps)


def kl_terms(p, q, smoothing: float | None = None):
    """Per-row KL divergence in bits and the support-mismatch counts.

    Returns ``(kld_per_row, problem_bins_per_row, infinite_bins_per_row)``.
    A problem bin has mass on exactly one side; an infinite bin has base
    mass and no net mass. Without smoothing, rows with infinite bins hold
    ``inf``.
    """
    p = np.atleast_2d(np.asarray(p, dtype=np.float64))
    q = np.atleast_2d(np.asarray(q, dtype=np.float64))
    problem = np.count_nonzero((p > 0) != (q > 0), axis=-1)
    infinite = np.count_nonzero((p > 0) & (q == 0), axis=-1)
    if smoothing is not None:
        if smoothing <= 0:
            raise ValueError(f"smoothing epsilon must be positive, got {smoothing}")
        ps, qs = _smooth(p, smoothing), _smooth(q, smoothing)
        return np.sum(ps * np.log2(ps / qs), axis=-1), problem, infinite
    both = (p > 0) & (q > 0)
    ratio = np.divide(p, q, out=np.ones_like(p), where=both)
    terms = np.where(both, p * np.log2(ratio), 0.0)
    per_row = np.sum(terms, axis=-1)
    per_row = np.where(infinite > 0, np.inf, per_row)
    return per_row, problem, infinite


def kl_divergence(p, q, smoothing: float | None = None) -> float:
    """KL divergence D(p || q) in bits between two discrete distributions."""
    value, problem, infinite = kl_terms(p, q, smoothing)
    if smoothing is None and infinite[0] > 0:
        raise UndefinedKLD(int(problem[0]), int(infinite[0]), 1)
    return float(value[0])


def total_variation(p, q) -> np.ndarray | float:
    d = 0.5 * np.sum(np.abs(np.asarray(p, dtype=np.float64) - np.asarray(q, dtype=np.float64)), axis=-1)
    return float(d) if np.ndim(d) == 0 else d


def wasserstein_grid(p, q, width) -> np.ndarray | float:
    """Area between the two CDFs of masses ``p`` and ``q`` on bins of ``width``."""
    P = cumulative_masses(np.asarray(p, dtype=np.float64))
    Q = cumulative_masses(np.asarray(q, dtype=np.float64))
    d = np.sum(np.abs(P - Q), axis=-1) * width
    return float(d) if np.ndim(d) == 0 else d


# --------------------------------------------------------------------------- #
# Partition-level metrics
# --------------------------------------------------------------------------- #


def _check_pair(base, net) -> tuple[DailyPartition, DailyPartition]:
    base, net = as_partition(base), as_partition(net)
    if base.days.shape != net.days.shape or base.dt != net.dt:
        raise MismatchedPartitions(
            f"base is {base.D}x{base.T} at dt={base.dt}, net is {net.D}x{net.T} at dt={net.dt}"
        )
    return base, net


def kld(base, net, bins: int = DEFAULT_DIVERGENCE_BINS, smoothing: float | None = None) -> KLDResult:
    """Mean daily KL divergence D(base || net) in bits.

    In strict mode (``smoothing=None``) any day on which a bin carries base
    mass but no net mass makes the result undefined and :class:`UndefinedKLD`
    is raised. With ``smoothing=eps`` both PDFs are pulled towards uniform by
    ``(p + eps) / (1 + B eps)`` and the value is always finite.
    """
    base, net = _check_pair(base, net)
    p, q, _ = shared_daily_histograms(base, net, bins)
    per_day, problem, infinite = kl_terms(p, q, smoothing)
    n_problem = int(problem.sum())
    if smoothing is None and np.any(infinite > 0):
        raise UndefinedKLD(n_problem, int(infinite.sum()), int(np.count_nonzero(infinite)))
    return KLDResult(
        value=float(np.mean(per_day)),
        problem_bins=n_problem,
        infinite_bins=int(infinite.sum()),
        days_affected=int(np.count_nonzero(problem)),
        smoothing=smoothing,
    )


def tvd(base, net, bins: int = DEFAULT_DIVERGENCE_BINS) -> float:
    """Mean daily total variation distance, in [0, 1]."""
    base, net = _check_pair(base, net)
    p, q, _ = shared_daily_histograms(base, net, bins)
    return float(np.mean(total_variation(p, q)))


def wasserstein(base, net, bins: int = DEFAULT_DIVERGENCE_BINS) -> float:
    """Mean daily Wasserstein-1 distance in kW from binned CDFs."""
    base, net = _check_pair(base, net)
    p, q, width = shared_daily_histograms(base, net, bins)
    return float(np.mean(wasserstein_grid(p, q, width)))


def daily_wasserstein_exact(base, net) -> np.ndarray:
    """Per-day W1 between the empirical samples: mean gap of the sorted values."""
    base, net = _check_pair(base, net)
    return np.mean(np.abs(np.sort(base.days, axis=1) - np.sort(net.days, axis=1)), axis=1)


def wasserstein_exact(base, net) -> float:
    """Binning-free counterpart of :func:`wasserstein`, averaged over days."""
    return float(np.mean(daily_wasserstein_exact(base, net)))


def _check_series(base, net) -> tuple[np.ndarray, np.ndarray]:
    x, y = np.asarray(base.values), np.asarray(net.values)
    if x.shape != y.shape or base.dt != net.dt:
        raise LengthMismatch(f"base has {x.size} samples at dt={base.dt}, net has {y.size} at dt={net.dt}")
    return x, y


def mae(base, net) -> float:
    x, y = _check_series(base, net)
    return float(np.mean(np.abs(x - y)))


def rmse(base, net) -> float:
    x, y = _check_series(base, net)
    d = x - y
    return float(np.sqrt(np.mean(d * d)))


def daily_mae(base, net) -> np.ndarray:
    base, net = _check_pair(base, net)
    return np.mean(np.abs(base.days - net.days), axis=1)


@dataclass(frozen=True)
class RelativeReport:
    kld: float | None
    tvd: float
    wass: float
    mae: float
    rmse: float
    kld_problem_bins: int = 0
    kld_infinite_bins: int = 0
    days_affected: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def relative_report(
    base,
    net,
    bins: int = DEFAULT_DIVERGENCE_BINS,
    kld_smoothing: float | None = None,
) -> RelativeReport:
    """All baseline-dependent metrics; ``kld`` is ``None`` when undefined."""
    base, net = _check_pair(base, net)
    p, q, width = shared_daily_histograms(base, net, bins)
    per_day, problem, infinite = kl_terms(p, q, kld_smoothing)
    undefined = kld_smoothing is None and bool(np.any(infinite > 0))
    return RelativeReport(
        kld=None if undefined else float(np.mean(per_day)),
        tvd=float(np.mean(total_variation(p, q))),
        wass=float(np.mean(wasserstein_grid(p, q, width))),
        mae=mae(base, net),
        rmse=rmse(base, net),
        kld_problem_bins=int(problem.sum()),
        kld_infinite_bins=int(infinite.sum()),
        days_affected=int(np.count_nonzero(problem)),
    )

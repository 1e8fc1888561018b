"""How joint EV + PV presence differs from adding their separate effects.

For one metric with base value ``b``, PV-only value ``x``, EV-only value
``y`` and joint value ``z``, the reduction is

    (z - (x + y - b)) / |x + y - b| * 100 %

Negative values mean the combined net load is less extreme than the sum of
the two separate changes would suggest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import InvalidParams, NearZeroDenominator, TooFewLevels
from .report import MetricOptions, MetricReport, compute_metrics
from .scenario import EvModelParams, EvRealization, compose_net, scale_pv, zero_like

DEFAULT_INTERACTION_METRICS = (
    "c_annual",
    "c_min",
    "q5",
    "lql",
    "c_max",
    "q95",
    "uql",
    "sigma",
    "ramp",
    "mae",
    "rmse",
    "wass",
)

DENOMINATOR_REL_TOL = 1e-9


@dataclass(frozen=True)
class InteractionInputs:
    b: float
    x: float
    y: float
    z: float


def reduction(inputs: InteractionInputs, rel_tol: float = DENOMINATOR_REL_TOL) -> float:
    """Signed percentage change of the joint metric versus the additive prediction."""
    b, x, y, z = inputs.b, inputs.x, inputs.y, inputs.z
    additive = x + y - b
    tau = rel_tol * max(abs(b), abs(x), abs(y), 1.0)
    if abs(additive) <= tau:
        raise NearZeroDenominator(f"|x + y - b| = {abs(additive):.3g} is below {tau:.3g}")
    return (z - additive) / abs(additive) * 100.0


def median_regression(levels: Sequence[float], medians: Sequence[float]) -> tuple[float, float]:
    """Ordinary least-squares line through (level, median) pairs: ``(slope, intercept)``."""
    x = np.asarray(levels, dtype=np.float64)
    y = np.asarray(medians, dtype=np.float64)
    if x.size != y.size:
        raise InvalidParams("levels and medians must have equal length")
    if np.unique(x).size < 2:
        raise TooFewLevels("regression needs at least two distinct levels")
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def _box_stats(values: np.ndarray) -> dict[str, float]:
    q25, q50, q75 = np.percentile(values, [25.0, 50.0, 75.0], method="linear")
    return {
        "mean": float(np.mean(values)),
        "std": float(np.std(values)),
        "min": float(np.min(values)),
        "q25": float(q25),
        "median": float(q50),
        "q75": float(q75),
        "max": float(np.max(values)),
    }


@dataclass
class InteractionDraw:
    """Metric values of one Monte Carlo draw: base, PV only, EV only and both."""

    base_index: int
    ev_seed: int
    reports: dict[str, MetricReport]

    def inputs(self, metric: str) -> InteractionInputs:
        r = self.reports
        return InteractionInputs(r["base"][metric], r["pv"][metric], r["ev"][metric], r["both"][metric])


def evaluate_draw(
    base,
    pv_norm,
    realization: EvRealization,
    pv_kwp: float,
    ev_kw: float,
    options: MetricOptions | None = None,
) -> dict[str, MetricReport]:
    """Metrics of the four cases; EV-only and joint cases share one realization."""
    ev = realization.profile(ev_kw)
    pv = scale_pv(pv_norm, pv_kwp)
    none_ev, none_pv = zero_like(base), zero_like(base)
    cases = {
        "base": compose_net(base, none_ev, none_pv),
        "pv": compose_net(base, none_ev, pv),
        "ev": compose_net(base, ev, none_pv),
        "both": compose_net(base, ev, pv),
    }
    return {name: compute_metrics(base, sc.net, options) for name, sc in cases.items()}


@dataclass
class LevelSummary:
    """Reduction statistics and per-case metric distributions at one penetration level."""

    pv_kwp: float
    ev_kw: float
    reduction: dict[str, dict[str, float]] = field(default_factory=dict)
    reduction_of_means: dict[str, float | None] = field(default_factory=dict)
    excluded: dict[str, int] = field(default_factory=dict)
    case_stats: dict[str, dict[str, dict[str, float]]] = field(default_factory=dict)
    n_draws: int = 0


@dataclass
class InteractionSummary:
    levels: list[LevelSummary]
    metrics: tuple[str, ...]
    regression: dict[str, dict[str, dict[str, float]]] = field(default_factory=dict)
    seed: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "metrics": list(self.metrics),
            "levels": [vars(lv) for lv in self.levels],
            "regression": self.regression,
        }

    def rows(self) -> list[dict[str, Any]]:
        out = []
        for lv in self.levels:
            for m in self.metrics:
                stats = lv.reduction.get(m)
                row = {"pv_kwp": lv.pv_kwp, "ev_kw": lv.ev_kw, "metric": m,
                       "n": lv.n_draws - lv.excluded.get(m, 0), "excluded": lv.excluded.get(m, 0),
                       "reduction_of_means": lv.reduction_of_means.get(m)}
                for key in ("mean", "std", "min", "q25", "median", "q75", "max"):
                    row[key] = None if stats is None else stats[key]
                out.append(row)
        return out


def _summarize_level(pv_kwp, ev_kw, draws: list[InteractionDraw], metrics) -> LevelSummary:
    summary = LevelSummary(pv_kwp, ev_kw, n_draws=len(draws))
    for m in metrics:
        reductions = []
        excluded = 0
        for d in draws:
            try:
                reductions.append(reduction(d.inputs(m)))
            except (NearZeroDenominator, TypeError):
                # TypeError: the metric is undefined (None) in one of the cases
                excluded += 1
        summary.excluded[m] = excluded
        if reductions:
            summary.reduction[m] = _box_stats(np.array(reductions))
        case_means = {}
        for case in ("base", "pv", "ev", "both"):
            vals = [d.reports[case][m] for d in draws if d.reports[case][m] is not None]
            if vals:
                summary.case_stats.setdefault(case, {})[m] = _box_stats(np.array(vals))
                case_means[case] = float(np.mean(vals))
        try:
            summary.reduction_of_means[m] = reduction(
                InteractionInputs(case_means["base"], case_means["pv"], case_means["ev"], case_means["both"])
            )
        except (KeyError, NearZeroDenominator):
            summary.reduction_of_means[m] = None
    return summary


def monte_carlo_interaction(
    pool: Sequence,
    pv_norm,
    ev_params: EvModelParams,
    pv_level: float,
    ev_level: float | None = None,
    metrics: Sequence[str] = DEFAULT_INTERACTION_METRICS,
    n_iter: int = 100,
    seed: int = 0,
    options: MetricOptions | None = None,
    levels: Sequence[float] | None = None,
) -> InteractionSummary:
    """Reduction statistics over random base profiles and EV behaviours.

    Each draw picks a base profile from ``pool`` and an EV seed, and
    evaluates base, PV-only, EV-only and joint cases. With ``levels`` the
    same draws are re-evaluated at every level (PV kWp = EV kW = level) and a
    least-squares line is fitted through the per-level medians of each case.
    Without it a single level ``(pv_level, ev_level)`` is evaluated.
    """
    if n_iter < 1:
        raise InvalidParams("n_iter must be >= 1")
    if not pool:
        raise InvalidParams("empty base-load pool")
    metrics = tuple(metrics)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x1A7E,)))
    picks = rng.integers(0, len(pool), size=n_iter)
    ev_seeds = rng.integers(0, 2**31 - 1, size=n_iter)
    if levels is None:
        level_pairs = [(float(pv_level), float(pv_level if ev_level is None else ev_level))]
    else:
        level_pairs = [(float(v), float(v)) for v in levels]

    realizations = [EvRealization(pool[int(b)], ev_params, int(s)) for b, s in zip(picks, ev_seeds)]
    summaries = []
    for pv_kwp, ev_kw in level_pairs:
        draws = [
            InteractionDraw(int(b), int(s), evaluate_draw(pool[int(b)], pv_norm, real, pv_kwp, ev_kw, options))
            for b, s, real in zip(picks, ev_seeds, realizations)
        ]
        summaries.append(_summarize_level(pv_kwp, ev_kw, draws, metrics))

    result = InteractionSummary(summaries, metrics, seed=seed)
    if len(level_pairs) >= 2:
        xs = [lv.pv_kwp for lv in summaries]
        for case in ("pv", "ev", "both"):
            for m in metrics:
                medians = [lv.case_stats.get(case, {}).get(m, {}).get("median") for lv in summaries]
                if any(v is None for v in medians):
                    continue
                slope, intercept = median_regression(xs, medians)
                result.regression.setdefault(case, {})[m] = {"slope": slope, "intercept": intercept}
    return result

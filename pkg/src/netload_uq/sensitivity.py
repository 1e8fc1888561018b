"""First-order variance-based (Sobol) indices on full-factorial grids.

Inputs are discrete sweeps (PV level, EV level and optionally which base
profile), each taken as independent and uniform over its levels. On such a
grid the first-order index of input ``i`` is exact:

    S_i = Var_{X_i}( E[Y | X_i] ) / Var(Y)

with population variances over the grid cells, so there is no Monte Carlo
estimator noise. ``residual = 1 - sum(S_i)`` is the share left to
interactions.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import InvalidParams, ZeroVariance
from .report import METRIC_NAMES, MetricOptions
from .scenario import EvModelParams, EvRealization, evaluate_scenario, sweep

# metric spread below this fraction of its magnitude counts as constant
ZERO_VARIANCE_REL_TOL = 1e-12

DEFAULT_SENSITIVITY_METRICS = tuple(m for m in METRIC_NAMES if m not in ("skew", "kurt", "entropy", "kld", "tvd"))


def grid_indices(values, factors: Sequence[str] = ("pv", "ev")) -> tuple[dict[str, float], float]:
    """Exact first-order indices of an n-dimensional grid of outputs.

    ``values`` has one axis per entry of ``factors``. Returns
    ``({factor: S}, residual)``.
    """
    y = np.asarray(values, dtype=np.float64)
    if y.ndim != len(factors):
        raise InvalidParams(f"grid has {y.ndim} axes but {len(factors)} factors were named")
    if any(n < 2 for n in y.shape):
        raise InvalidParams(f"every input needs at least two levels, grid shape is {y.shape}")
    if not np.all(np.isfinite(y)):
        raise InvalidParams("grid contains undefined cells")
    total = np.var(y)
    scale = max(1.0, float(np.max(np.abs(y))))
    if total <= (ZERO_VARIANCE_REL_TOL * scale) ** 2:
        raise ZeroVariance("output is constant over the grid")
    indices = {}
    for axis, name in enumerate(factors):
        others = tuple(a for a in range(y.ndim) if a != axis)
        cond_mean = y.mean(axis=others)
        indices[name] = float(np.var(cond_mean) / total)
    return indices, 1.0 - sum(indices.values())


@dataclass
class SensitivityResult:
    """First-order indices per metric.

    ``indices[metric][factor]`` is in [0, 1]; ``undefined[metric]`` explains
    why a metric has no indices (constant output, undefined cells).
    """

    factors: tuple[str, ...]
    indices: dict[str, dict[str, float]] = field(default_factory=dict)
    residual: dict[str, float] = field(default_factory=dict)
    undefined: dict[str, str] = field(default_factory=dict)
    shape: tuple[int, ...] = ()
    n_members: int = 1

    def get(self, metric: str, factor: str) -> float:
        return self.indices[metric][factor]

    def to_dict(self) -> dict[str, Any]:
        return {
            "factors": list(self.factors),
            "indices": self.indices,
            "residual": self.residual,
            "undefined": self.undefined,
            "shape": list(self.shape),
            "n_members": self.n_members,
        }

    def rows(self) -> list[dict[str, Any]]:
        out = []
        for metric, idx in self.indices.items():
            out.append({"metric": metric, **{f"s_{f}": idx[f] for f in self.factors},
                        "residual": self.residual[metric]})
        return out


def indices_from_grids(grids: dict[str, np.ndarray], factors: Sequence[str]) -> SensitivityResult:
    """Apply :func:`grid_indices` to each metric's grid, recording failures."""
    result = SensitivityResult(tuple(factors))
    for metric, grid in grids.items():
        grid = np.asarray(grid, dtype=np.float64)
        result.shape = grid.shape
        if not np.all(np.isfinite(grid)):
            result.undefined[metric] = "undefined cells in grid"
            continue
        try:
            idx, res = grid_indices(grid, factors)
        except ZeroVariance:
            result.undefined[metric] = "ZeroVariance"
            continue
        result.indices[metric] = idx
        result.residual[metric] = res
    return result


def first_order_indices_grid(metric_grid, factors: Sequence[str] = ("pv", "ev")) -> SensitivityResult:
    """Indices of a single ``(n_pv, n_ev)`` grid or a ``{metric: grid}`` mapping."""
    if isinstance(metric_grid, dict):
        return indices_from_grids(metric_grid, factors)
    idx, res = grid_indices(metric_grid, factors)
    return SensitivityResult(tuple(factors), {"y": idx}, {"y": res}, shape=np.shape(metric_grid))


def consumer_indices(
    base,
    pv_norm,
    params: EvModelParams,
    pv_levels: Sequence[float],
    ev_levels: Sequence[float],
    seed: int | None = None,
    options: MetricOptions | None = None,
    metrics: Sequence[str] = DEFAULT_SENSITIVITY_METRICS,
    max_workers: int = 1,
) -> SensitivityResult:
    """PV/EV indices of one consumer from a full sweep over its base load."""
    result = sweep(base, pv_norm, params, pv_levels, ev_levels, seed, options, max_workers)
    return indices_from_grids({m: result.metric_grid(m) for m in metrics}, ("pv", "ev"))


def mean_indices(results: Sequence[SensitivityResult]) -> SensitivityResult:
    """Group mean of per-consumer indices; metrics undefined for a member are skipped for it."""
    if not results:
        raise InvalidParams("no results to average")
    factors = results[0].factors
    metrics = []
    for r in results:
        metrics.extend(m for m in r.indices if m not in metrics)
    mean = SensitivityResult(factors, shape=results[0].shape, n_members=len(results))
    for m in metrics:
        members = [r for r in results if m in r.indices]
        mean.indices[m] = {f: float(np.mean([r.indices[m][f] for r in members])) for f in factors}
        mean.residual[m] = float(np.mean([r.residual[m] for r in members]))
    for r in results:
        for m, why in r.undefined.items():
            if m not in mean.indices:
                mean.undefined[m] = why
    return mean


def per_consumer_indices(
    consumers: Sequence,
    pv_norm,
    params: EvModelParams,
    pv_levels: Sequence[float],
    ev_levels: Sequence[float],
    seed: int | None = None,
    options: MetricOptions | None = None,
    metrics: Sequence[str] = DEFAULT_SENSITIVITY_METRICS,
    max_workers: int = 1,
) -> tuple[list[SensitivityResult], SensitivityResult]:
    """Indices for each consumer separately and their group mean."""
    each = [
        consumer_indices(c, pv_norm, params, pv_levels, ev_levels, seed, options, metrics, max_workers)
        for c in consumers
    ]
    return each, mean_indices(each)


def first_order_indices_with_baseload(
    consumer_pool: Sequence,
    pv_norm,
    params: EvModelParams,
    pv_levels: Sequence[float],
    ev_levels: Sequence[float],
    seed: int | None = None,
    options: MetricOptions | None = None,
    metrics: Sequence[str] = DEFAULT_SENSITIVITY_METRICS,
    max_workers: int = 1,
) -> SensitivityResult:
    """Indices with the base profile as a third, categorical input.

    The grid is ``pool x pv x ev``. All pool members share one EV
    realization so that base-load variance is not confounded with charging
    randomness.
    """
    if len(consumer_pool) < 2:
        raise InvalidParams("base-load sensitivity needs a pool of at least two profiles")
    first = consumer_pool[0]
    for other in consumer_pool[1:]:
        if other.n != first.n or other.dt != first.dt or other.start != first.start:
            raise InvalidParams("pool profiles must share length, interval and start")
    realization = EvRealization(first, params, seed)
    cells = [(b, pv, ev) for b in range(len(consumer_pool)) for pv in pv_levels for ev in ev_levels]

    def run(cell):
        b, pv, ev = cell
        return evaluate_scenario(consumer_pool[b], pv_norm, realization, pv, ev, options, base_id=f"pool{b}")

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as ex:
            reports = list(ex.map(run, cells))
    else:
        reports = [run(c) for c in cells]
    shape = (len(consumer_pool), len(pv_levels), len(ev_levels))
    grids = {
        m: np.array([np.nan if r.values[m] is None else r.values[m] for r in reports]).reshape(shape)
        for m in metrics
    }
    return indices_from_grids(grids, ("b", "pv", "ev"))

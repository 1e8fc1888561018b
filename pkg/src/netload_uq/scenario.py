"""Net-load scenarios: PV scaling, stochastic EV charging and the penetration sweep.

A scenario is ``net = base + ev - pv_kwp * pv_norm``. The EV profile comes
from a parametric session model (start time, energy, session count per day)
whose draws depend only on the seed, so the same charging behaviour is
reused at every charger power and every PV level.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timedelta
from typing import Any, Sequence

import numpy as np

from .errors import AlignmentError, InvalidParams, InvalidProfile
from .profile_core import DEFAULT_START, TimeSeriesProfile
from .report import MetricOptions, MetricReport, compute_metrics


# --------------------------------------------------------------------------- #
# PV
# --------------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class PvProfile(TimeSeriesProfile):
    """PV output per installed kWp (kW/kWp), non-negative."""

    def __post_init__(self):
        super().__post_init__()
        if np.any(self.values < 0):
            raise InvalidProfile("normalized PV output must be non-negative")

    @classmethod
    def from_generation(cls, generation: TimeSeriesProfile, capacity_kwp: float) -> "PvProfile":
        """Normalize a measured generation profile by its installed capacity."""
        if capacity_kwp <= 0:
            raise InvalidParams(f"installed capacity must be positive, got {capacity_kwp}")
        return cls(np.clip(generation.values, 0.0, None) / capacity_kwp, generation.dt, generation.start)

    @classmethod
    def of(cls, profile: TimeSeriesProfile) -> "PvProfile":
        return profile if isinstance(profile, cls) else cls(profile.values, profile.dt, profile.start)

    def annual_yield(self) -> float:
        """kWh per kWp over the whole series."""
        return float(np.sum(self.values) * self.dt)


def scale_pv(pv_norm: TimeSeriesProfile, kwp: float) -> TimeSeriesProfile:
    """PV generation of a ``kwp`` installation, in kW (positive = produced)."""
    if kwp < 0:
        raise InvalidParams(f"PV level must be >= 0 kWp, got {kwp}")
    return TimeSeriesProfile(float(kwp) * np.asarray(pv_norm.values), pv_norm.dt, pv_norm.start)


# --------------------------------------------------------------------------- #
# EV sessions
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class EvModelParams:
    """Parametric EV charging behaviour.

    Start times are a mixture of normals truncated to [0, 24) h; requested
    energy is log-normal with the given mean (kWh) and log-space spread,
    capped at the battery capacity. ``session_counts`` / ``session_probs``
    give the number of sessions started per day.
    """

    start_weights: tuple[float, ...] = (0.85, 0.15)
    start_means_h: tuple[float, ...] = (18.5, 12.0)
    start_stds_h: tuple[float, ...] = (1.5, 3.0)
    energy_mean_kwh: float = 10.0
    energy_log_std: float = 0.5
    max_duration_h: float = 12.0
    battery_capacity_kwh: float = 60.0
    session_counts: tuple[int, ...] = (0, 1)
    session_probs: tuple[float, ...] = (0.3, 0.7)
    seed: int = 0

    def __post_init__(self):
        for name in ("start_weights", "start_means_h", "start_stds_h", "session_counts", "session_probs"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        k = len(self.start_weights)
        if k == 0 or len(self.start_means_h) != k or len(self.start_stds_h) != k:
            raise InvalidParams("start-time mixture needs equally many weights, means and stds")
        if len(self.session_counts) == 0 or len(self.session_counts) != len(self.session_probs):
            raise InvalidParams("session_counts and session_probs must have equal, non-zero length")
        numbers = (
            *self.start_weights, *self.start_means_h, *self.start_stds_h, *self.session_probs,
            self.energy_mean_kwh, self.energy_log_std, self.max_duration_h, self.battery_capacity_kwh,
        )
        if not all(math.isfinite(v) for v in numbers):
            raise InvalidParams("EV model parameters must be finite")
        if any(w < 0 for w in self.start_weights) or abs(sum(self.start_weights) - 1.0) > 1e-9:
            raise InvalidParams("start-time weights must be non-negative and sum to 1")
        if any(p < 0 for p in self.session_probs) or abs(sum(self.session_probs) - 1.0) > 1e-9:
            raise InvalidParams("session-count probabilities must be non-negative and sum to 1")
        if any(s <= 0 for s in self.start_stds_h) or self.energy_log_std < 0:
            raise InvalidParams("spreads must be positive")
        if self.energy_mean_kwh <= 0 or self.max_duration_h <= 0 or self.battery_capacity_kwh <= 0:
            raise InvalidParams("energy mean, max duration and battery capacity must be positive")
        if any(int(c) != c or c < 0 for c in self.session_counts):
            raise InvalidParams("session counts must be non-negative integers")

    @classmethod
    def residential(cls, **overrides) -> "EvModelParams":
        """One car, evening arrivals, about 10 kWh per session."""
        return replace(cls(), **overrides)

    @classmethod
    def industrial(cls, **overrides) -> "EvModelParams":
        """One company car charged on site, arriving with the morning shift."""
        base = cls(
            start_weights=(0.8, 0.2),
            start_means_h=(7.5, 13.0),
            start_stds_h=(1.2, 2.0),
            energy_mean_kwh=14.0,
            session_counts=(0, 1),
            session_probs=(0.35, 0.65),
        )
        return replace(base, **overrides)

    @classmethod
    def office(cls, **overrides) -> "EvModelParams":
        """Several employee cars per day, arrivals spread over working hours."""
        counts = tuple(range(0, 13))
        lam = 6.0
        weights = np.array([math.exp(-lam) * lam**k / math.factorial(k) for k in counts])
        base = cls(
            start_weights=(0.65, 0.35),
            start_means_h=(8.5, 13.0),
            start_stds_h=(1.0, 1.5),
            energy_mean_kwh=12.0,
            max_duration_h=9.0,
            session_counts=counts,
            session_probs=tuple(float(w) for w in weights / weights.sum()),
        )
        return replace(base, **overrides)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


EV_PRESETS = {
    "residential": EvModelParams.residential,
    "industrial": EvModelParams.industrial,
    "office": EvModelParams.office,
}


@dataclass(frozen=True)
class Session:
    day: int
    start_h: float
    energy_kwh: float


def _day_rng(seed: int, day: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(day,)))


def _truncated_mixture(rng: np.random.Generator, params: EvModelParams, k: int) -> np.ndarray:
    comp = rng.choice(len(params.start_weights), size=k, p=params.start_weights)
    means = np.asarray(params.start_means_h)[comp]
    stds = np.asarray(params.start_stds_h)[comp]
    out = rng.normal(means, stds)
    bad = (out < 0.0) | (out >= 24.0)
    while np.any(bad):
        out[bad] = rng.normal(means[bad], stds[bad])
        bad = (out < 0.0) | (out >= 24.0)
    return out


def draw_sessions(params: EvModelParams, n_days: int, seed: int | None = None) -> list[Session]:
    """Charging sessions for ``n_days`` days; one independent RNG stream per day."""
    seed = params.seed if seed is None else seed
    mu = math.log(params.energy_mean_kwh) - 0.5 * params.energy_log_std**2
    sessions = []
    for day in range(n_days):
        rng = _day_rng(seed, day)
        k = int(rng.choice(params.session_counts, p=params.session_probs))
        if k == 0:
            continue
        starts = _truncated_mixture(rng, params, k)
        energies = np.minimum(rng.lognormal(mu, params.energy_log_std, size=k), params.battery_capacity_kwh)
        order = np.argsort(starts, kind="stable")
        sessions.extend(Session(day, float(starts[i]), float(energies[i])) for i in order)
    return sessions


def render_sessions(
    sessions: Sequence[Session],
    ev_kw: float,
    params: EvModelParams,
    n_samples: int,
    dt: float,
    offset: int = 0,
) -> np.ndarray:
    """Constant-power charging rectangles on a grid of ``n_samples`` steps.

    Day ``d`` starts at sample ``d * 24/dt - offset``. Each session charges at
    ``min(ev_kw, power still needed)`` until its energy is delivered or the
    maximum duration is reached; anything falling off either end of the grid
    is dropped, sessions crossing midnight run into the next day.
    """
    if ev_kw < 0:
        raise InvalidParams(f"EV charger level must be >= 0 kW, got {ev_kw}")
    out = np.zeros(n_samples)
    if ev_kw == 0:
        return out
    t_per_day = round(24.0 / dt)
    max_steps = int(math.floor(params.max_duration_h / dt + 1e-9))
    step_energy = ev_kw * dt
    for s in sessions:
        i0 = s.day * t_per_day + int(s.start_h / dt) - offset
        ratio = s.energy_kwh / step_energy
        n_full = int(math.floor(ratio + 1e-12))
        residual = s.energy_kwh - n_full * step_energy
        if residual <= 1e-12 * max(1.0, s.energy_kwh):
            residual = 0.0
        n_full = min(n_full, max_steps)
        lo, hi = max(i0, 0), min(i0 + n_full, n_samples)
        if hi > lo:
            out[lo:hi] += ev_kw
        tail = i0 + n_full
        if residual > 0 and n_full < max_steps and 0 <= tail < n_samples:
            out[tail] += residual / dt
    return out


def synthesize_ev_year(
    params: EvModelParams,
    ev_kw: float,
    n_days: int = 365,
    dt: float = 0.25,
    start: datetime = DEFAULT_START,
    seed: int | None = None,
) -> TimeSeriesProfile:
    """EV charging profile over ``n_days`` days starting at midnight ``start``."""
    sessions = draw_sessions(params, n_days, seed)
    n = n_days * round(24.0 / dt)
    return TimeSeriesProfile(render_sessions(sessions, ev_kw, params, n, dt), dt, start)


class EvRealization:
    """Session draws aligned to a reference profile's clock, renderable at any charger power."""

    def __init__(self, like: TimeSeriesProfile, params: EvModelParams, seed: int | None = None):
        self.params = params
        self.seed = params.seed if seed is None else seed
        self.n, self.dt, self.start = like.n, like.dt, like.start
        midnight = like.start.replace(hour=0, minute=0, second=0, microsecond=0)
        self.offset = int(round((like.start - midnight).total_seconds() / 3600.0 / like.dt))
        t_per_day = round(24.0 / like.dt)
        n_days = math.ceil((self.offset + like.n) / t_per_day)
        self.sessions = draw_sessions(params, n_days, self.seed)

    def profile(self, ev_kw: float) -> TimeSeriesProfile:
        values = render_sessions(self.sessions, ev_kw, self.params, self.n, self.dt, self.offset)
        return TimeSeriesProfile(values, self.dt, self.start)


# --------------------------------------------------------------------------- #
# Composition
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class ScenarioSpec:
    base_id: str = "base"
    pv_kwp: float = 0.0
    ev_kw: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.pv_kwp < 0 or self.ev_kw < 0:
            raise InvalidParams("penetration levels must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class NetLoadScenario:
    base: TimeSeriesProfile
    ev: TimeSeriesProfile
    pv: TimeSeriesProfile
    net: TimeSeriesProfile
    spec: ScenarioSpec = field(default_factory=ScenarioSpec)


def _aligned(a: TimeSeriesProfile, b: TimeSeriesProfile) -> bool:
    return a.n == b.n and a.dt == b.dt and a.start == b.start


def compose_net(
    base: TimeSeriesProfile,
    ev: TimeSeriesProfile,
    pv_scaled: TimeSeriesProfile,
    spec: ScenarioSpec | None = None,
) -> NetLoadScenario:
    """``net = base + ev - pv`` sample by sample; all three must share one clock."""
    for name, other in (("ev", ev), ("pv", pv_scaled)):
        if not _aligned(base, other):
            raise AlignmentError(
                f"{name} profile ({other.n} @ {other.dt} h from {other.start}) does not match "
                f"base ({base.n} @ {base.dt} h from {base.start})"
            )
    net = (np.asarray(base.values) + np.asarray(ev.values)) - np.asarray(pv_scaled.values)
    return NetLoadScenario(base, ev, pv_scaled, base.with_values(net), spec or ScenarioSpec())


def zero_like(profile: TimeSeriesProfile) -> TimeSeriesProfile:
    return profile.with_values(np.zeros(profile.n))


# --------------------------------------------------------------------------- #
# Sweep
# --------------------------------------------------------------------------- #


@dataclass
class SweepResult:
    """Full-factorial metric grid, ``reports[i][j]`` at ``pv_levels[i]``, ``ev_levels[j]``."""

    pv_levels: list[float]
    ev_levels: list[float]
    reports: list[list[MetricReport]]
    seed: int = 0

    def metric_grid(self, name: str) -> np.ndarray:
        """``(n_pv, n_ev)`` array of one metric; undefined cells are NaN."""
        return np.array(
            [[np.nan if r.values[name] is None else r.values[name] for r in row] for row in self.reports],
            dtype=np.float64,
        )

    def heatmap_rows(self, names: Sequence[str]) -> list[tuple[float, float, str, float | None]]:
        rows = []
        for i, pv in enumerate(self.pv_levels):
            for j, ev in enumerate(self.ev_levels):
                for name in names:
                    rows.append((pv, ev, name, self.reports[i][j].values[name]))
        return rows

    def to_dict(self) -> dict[str, Any]:
        return {
            "pv_levels": list(self.pv_levels),
            "ev_levels": list(self.ev_levels),
            "seed": self.seed,
            "reports": [[r.to_dict() for r in row] for row in self.reports],
        }


def evaluate_scenario(
    base: TimeSeriesProfile,
    pv_norm: TimeSeriesProfile,
    realization: EvRealization | None,
    pv_kwp: float,
    ev_kw: float,
    options: MetricOptions | None = None,
    base_id: str = "base",
) -> MetricReport:
    ev = realization.profile(ev_kw) if realization is not None else zero_like(base)
    seed = realization.seed if realization is not None else 0
    spec = ScenarioSpec(base_id, pv_kwp, ev_kw, seed)
    scenario = compose_net(base, ev, scale_pv(pv_norm, pv_kwp), spec)
    return compute_metrics(base, scenario.net, options, spec.to_dict())


def sweep(
    base: TimeSeriesProfile,
    pv_norm: TimeSeriesProfile,
    params: EvModelParams,
    pv_levels: Sequence[float],
    ev_levels: Sequence[float],
    seed: int | None = None,
    options: MetricOptions | None = None,
    max_workers: int = 1,
    base_id: str = "base",
) -> SweepResult:
    """Evaluate every (PV level, EV level) cell against the untouched base load.

    One EV realization (fixed by ``seed``) is drawn and rendered at each
    charger power, so only the penetration levels change between cells.
    """
    pv_levels, ev_levels = [float(v) for v in pv_levels], [float(v) for v in ev_levels]
    if not pv_levels or not ev_levels:
        raise InvalidParams("sweep needs at least one PV level and one EV level")
    realization = EvRealization(base, params, seed)
    cells = [(pv, ev) for pv in pv_levels for ev in ev_levels]

    def run(cell):
        return evaluate_scenario(base, pv_norm, realization, cell[0], cell[1], options, base_id)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            flat = list(pool.map(run, cells))
    else:
        flat = [run(c) for c in cells]
    n_ev = len(ev_levels)
    grid = [flat[i * n_ev : (i + 1) * n_ev] for i in range(len(pv_levels))]
    return SweepResult(pv_levels, ev_levels, grid, realization.seed)

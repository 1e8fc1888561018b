"""Seeded synthetic base loads and PV shapes.

Real smart-meter, industrial and office data are not redistributable, so the
test-suite and the CLI demo mode run on these stand-ins. They mimic the
qualitative daily shapes of each consumer class; they are not fits to any
dataset.
"""

from __future__ import annotations

from datetime import datetime, timedelta

import numpy as np

from .profile_core import DEFAULT_START, TimeSeriesProfile

BASE_KINDS = ("residential", "constant", "morning_dip", "operational", "office")

# mean annual consumption per class, kWh
DEFAULT_ANNUAL_KWH = {
    "residential": 2500.0,
    "constant": 16.9e6,
    "morning_dip": 76e3,
    "operational": 584e3,
    "office": 1.08e6,
}

LATITUDE_DEG = 51.0


def _day_grid(n_days: int, dt: float, start: datetime):
    t_per_day = round(24.0 / dt)
    hours = (np.arange(t_per_day) + 0.5) * dt
    doy = np.array([(start + timedelta(days=d)).timetuple().tm_yday for d in range(n_days)])
    weekday = np.array([(start + timedelta(days=d)).weekday() for d in range(n_days)])
    return hours, doy, weekday


def _bump(hours, centre, width):
    return np.exp(-0.5 * ((hours - centre) / width) ** 2)


def _pulses(rng, shape, dt, rate_per_day, power_range, duration_h_range, window=(0.0, 24.0)):
    """Random rectangular appliance cycles added on top of a base shape."""
    n_days, t_per_day = shape
    out = np.zeros(n_days * t_per_day)
    counts = rng.poisson(rate_per_day, size=n_days)
    for d, k in enumerate(counts):
        if k == 0:
            continue
        starts = rng.uniform(window[0], window[1], size=k)
        powers = rng.uniform(*power_range, size=k)
        durations = rng.uniform(*duration_h_range, size=k)
        for s, p, dur in zip(starts, powers, durations):
            i0 = d * t_per_day + int(s / dt)
            i1 = min(out.size, i0 + max(1, int(round(dur / dt))))
            out[i0:i1] += p
    return out.reshape(shape)


def synthetic_base_load(
    kind: str = "residential",
    n_days: int = 365,
    dt: float = 0.25,
    start: datetime = DEFAULT_START,
    seed: int = 0,
    annual_kwh: float | None = None,
) -> TimeSeriesProfile:
    """Base-load profile of one consumer class, scaled to ``annual_kwh`` per 365 days.

    ``kind`` is one of ``residential``, ``constant``, ``morning_dip``,
    ``operational`` or ``office``.
    """
    if kind not in BASE_KINDS:
        raise ValueError(f"unknown base-load kind {kind!r}; choose from {BASE_KINDS}")
    rng = np.random.default_rng([seed, BASE_KINDS.index(kind)])
    hours, doy, weekday = _day_grid(n_days, dt, start)
    shape = (n_days, hours.size)
    season = 1.0 + 0.25 * np.cos(2 * np.pi * (doy - 15) / 365.0)[:, None]
    workday = (weekday < 5)[:, None]

    if kind == "residential":
        profile = 0.12 + 0.35 * _bump(hours, 7.5, 1.0) + 0.8 * _bump(hours, 19.5, 1.8)
        profile = profile * season * rng.lognormal(0.0, 0.25, size=(n_days, 1))
        profile = profile + _pulses(rng, shape, dt, 3.0, (0.8, 2.5), (0.1, 1.0), (6.0, 23.0))
        profile = profile * rng.lognormal(0.0, 0.15, size=shape)
    elif kind == "constant":
        profile = 1.0 + 0.08 * np.sin(2 * np.pi * hours / 24.0) + 0.05 * rng.standard_normal(shape)
        profile = profile * (1.0 + 0.04 * rng.standard_normal((n_days, 1)))
    elif kind == "morning_dip":
        profile = 1.0 - 0.7 * _bump(hours, 5.0, 1.2) + 0.1 * rng.standard_normal(shape)
        profile = profile * season
    elif kind == "operational":
        shift = 1.0 / (1.0 + np.exp(-(hours - 7.0) * 3.0)) / (1.0 + np.exp((hours - 19.0) * 3.0))
        profile = 0.3 + np.where(workday, 2.2, 0.4) * shift
        profile = profile * (1.0 + 0.12 * rng.standard_normal(shape))
    else:  # office
        shift = 1.0 / (1.0 + np.exp(-(hours - 7.5) * 2.5)) / (1.0 + np.exp((hours - 18.0) * 2.5))
        profile = 0.75 + np.where(workday, 1.0, 0.05) * shift
        profile = profile * season * (1.0 + 0.06 * rng.standard_normal(shape))

    profile = np.maximum(profile, 0.0)
    target = DEFAULT_ANNUAL_KWH[kind] if annual_kwh is None else float(annual_kwh)
    energy_per_365 = profile.sum() * dt * 365.0 / n_days
    profile = profile * (target / energy_per_365)
    return TimeSeriesProfile(profile.ravel(), dt, start)


def synthetic_pool(
    kind: str,
    size: int,
    n_days: int = 365,
    dt: float = 0.25,
    start: datetime = DEFAULT_START,
    seed: int = 0,
    spread: float = 0.6,
) -> list[TimeSeriesProfile]:
    """``size`` consumers of one class with log-normally spread annual energy."""
    rng = np.random.default_rng([seed, 7919])
    scales = rng.lognormal(0.0, spread, size=size)
    return [
        synthetic_base_load(kind, n_days, dt, start, seed=seed * 1000 + i + 1,
                            annual_kwh=DEFAULT_ANNUAL_KWH[kind] * s)
        for i, s in enumerate(scales)
    ]


def synthetic_pv_shape(
    n_days: int = 365,
    dt: float = 0.25,
    start: datetime = DEFAULT_START,
    seed: int = 0,
    annual_yield: float = 950.0,
    latitude_deg: float = LATITUDE_DEG,
) -> TimeSeriesProfile:
    """PV output per kWp installed (values in [0, 1]) with daily cloudiness.

    Clear-sky output follows the solar elevation at ``latitude_deg``; each
    day is dimmed by a random clearness index and short-term cloud flicker.
    The result is rescaled to ``annual_yield`` kWh/kWp per 365 days.
    """
    rng = np.random.default_rng([seed, 4049])
    hours, doy, _ = _day_grid(n_days, dt, start)
    phi = np.radians(latitude_deg)
    decl = np.radians(23.45) * np.sin(2 * np.pi * (284 + doy) / 365.0)
    omega = np.radians(15.0 * (hours - 12.0))
    sin_elev = (np.sin(phi) * np.sin(decl))[:, None] + (np.cos(phi) * np.cos(decl))[:, None] * np.cos(omega)
    clear = np.clip(sin_elev, 0.0, None) ** 1.2
    clearness = rng.beta(2.2, 1.6, size=(n_days, 1))
    flicker = np.clip(1.0 - 0.35 * np.abs(rng.standard_normal(clear.shape)) * (1.0 - clearness), 0.05, 1.0)
    shape = clear * (0.25 + 0.75 * clearness) * flicker
    energy_per_365 = shape.sum() * dt * 365.0 / n_days
    shape = np.clip(shape * (annual_yield / energy_per_365), 0.0, 1.0)
    return TimeSeriesProfile(shape.ravel(), dt, start)

"""Naive reference implementations, written from the formulas with plain loops.

Nothing here imports numpy or the package under test, so agreement with
the vectorized code is evidence rather than tautology. Inputs are lists of
days, each a list of floats.
"""

from __future__ import annotations

import math


def days_of(values, t_per_day, offset=0):
    """Whole days starting ``offset`` samples in; trailing partial day dropped."""
    out = []
    i = offset
    while i + t_per_day <= len(values):
        out.append([float(v) for v in values[i : i + t_per_day]])
        i += t_per_day
    return out


def flatten(days):
    return [v for day in days for v in day]


def mean(xs):
    return math.fsum(xs) / len(xs)


def pstd(xs):
    m = mean(xs)
    return math.sqrt(math.fsum((x - m) ** 2 for x in xs) / len(xs))


def pctl(xs, p):
    """Type-7: linear interpolation between closest order statistics."""
    s = sorted(xs)
    h = (len(s) - 1) * p / 100.0
    lo = math.floor(h)
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (h - lo) * (s[hi] - s[lo])


# --------------------------------------------------------------------------- #
# Baseline-free
# --------------------------------------------------------------------------- #


def c_annual(days, dt):
    return math.fsum(flatten(days)) * dt


def sigma(days):
    return mean([pstd(d) for d in days])


def _degenerate(day):
    return pstd(day) <= 1e-12 * max(1.0, max(abs(v) for v in day))


def skew(days):
    vals = []
    for d in days:
        if _degenerate(d):
            continue
        m, s = mean(d), pstd(d)
        vals.append(mean([((x - m) / s) ** 3 for x in d]))
    return mean(vals)


def kurt(days):
    vals = []
    for d in days:
        if _degenerate(d):
            continue
        m, s = mean(d), pstd(d)
        vals.append(mean([((x - m) / s) ** 4 for x in d]) - 3.0)
    return mean(vals)


def ramp(days):
    flat = flatten(days)
    return mean([abs(flat[i + 1] - flat[i]) for i in range(len(flat) - 1)])


def wide(lo, hi):
    return hi - lo > 1e-12 * max(1.0, abs(lo), abs(hi))


def edges(lo, hi, n_bins):
    if wide(lo, hi):
        w = (hi - lo) / n_bins
        e = [lo + i * w for i in range(n_bins + 1)]
        e[-1] = hi
    else:
        w = 1e-6 * max(1.0, abs(lo))
        e = [lo + i * w for i in range(n_bins + 1)]
    return e


def masses(day, e):
    """Fraction of ``day`` in each [e_i, e_{i+1}); the last bin is closed."""
    n_bins = len(e) - 1
    counts = [0] * n_bins
    for x in day:
        for i in range(n_bins):
            last = i == n_bins - 1
            if e[i] <= x < e[i + 1] or (last and e[i] <= x <= e[i + 1]):
                counts[i] += 1
                break
        else:
            raise AssertionError(f"{x} outside grid {e[0]}..{e[-1]}")
    return [c / len(day) for c in counts]


def entropy(days):
    out = []
    for d in days:
        lo, hi = min(d), max(d)
        n_bins = math.ceil(math.sqrt(len(d))) if wide(lo, hi) else 1
        p = masses(d, edges(lo, hi, n_bins))
        out.append(-math.fsum(pi * math.log2(pi) for pi in p if pi > 0))
    return mean(out)


def extremes(days):
    flat = flatten(days)
    return {
        "c_min": min(flat),
        "c_max": max(flat),
        "q5": pctl(flat, 5),
        "q95": pctl(flat, 95),
        "lql": mean([pctl(d, 25) - min(d) for d in days]),
        "uql": mean([max(d) - pctl(d, 75) for d in days]),
    }


# --------------------------------------------------------------------------- #
# Relative
# --------------------------------------------------------------------------- #


def shared_masses(base_day, net_day, n_bins):
    lo = min(min(base_day), min(net_day))
    hi = max(max(base_day), max(net_day))
    e = edges(lo, hi, n_bins)
    width = (hi - lo) / n_bins if wide(lo, hi) else 0.0
    return masses(base_day, e), masses(net_day, e), width


def kld_day(p, q, eps=None):
    """D(p||q) in bits; None if some p_i > 0 meets q_i == 0 without smoothing."""
    if eps is not None:
        k = len(p)
        p = [(v + eps) / (1 + k * eps) for v in p]
        q = [(v + eps) / (1 + k * eps) for v in q]
    total = []
    for a, b in zip(p, q):
        if a == 0:
            continue
        if b == 0:
            return None
        total.append(a * math.log2(a / b))
    return math.fsum(total)


def kld(base_days, net_days, n_bins=50, eps=None):
    vals = []
    for b, n in zip(base_days, net_days):
        p, q, _ = shared_masses(b, n, n_bins)
        v = kld_day(p, q, eps)
        if v is None:
            return None
        vals.append(v)
    return mean(vals)


def tvd(base_days, net_days, n_bins=50):
    vals = []
    for b, n in zip(base_days, net_days):
        p, q, _ = shared_masses(b, n, n_bins)
        vals.append(0.5 * math.fsum(abs(x - y) for x, y in zip(p, q)))
    return mean(vals)


def wass(base_days, net_days, n_bins=50):
    vals = []
    for b, n in zip(base_days, net_days):
        p, q, w = shared_masses(b, n, n_bins)
        cp = cq = 0.0
        area = []
        for x, y in zip(p, q):
            cp += x
            cq += y
            area.append(abs(cp - cq))
        vals.append(math.fsum(area) * w)
    return mean(vals)


def wass_exact_day(b, n):
    return mean([abs(x - y) for x, y in zip(sorted(b), sorted(n))])


def mae(base_days, net_days):
    return mean([abs(x - y) for x, y in zip(flatten(base_days), flatten(net_days))])


def rmse(base_days, net_days):
    return math.sqrt(mean([(x - y) ** 2 for x, y in zip(flatten(base_days), flatten(net_days))]))


def all_metrics(base_days, net_days, dt, n_bins=50, eps=None):
    """The 17 metrics of ``net`` against ``base``; c_annual in kWh."""
    out = {
        "c_annual": c_annual(net_days, dt),
        "sigma": sigma(net_days),
        "skew": skew(net_days),
        "kurt": kurt(net_days),
        "ramp": ramp(net_days),
        "entropy": entropy(net_days),
        **extremes(net_days),
        "kld": kld(base_days, net_days, n_bins, eps),
        "tvd": tvd(base_days, net_days, n_bins),
        "wass": wass(base_days, net_days, n_bins),
        "mae": mae(base_days, net_days),
        "rmse": rmse(base_days, net_days),
    }
    return out


# --------------------------------------------------------------------------- #
# Sensitivity and interaction
# --------------------------------------------------------------------------- #


def sobol_2d(grid):
    """First-order indices of a rectangular list-of-lists grid (rows = first input)."""
    flat = [v for row in grid for v in row]
    m = mean(flat)
    var = mean([(v - m) ** 2 for v in flat])
    rows = [mean(r) for r in grid]
    cols = [mean([grid[i][j] for i in range(len(grid))]) for j in range(len(grid[0]))]
    s1 = mean([(r - m) ** 2 for r in rows]) / var
    s2 = mean([(c - m) ** 2 for c in cols]) / var
    return s1, s2


def reduction(b, x, y, z):
    return (z - (x + y - b)) / abs(x + y - b) * 100.0

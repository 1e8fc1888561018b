import math

import numpy as np
import pytest

from netload_uq.errors import AllDaysDegenerate, TooShort
from netload_uq.metrics_basefree import (
    annual_consumption,
    basefree_report,
    daily_standardized_moments,
    entropy_bits,
    extremes_and_quartiles,
    mean_daily_entropy,
    mean_daily_kurt,
    mean_daily_skew,
    mean_daily_std,
    mean_ramp,
    ramp_rate,
)
from netload_uq.profile_core import DailyPartition, TimeSeriesProfile

import oracle as O


def day(values, dt=None):
    values = np.atleast_2d(np.asarray(values, dtype=float))
    return DailyPartition(values, dt or 24.0 / values.shape[1])


def test_annual_consumption_examples():
    assert annual_consumption(TimeSeriesProfile([1.0] * 4, 0.25)) == 1.0
    assert annual_consumption(TimeSeriesProfile(np.zeros(8), 0.25)) == 0.0
    assert annual_consumption(TimeSeriesProfile([2.0, -1.0], 0.5)) == 0.5


def test_mean_daily_std_examples():
    assert mean_daily_std(day([[3.0] * 4])) == 0.0
    assert mean_daily_std(day([[0, 0, 4, 4]])) == 2.0
    assert mean_daily_std(day([[0, 0, 4, 4], [1, 1, 1, 1]])) == 1.0


def test_skew_kurt_symmetric_day():
    assert mean_daily_skew(day([[0, 0, 4, 4]])) == 0.0
    assert mean_daily_kurt(day([[0, 0, 4, 4]])) == pytest.approx(-2.0, abs=1e-15)


def test_skew_skips_degenerate_days():
    s, k, skipped = daily_standardized_moments(day([[0, 0, 4, 4], [1, 1, 1, 1]]))
    assert skipped == 1 and s == 0.0 and k == pytest.approx(-2.0)
    with pytest.raises(AllDaysDegenerate):
        mean_daily_skew(day([[1, 1, 1, 1]]))


def test_skew_matches_oracle_on_asymmetric_day():
    d = [[0.0, 0, 0, 1, 5, 0, 2, 0]]
    assert mean_daily_skew(day(d)) == pytest.approx(O.skew(d), rel=1e-13)
    assert mean_daily_kurt(day(d)) == pytest.approx(O.kurt(d), rel=1e-13)


def test_bimodal_day_has_small_skew_and_negative_kurt():
    # two equal Gaussian modes at +-2, mirrored so the sample is exactly symmetric
    a = np.random.default_rng(0).normal(0.0, 0.5, 24)
    part = day([np.concatenate([2 + a, 2 - a, -2 + a, -2 - a])])
    assert abs(mean_daily_skew(part)) < 0.05
    assert mean_daily_kurt(part) < 0


@pytest.mark.parametrize("values, expected", [([1, 3, 2, 2], 1.0), ([5, 5, 5], 0.0), ([0, 7.5], 7.5)])
def test_mean_ramp_examples(values, expected):
    assert mean_ramp(TimeSeriesProfile(values, 0.25)) == expected


def test_mean_ramp_needs_two_samples():
    with pytest.raises(TooShort):
        mean_ramp(TimeSeriesProfile([1.0], 0.25))


def test_ramp_rate_examples():
    assert ramp_rate(TimeSeriesProfile([0.0, 6.0], 0.25)) == pytest.approx(0.4, rel=1e-15)
    assert ramp_rate(TimeSeriesProfile([2.0, 2.0, 2.0], 1 / 60)) == 0.0
    one_min = TimeSeriesProfile([0.0, 7.3], 1 / 60)
    assert ramp_rate(one_min) == pytest.approx(7.3, rel=1e-12)


def test_entropy_examples():
    assert entropy_bits([1.0]) == 0.0
    assert entropy_bits([0.25] * 4) == 2.0
    assert entropy_bits([0.5, 0.25, 0.25]) == 1.5
    assert mean_daily_entropy(day([[2.0] * 16])) == 0.0
    # 16 values spread over 4 bins, 4 each
    assert mean_daily_entropy(day([np.repeat([0.0, 1, 2, 3], 4)]), 4) == 2.0


def test_extremes_and_quartiles_examples():
    e = extremes_and_quartiles(day([[0.0, 1, 2, 3]]))
    assert e.lql == 0.75 and e.uql == 0.75
    assert (e.c_min, e.c_max) == (0.0, 3.0)
    c = extremes_and_quartiles(day([[4.0] * 8, [4.0] * 8]))
    assert c.lql == c.uql == 0.0 and c.c_min == c.c_max == 4.0


def test_report_matches_oracle_and_invariants():
    rng = np.random.default_rng(3)
    v = rng.gamma(2.0, 1.0, size=96 * 3)
    r = basefree_report(TimeSeriesProfile(v, 0.25))
    days = O.days_of(v, 96)
    assert r.c_annual == pytest.approx(O.c_annual(days, 0.25), rel=1e-12)
    assert r.entropy == pytest.approx(O.entropy(days), rel=1e-12)
    assert r.sigma >= 0 and r.ramp >= 0 and r.entropy >= 0 and r.lql >= 0 and r.uql >= 0
    assert r.c_min <= r.q5 <= r.q95 <= r.c_max
    assert r.entropy <= math.log2(math.ceil(math.sqrt(96))) + 1e-12
    assert r.degenerate_days == 0


def test_report_all_degenerate_leaves_skew_undefined():
    r = basefree_report(TimeSeriesProfile(np.full(96, 3.0), 0.25))
    assert r.skew is None and r.kurt is None and r.degenerate_days == 1
    assert r.sigma == 0.0 and r.entropy == 0.0

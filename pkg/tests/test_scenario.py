import numpy as np
import pytest

from netload_uq.errors import AlignmentError, InvalidParams, InvalidProfile
from netload_uq.profile_core import TimeSeriesProfile
from netload_uq.report import RELATIVE_METRICS, compute_metrics
from netload_uq.scenario import (
    EvModelParams,
    EvRealization,
    PvProfile,
    Session,
    compose_net,
    draw_sessions,
    render_sessions,
    scale_pv,
    sweep,
    synthesize_ev_year,
    zero_like,
)
from netload_uq.synthetic import synthetic_base_load, synthetic_pv_shape


@pytest.fixture(scope="module")
def base():
    return synthetic_base_load("residential", n_days=14)


@pytest.fixture(scope="module")
def pv():
    return PvProfile.of(synthetic_pv_shape(n_days=14))


def test_scale_pv(pv):
    assert np.all(scale_pv(pv, 0).values == 0)
    flat = PvProfile(np.full(8760, 1000 / 8760), 1.0)
    assert scale_pv(flat, 7).values.sum() * 1.0 == pytest.approx(7000.0, rel=1e-12)
    with pytest.raises(InvalidParams):
        scale_pv(pv, -1)


def test_pv_profile_validation():
    with pytest.raises(InvalidProfile):
        PvProfile([0.1, -0.2], 0.25)
    norm = PvProfile.from_generation(TimeSeriesProfile([0.0, 2.5, 5.0], 0.25), 5.0)
    assert norm.values.tolist() == [0.0, 0.5, 1.0]
    assert norm.annual_yield() == pytest.approx(0.375)


def test_ev_zero_power_gives_zero_profile():
    ev = synthesize_ev_year(EvModelParams(), 0.0, n_days=10)
    assert np.all(ev.values == 0)


def test_single_session_rectangle():
    out = render_sessions([Session(0, 10.0, 10.0)], 5.0, EvModelParams(), 96, 0.25)
    on = np.flatnonzero(out)
    assert on.tolist() == list(range(40, 48))
    assert np.all(out[on] == 5.0)


def test_session_residual_and_duration_cap():
    params = EvModelParams(max_duration_h=1.0)
    out = render_sessions([Session(0, 0.0, 3.0)], 2.0, EvModelParams(), 96, 0.25)
    assert out[:6].tolist() == [2.0] * 6 and out.sum() * 0.25 == pytest.approx(3.0)
    capped = render_sessions([Session(0, 0.0, 30.0)], 2.0, params, 96, 0.25)
    assert capped.sum() * 0.25 == pytest.approx(2.0)


def test_session_spills_past_midnight():
    out = render_sessions([Session(0, 23.0, 8.0)], 4.0, EvModelParams(), 192, 0.25)
    assert np.flatnonzero(out).tolist() == list(range(92, 100))


def test_ev_energy_matches_sessions():
    params = EvModelParams(seed=5)
    sessions = draw_sessions(params, 30)
    # one spare day so sessions spilling past the last midnight are kept
    delivered = render_sessions(sessions, 11.0, params, 31 * 96, 0.25).sum() * 0.25
    assert delivered == pytest.approx(sum(s.energy_kwh for s in sessions), rel=1e-9)


def test_draws_are_deterministic_and_day_local():
    p = EvModelParams()
    assert draw_sessions(p, 20, seed=3) == draw_sessions(p, 20, seed=3)
    short, long = draw_sessions(p, 5, seed=3), draw_sessions(p, 20, seed=3)
    assert long[: len(short)] == short
    assert draw_sessions(p, 20, seed=3) != draw_sessions(p, 20, seed=4)


def test_start_times_stay_in_day():
    sessions = draw_sessions(EvModelParams.office(), 50, seed=1)
    assert sessions and all(0 <= s.start_h < 24 for s in sessions)
    assert all(s.energy_kwh <= 60 for s in sessions)


def test_invalid_params():
    with pytest.raises(InvalidParams):
        EvModelParams(start_weights=(0.5, 0.2))
    with pytest.raises(InvalidParams):
        EvModelParams(session_counts=(0, 1), session_probs=(1.0,))
    with pytest.raises(InvalidParams):
        render_sessions([], -1.0, EvModelParams(), 10, 0.25)


def test_compose_net_pointwise():
    p = lambda v: TimeSeriesProfile(v, 0.25)
    sc = compose_net(p([1.0, 1.0]), p([0.0, 2.0]), p([1.0, 0.0]))
    assert sc.net.values.tolist() == [0.0, 3.0]
    assert np.array_equal(sc.base.values + sc.ev.values - sc.pv.values, sc.net.values)
    with pytest.raises(AlignmentError):
        compose_net(p([1.0, 1.0]), p([0.0]), p([1.0, 0.0]))


def test_compose_without_ders_is_identity(base):
    sc = compose_net(base, zero_like(base), zero_like(base))
    assert np.array_equal(sc.net.values, base.values)


def test_realization_aligned_to_offset_clock(base):
    shifted = TimeSeriesProfile(base.values[4:], base.dt, base.start.replace(hour=1))
    full = EvRealization(base, EvModelParams(), 2).profile(7.4).values
    part = EvRealization(shifted, EvModelParams(), 2).profile(7.4).values
    # sessions from day 0 that started before 01:00 get clipped; compare later days
    np.testing.assert_array_equal(full[96:], part[92:])


def test_sweep_single_cell_equals_base(base, pv):
    res = sweep(base, pv, EvModelParams(), [0.0], [0.0], seed=1)
    r = res.reports[0][0]
    assert all(r[m] == 0.0 for m in RELATIVE_METRICS)
    direct = compute_metrics(base, base)
    assert r.values == direct.values


def test_sweep_is_deterministic_and_threads_agree(base, pv):
    a = sweep(base, pv, EvModelParams(), [0, 3], [0, 7.4], seed=9)
    b = sweep(base, pv, EvModelParams(), [0, 3], [0, 7.4], seed=9, max_workers=4)
    assert a.to_dict() == b.to_dict()
    assert a.metric_grid("c_annual").shape == (2, 2)


def test_pv_lowers_and_ev_raises_c_min(base, pv):
    res = sweep(base, pv, EvModelParams(), [0, 4], [0, 11], seed=2)
    g = res.metric_grid("c_min")
    assert g[1, 0] <= g[0, 0] and g[0, 1] >= g[0, 0]

import numpy as np
import pytest

from netload_uq.errors import InvalidParams, ZeroVariance
from netload_uq.scenario import EvModelParams, PvProfile
from netload_uq.sensitivity import (
    SensitivityResult,
    first_order_indices_grid,
    first_order_indices_with_baseload,
    grid_indices,
    mean_indices,
    per_consumer_indices,
)
from netload_uq.synthetic import synthetic_base_load, synthetic_pv_shape

import oracle as O

PV = np.array([0.0, 1, 2, 3, 4])
EV = np.array([0.0, 3.7, 7.4, 11])


def test_single_active_input():
    y = np.add.outer(PV**2, np.zeros_like(EV))
    idx, res = grid_indices(y)
    assert idx["pv"] == pytest.approx(1.0, abs=1e-12) and idx["ev"] == 0.0


def test_additive_function_sums_to_one():
    y = np.add.outer(np.sin(PV), np.sqrt(EV))
    idx, res = grid_indices(y)
    assert idx["pv"] + idx["ev"] == pytest.approx(1.0, abs=1e-9)
    assert abs(res) < 1e-9
    ref = O.sobol_2d(y.tolist())
    assert (idx["pv"], idx["ev"]) == pytest.approx(ref, rel=1e-12)


def test_pure_interaction():
    y = np.multiply.outer([-1.0, 1.0], [-1.0, 1.0])
    idx, res = grid_indices(y)
    assert idx == {"pv": 0.0, "ev": 0.0} and res == 1.0


def test_errors():
    with pytest.raises(ZeroVariance):
        grid_indices(np.full((3, 3), 2.0))
    with pytest.raises(InvalidParams):
        grid_indices(np.ones((1, 3)))
    with pytest.raises(InvalidParams):
        grid_indices(np.array([[1.0, np.nan], [2, 3]]))


def test_grid_wrapper_and_undefined_metrics():
    r = first_order_indices_grid({"a": np.add.outer(PV, EV), "flat": np.ones((5, 4)),
                                  "bad": np.full((5, 4), np.nan)})
    assert set(r.indices) == {"a"}
    assert r.undefined == {"flat": "ZeroVariance", "bad": "undefined cells in grid"}
    single = first_order_indices_grid(np.add.outer(PV, EV))
    assert single.get("y", "pv") + single.get("y", "ev") == pytest.approx(1.0)


def test_mean_of_group():
    one = SensitivityResult(("pv", "ev"), {"m": {"pv": 1.0, "ev": 0.0}}, {"m": 0.0})
    assert mean_indices([one]).indices == one.indices
    assert mean_indices([one, one]).indices["m"]["pv"] == 1.0


@pytest.fixture(scope="module")
def inputs():
    base = synthetic_base_load("residential", n_days=14)
    return base, PvProfile.of(synthetic_pv_shape(n_days=14))


def test_per_consumer_single_equals_mean(inputs):
    base, pv = inputs
    each, mean = per_consumer_indices([base], pv, EvModelParams(), [0, 2, 4], [0, 7.4], seed=1,
                                      metrics=("c_annual", "sigma", "mae"))
    assert mean.indices == each[0].indices
    for idx in mean.indices.values():
        assert all(0 <= v <= 1 + 1e-12 for v in idx.values())


def test_identical_pool_has_zero_base_index(inputs):
    base, pv = inputs
    r = first_order_indices_with_baseload([base, base, base], pv, EvModelParams(), [0, 3], [0, 11],
                                          seed=1, metrics=("c_annual", "c_max"))
    assert r.factors == ("b", "pv", "ev")
    assert r.shape == (3, 2, 2)
    for m in r.indices:
        assert r.indices[m]["b"] == pytest.approx(0.0, abs=1e-12)


def test_pool_must_be_aligned(inputs):
    base, pv = inputs
    short = synthetic_base_load("residential", n_days=7)
    with pytest.raises(InvalidParams):
        first_order_indices_with_baseload([base, short], pv, EvModelParams(), [0, 1], [0, 1])
    with pytest.raises(InvalidParams):
        first_order_indices_with_baseload([base], pv, EvModelParams(), [0, 1], [0, 1])

import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effortnet.errors import DimensionMismatch, DuplicateInputs, IllConditioned
from effortnet.rbnn import FittedRbnn, fit_rbnn, predict_rbnn

from oracles import rbnn_normal_equations

# Three points 0, 1, 2 with targets 0, 1, 0 and spread 1: the activations are
# 1, 1/2, 1/16 so the system is rational. Weights solved in 50-digit mpmath.
THREE_POINT_WB = (-0.41904761904761904762, 1.9476190476190476190, -0.41904761904761904762, -0.52857142857142857143)
THREE_POINT_MID = 0.66870489600409832555384055901776787436652497354609


def test_single_pair_exact():
    model = fit_rbnn([[3.0, 1.0]], [42.0], spread=0.94)
    assert model.predict([3.0, 1.0]) == pytest.approx(42.0, rel=1e-12)
    assert model.layer.n_neurons == 1


def test_single_pair_far_away_returns_bias():
    model = fit_rbnn([[0.0]], [10.0], spread=1.0)
    assert model.predict([1e3]) == model.b2


def test_three_point_hand_solution():
    model = fit_rbnn([[0.0], [1.0], [2.0]], [0.0, 1.0, 0.0], spread=1.0)
    np.testing.assert_allclose(model.predict(np.array([[0.0], [1.0], [2.0]])), [0, 1, 0], atol=1e-9)
    np.testing.assert_allclose([*model.lw2, model.b2], THREE_POINT_WB, atol=1e-12)
    assert model.predict([0.5]) == pytest.approx(THREE_POINT_MID, abs=1e-12)
    assert model.predict([1.5]) == pytest.approx(THREE_POINT_MID, abs=1e-12)


def test_records_training_residual():
    rng = np.random.default_rng(3)
    x = rng.uniform(0, 10, size=(20, 2))
    t = rng.uniform(1, 100, size=20)
    model = fit_rbnn(x, t, spread=1.5)
    assert model.train_residual < 1e-8
    assert not model.ridge


def test_well_separated_exact_interpolation():
    rng = np.random.default_rng(11)
    x = np.column_stack([np.arange(40.0) * 3, rng.uniform(0.5, 2, 40)])
    t = rng.uniform(5, 5000, 40)
    model = fit_rbnn(x, t, spread=0.94)
    rel = np.abs(model.predict(x) - t) / t
    assert rel.max() < 1e-6


def test_conflicting_duplicates_rejected():
    with pytest.raises(DuplicateInputs):
        fit_rbnn([[1.0, 2.0], [1.0, 2.0], [3.0, 4.0]], [5.0, 6.0, 7.0], spread=1.0)


def test_agreeing_duplicates_merged():
    model = fit_rbnn([[1.0], [1.0], [3.0]], [5.0, 5.0, 7.0], spread=1.0)
    assert model.layer.n_neurons == 2
    assert model.predict([1.0]) == pytest.approx(5.0)


def test_near_singular_warns_and_uses_ridge():
    x = np.array([[0.0], [1e-9], [5.0]])
    with pytest.warns(IllConditioned):
        model = fit_rbnn(x, [1.0, 1.0, 2.0], spread=50.0)
    assert model.ridge
    assert np.all(np.isfinite(model.lw2))


def test_dimension_mismatch():
    model = fit_rbnn([[0.0, 1.0]], [1.0], spread=1.0)
    with pytest.raises(DimensionMismatch):
        predict_rbnn(model, [1.0])
    with pytest.raises(DimensionMismatch):
        fit_rbnn([[0.0], [1.0]], [1.0], spread=1.0)


def test_negative_prediction_not_clamped():
    model = fit_rbnn([[0.0], [1.0], [2.0]], [0.0, 1.0, 0.0], spread=1.0)
    assert model.predict([0.0]) == pytest.approx(0.0, abs=1e-12)
    assert model.predict([100.0]) == pytest.approx(THREE_POINT_WB[-1])
    assert model.predict([100.0]) < 0


def test_json_roundtrip():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(6, 2))
    model = fit_rbnn(x, rng.uniform(1, 9, 6), spread=0.7)
    again = FittedRbnn.from_dict(json.loads(json.dumps(model.to_dict())))
    probes = rng.normal(size=(10, 2))
    np.testing.assert_array_equal(again.predict(probes), model.predict(probes))


def distinct_points(q, r):
    return st.lists(
        st.tuples(*[st.integers(-6, 6) for _ in range(r)]), min_size=q, max_size=q, unique=True
    )


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda q: st.tuples(distinct_points(q, 2), st.lists(st.floats(-50, 50), min_size=q, max_size=q))),
       st.floats(0.5, 3.0))
def test_small_instances_match_normal_equations(data, spread):
    pts, targets = data
    x = np.array(pts, dtype=float) * 0.5
    probes = [[0.3, -0.2], [1.1, 0.9], list(x[0])]
    _, expected = rbnn_normal_equations(x, targets, spread, probes)
    model = fit_rbnn(x, targets, spread)
    np.testing.assert_allclose(model.predict(np.array(probes)), expected, atol=1e-8, rtol=0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.3, 2.0))
def test_permutation_equivariance(seed, spread):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 5, size=(7, 2))
    t = rng.uniform(1, 20, size=7)
    perm = rng.permutation(7)
    probes = rng.uniform(-1, 6, size=(15, 2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditioned)
        a = fit_rbnn(x, t, spread).predict(probes)
        b = fit_rbnn(x[perm], t[perm], spread).predict(probes)
    np.testing.assert_allclose(a, b, atol=1e-9 * max(1.0, np.abs(a).max()))


def test_spread_continuity():
    rng = np.random.default_rng(2)
    x = rng.uniform(0, 4, size=(8, 2))
    t = rng.uniform(1, 10, size=8)
    probes = rng.uniform(0, 4, size=(5, 2))
    h = 1e-4
    for s in (0.6, 0.94, 1.4):
        lo, mid, hi = (fit_rbnn(x, t, v).predict(probes) for v in (s - h, s, s + h))
        secant = np.abs(hi - lo) / 2
        jump_left, jump_right = np.abs(mid - lo), np.abs(hi - mid)
        limit = 10 * np.maximum(secant, 1e-12)
        assert np.all(jump_left <= limit) and np.all(jump_right <= limit)

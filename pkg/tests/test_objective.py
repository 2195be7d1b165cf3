import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pesmc import Bounds, ObjectiveSpec, in_bounds, log_f, make_function
from pesmc.objective import Evaluator, ObjectiveError, in_bounds_mask


def test_bounds_validation():
    with pytest.raises(ValueError):
        Bounds([0.0, 1.0], [1.0])
    with pytest.raises(ValueError):
        Bounds([0.0], [0.0])
    with pytest.raises(ValueError):
        Bounds([], [])
    b = Bounds.cube(-2.0, 4.0, 3)
    assert b.dim == 3
    np.testing.assert_array_equal(b.width, [6.0, 6.0, 6.0])
    np.testing.assert_array_equal(b.center, [1.0, 1.0, 1.0])


@pytest.mark.parametrize(
    "x, expected",
    [((0.0, 0.0), True), ((1.0, 1.0), True), ((-1.0, 1.0), True), ((1.0001, 0.0), False), ((0.0, -1.5), False)],
)
def test_in_bounds(x, expected):
    assert in_bounds(Bounds.cube(-1.0, 1.0, 2), x) is expected


def test_in_bounds_dimension_mismatch():
    with pytest.raises(ValueError):
        in_bounds(Bounds.cube(-1.0, 1.0, 2), (0.0, 0.0, 0.0))


def test_in_bounds_mask_matches_scalar():
    b = Bounds.cube(-1.0, 1.0, 2)
    X = np.array([[0.0, 0.0], [1.0, 1.0], [1.0001, 0.0], [-2.0, 0.5]])
    assert in_bounds_mask(b, X).tolist() == [in_bounds(b, x) for x in X]


def test_log_f_known_maxima():
    assert log_f(make_function("TF9", 2), [0.0, 0.0]) == pytest.approx(math.log(200.0), rel=1e-15)
    assert log_f(make_function("TF1", 2), [0.0, 0.0]) == pytest.approx(math.log(30.0), rel=1e-12)


def test_log_f_outside_bounds_is_floor():
    spec = make_function("TF9", 2)
    assert log_f(spec, [6.0, 0.0]) == math.log(1e-300)
    assert log_f(spec, [6.0, 0.0]) == spec.log_floor


def test_log_f_floors_negative_values():
    spec = make_function("TF16", 2)
    # Easom is negative just off the peak ridge
    x = [np.pi + np.pi, np.pi]
    assert spec.eval(x) < 0
    assert log_f(spec, x) == spec.log_floor


def test_log_f_wrong_length():
    with pytest.raises(ValueError):
        log_f(make_function("TF9", 2), [0.0, 0.0, 0.0])


def test_non_finite_objective_raises_with_point():
    spec = ObjectiveSpec(dim=1, bounds=Bounds.cube(-1, 1, 1), eval=lambda x: float("nan"))
    with pytest.raises(ObjectiveError) as info:
        log_f(spec, [0.25])
    np.testing.assert_array_equal(info.value.x, [0.25])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=2, max_size=2))
def test_floored_value_positive_and_deterministic(x):
    spec = make_function("TF16", 2)
    first = log_f(spec, x)
    assert math.exp(first) >= spec.f_floor > 0
    assert log_f(spec, x) == first


def test_evaluator_counts_only_in_bounds_and_tracks_best():
    spec = make_function("TF9", 2)
    ev = Evaluator(spec)
    X = np.array([[0.5, 0.5], [10.0, 0.0], [0.0, 0.0]])
    out = ev.log_f(X)
    assert ev.evaluations == 2
    assert out[1] == spec.log_floor
    assert ev.best_f == 200.0
    np.testing.assert_array_equal(ev.best_x, [0.0, 0.0])
    raw = ev.f(X)
    assert raw[1] == -np.inf and ev.evaluations == 4


def test_scalar_and_batch_paths_agree():
    spec = make_function("TF4", 2)
    rng = np.random.default_rng(1)
    X = rng.uniform(-512, 512, size=(50, 2))
    np.testing.assert_allclose(spec.evaluate(X), [spec.eval(x) for x in X], rtol=0, atol=0)

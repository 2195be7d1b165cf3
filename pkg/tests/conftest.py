import numpy as np
import pytest

from pesmc.objective import Bounds, ObjectiveSpec


class CountingObjective:
    """Wraps a batch objective and counts every row it is asked to evaluate."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def batch(self, X):
        X = np.atleast_2d(X)
        self.calls += X.shape[0]
        return self.fn(X)

    def scalar(self, x):
        self.calls += 1
        return float(self.fn(np.asarray(x, dtype=float)[None, :])[0])


@pytest.fixture
def flat_spec():
    def make(dim=2, value=3.0, low=-1.0, high=1.0):
        return ObjectiveSpec(
            dim=dim,
            bounds=Bounds.cube(low, high, dim),
            eval=lambda x: value,
            eval_batch=lambda X: np.full(np.atleast_2d(X).shape[0], value),
            name="flat",
        )

    return make

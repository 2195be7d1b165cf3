"""Bounded maximization problems and the positivity floor used by every sampler."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

DEFAULT_F_FLOOR = 1e-300


class ObjectiveError(ValueError):
    """Raised when an objective returns a non-finite value."""

    def __init__(self, x, value):
        self.x = np.array(x, dtype=float, copy=True)
        self.value = value
        super().__init__(f"objective returned non-finite value {value!r} at x={self.x.tolist()}")


@dataclass(frozen=True)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size < 1:
            raise ValueError("lower and upper must be 1-d vectors of equal length >= 1")
        if not np.all(lower < upper):
            raise ValueError("every lower edge must be strictly below its upper edge")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, low: float, high: float, dim: int) -> "Bounds":
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)


def in_bounds(bounds: Bounds, x) -> bool:
    x = np.asarray(x, dtype=float)
    if x.shape != (bounds.dim,):
        raise ValueError(f"expected a vector of length {bounds.dim}, got shape {x.shape}")
    return bool(np.all((bounds.lower <= x) & (x <= bounds.upper)))


def in_bounds_mask(bounds: Bounds, X: np.ndarray) -> np.ndarray:
    """Row-wise `in_bounds` for an (n, d) array."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != bounds.dim:
        raise ValueError(f"expected an (n, {bounds.dim}) array, got shape {X.shape}")
    return np.all((bounds.lower <= X) & (X <= bounds.upper), axis=1)


@dataclass(frozen=True)
class ObjectiveSpec:
    """A box-bounded objective to maximize.

    ``eval`` maps one d-vector to a float. ``eval_batch``, when given, maps an
    (n, d) array to n values and must agree with ``eval`` row by row; it only
    exists so that vectorized benchmarks avoid a Python call per point.
    """

    dim: int
    bounds: Bounds
    eval: Callable[[np.ndarray], float]
    f_floor: float = DEFAULT_F_FLOOR
    eval_batch: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        if self.dim < 1 or self.bounds.dim != self.dim:
            raise ValueError(f"dim={self.dim} does not match bounds of dimension {self.bounds.dim}")
        if not (self.f_floor > 0 and np.isfinite(self.f_floor)):
            raise ValueError("f_floor must be a positive finite number")

    @property
    def log_floor(self) -> float:
        return float(np.log(self.f_floor))

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        """Raw objective values for the rows of X (no bounds check, no flooring)."""
        X = np.asarray(X, dtype=float)
        if X.shape[0] == 0:
            return np.empty(0)
        if self.eval_batch is not None:
            values = np.asarray(self.eval_batch(X), dtype=float).reshape(X.shape[0])
        else:
            values = np.fromiter((self.eval(row) for row in X), dtype=float, count=X.shape[0])
        bad = ~np.isfinite(values)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise ObjectiveError(X[i], values[i])
        return values


def log_f(spec: ObjectiveSpec, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.dim,):
        raise ValueError(f"expected a vector of length {spec.dim}, got shape {x.shape}")
    if not in_bounds(spec.bounds, x):
        return spec.log_floor
    value = float(spec.eval(x))
    if not np.isfinite(value):
        raise ObjectiveError(x, value)
    return float(np.log(max(value, spec.f_floor)))


class Evaluator:
    """Counts objective calls and keeps the best point seen.

    Out-of-bounds rows are never passed to the objective; they get
    ``log(f_floor)`` directly and do not count as evaluations.
    """

    def __init__(self, spec: ObjectiveSpec):
        self.spec = spec
        self.evaluations = 0
        self.best_f = -np.inf
        self.best_x: Optional[np.ndarray] = None

    def _evaluate_inside(self, X: np.ndarray):
        inside = in_bounds_mask(self.spec.bounds, X)
        if not inside.any():
            return inside, np.empty(0)
        values = self.spec.evaluate(X[inside])
        self.evaluations += values.size
        i = int(np.argmax(values))
        if values[i] > self.best_f:
            self.best_f = float(values[i])
            self.best_x = X[inside][i].copy()
        return inside, values

    def log_f(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.full(X.shape[0], self.spec.log_floor)
        inside, values = self._evaluate_inside(X)
        out[inside] = np.log(np.maximum(values, self.spec.f_floor))
        return out

    def f(self, X: np.ndarray) -> np.ndarray:
        """Raw values with out-of-bounds rows set to -inf (used by the Boltzmann baseline)."""
        X = np.asarray(X, dtype=float)
        out = np.full(X.shape[0], -np.inf)
        inside, values = self._evaluate_inside(X)
        out[inside] = values
        return out

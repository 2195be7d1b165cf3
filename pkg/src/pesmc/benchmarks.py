"""TF1-TF17: classic minimization benchmarks translated into positive maximization problems.

Each function is written for an (n, d) array and returns n values. Every
translation has the form ``f(x) = g_s - g(x)`` with ``g`` the usual
minimization benchmark.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .objective import Bounds, ObjectiveSpec


class UnsupportedFunction(ValueError):
    pass


def _rows(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return X[None, :] if X.ndim == 1 else X


def ackley(X, a=20.0, b=0.2, c=2.0 * np.pi):
    X = _rows(X)
    s1 = np.sqrt(np.mean(X**2, axis=1))
    s2 = np.mean(np.cos(c * X), axis=1)
    return 30.0 - (-a * np.exp(-b * s1) - np.exp(s2) + a + np.e)


def cross_in_tray(X):
    X = _rows(X)
    x1, x2 = X[:, 0], X[:, 1]
    g = np.sin(x1) * np.sin(x2) * np.exp(np.abs(100.0 - np.sqrt(x1**2 + x2**2) / np.pi))
    return -0.5 + 0.0001 * (np.abs(g) + 1.0) ** 0.1


def drop_wave(X):
    X = _rows(X)
    r2 = X[:, 0] ** 2 + X[:, 1] ** 2
    return (1.0 + np.cos(12.0 * np.sqrt(r2))) / (0.5 * r2 + 2.0)


def eggholder(X):
    X = _rows(X)
    x1, x2 = X[:, 0], X[:, 1]
    g = -(x2 + 47.0) * np.sin(np.sqrt(np.abs(x2 + x1 / 2.0 + 47.0))) - x1 * np.sin(
        np.sqrt(np.abs(x1 - (x2 + 47.0)))
    )
    return 1500.0 - g


def griewank(X):
    X = _rows(X)
    i = np.arange(1, X.shape[1] + 1)
    g = np.sum(X**2, axis=1) / 4000.0 - np.prod(np.cos(X / np.sqrt(i)), axis=1) + 1.0
    return 1000.0 - g


def holder_table(X):
    X = _rows(X)
    x1, x2 = X[:, 0], X[:, 1]
    return np.abs(np.sin(x1) * np.cos(x2) * np.exp(np.abs(1.0 - np.sqrt(x1**2 + x2**2) / np.pi)))


def levy(X):
    X = _rows(X)
    w = 1.0 + (X - 1.0) / 4.0
    head = np.sin(np.pi * w[:, 0]) ** 2
    mid = np.sum((w[:, :-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * w[:, :-1] + 1.0) ** 2), axis=1)
    tail = (w[:, -1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[:, -1]) ** 2)
    return 100.0 - (head + mid + tail)


def levy13(X):
    X = _rows(X)
    x1, x2 = X[:, 0], X[:, 1]
    g = (
        np.sin(3.0 * np.pi * x1) ** 2
        + (x1 - 1.0) ** 2 * (1.0 + np.sin(3.0 * np.pi * x2) ** 2)
        + (x2 - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * x2) ** 2)
    )
    return 450.0 - g


def rastrigin(X):
    X = _rows(X)
    d = X.shape[1]
    return 200.0 - (10.0 * d + np.sum(X**2 - 10.0 * np.cos(2.0 * np.pi * X), axis=1))


def schaffer2(X):
    X = _rows(X)
    x1, x2 = X[:, 0], X[:, 1]
    g = 0.5 + (np.sin(x1**2 - x2**2) ** 2 - 0.5) / (1.0 + 0.001 * (x1**2 + x2**2)) ** 2
    return 1.0 - g


def schwefel(X):
    X = _rows(X)
    d = X.shape[1]
    return 1800.0 - (418.9829 * d - np.sum(X * np.sin(np.sqrt(np.abs(X))), axis=1))


def shubert(X):
    X = _rows(X)
    i = np.arange(1, 6)
    s1 = np.sum(i * np.cos((i + 1) * X[:, :1] + i), axis=1)
    s2 = np.sum(i * np.cos((i + 1) * X[:, 1:2] + i), axis=1)
    return 300.0 - s1 * s2


def perm0(X, beta=10.0):
    X = _rows(X)
    d = X.shape[1]
    j = np.arange(1, d + 1, dtype=float)
    g = np.zeros(X.shape[0])
    for i in range(1, d + 1):
        inner = np.sum((j + beta) * (X**i - 1.0 / j**i), axis=1)
        g += inner**2
    return 120.0 - g


def rosenbrock(X):
    X = _rows(X)
    g = np.sum(100.0 * (X[:, 1:] - X[:, :-1] ** 2) ** 2 + (X[:, :-1] - 1.0) ** 2, axis=1)
    return 1.8e5 - g


_FOXHOLE_ROW = np.array([-32.0, -16.0, 0.0, 16.0, 32.0])
FOXHOLES = np.vstack([np.tile(_FOXHOLE_ROW, 5), np.repeat(_FOXHOLE_ROW, 5)])


def dejong5(X):
    X = _rows(X)
    j = np.arange(1, 26)
    dx = (X[:, :1] - FOXHOLES[0]) ** 6 + (X[:, 1:2] - FOXHOLES[1]) ** 6
    return 510.0 - 1.0 / (0.002 + np.sum(1.0 / (j + dx), axis=1))


def easom(X):
    X = _rows(X)
    x1, x2 = X[:, 0], X[:, 1]
    return np.cos(x1) * np.cos(x2) * np.exp(-((x1 - np.pi) ** 2) - (x2 - np.pi) ** 2)


def michalewicz(X, m=10):
    X = _rows(X)
    i = np.arange(1, X.shape[1] + 1)
    return np.sum(np.sin(X) * np.sin(i * X**2 / np.pi) ** (2 * m), axis=1)


@dataclass(frozen=True)
class FunctionDef:
    name: str
    title: str
    fn: Callable[..., np.ndarray]
    bounds: Callable[[int], Tuple[float, float]]
    # None means any d >= min_dim
    dims: Optional[Tuple[int, ...]]
    goal: Callable[[int], Optional[float]]
    goal_points: Callable[[int], List[np.ndarray]] = lambda d: []
    params: Dict[str, float] = field(default_factory=dict)
    min_dim: int = 1


def _fixed(lo, hi):
    return lambda d: (lo, hi)


def _const(value):
    return lambda d: value


def _quad(a, b):
    return [np.array(p, dtype=float) for p in ((a, b), (a, -b), (-a, b), (-a, -b))]


# Published argmax coordinates, refined to double precision; each rounds to the
# printed digits.
_TF2_ARGMAX = 1.349406605295878
_TF6_ARGMAX = (8.055023473059503, 9.664590033143483)
_TF11_ARGMAX = 420.96874634727817
_TF4_ARGMAX = (512.0, 404.2318047589738)
_TF17_ARGMAX = (2.2029055241143176, np.pi / 2)
_TF15_ARGMAX = (-31.978310058105716, -31.97826188210516)

_MICHALEWICZ_GOALS = {2: 1.8013, 5: 4.687658, 10: 9.66015}

FUNCTIONS: Dict[str, FunctionDef] = {
    f.name: f
    for f in [
        FunctionDef(
            "TF1", "Ackley", ackley, _fixed(-32.768, 32.768), (2,), _const(30.0),
            lambda d: [np.zeros(d)], params={"a": 20.0, "b": 0.2, "c": 2.0 * np.pi},
        ),
        FunctionDef(
            "TF2", "Cross-in-tray", cross_in_tray, _fixed(-10.0, 10.0), (2,), _const(1.56261),
            lambda d: _quad(_TF2_ARGMAX, _TF2_ARGMAX),
        ),
        FunctionDef("TF3", "Drop-wave", drop_wave, _fixed(-5.12, 5.12), (2,), _const(1.0), lambda d: [np.zeros(2)]),
        FunctionDef(
            "TF4", "Eggholder", eggholder, _fixed(-512.0, 512.0), (2,), _const(2459.6407),
            lambda d: [np.array(_TF4_ARGMAX)],
        ),
        FunctionDef("TF5", "Griewank", griewank, _fixed(-600.0, 600.0), None, _const(1000.0), lambda d: [np.zeros(d)]),
        FunctionDef(
            "TF6", "Holder table", holder_table, _fixed(-10.0, 10.0), (2,), _const(19.2085),
            lambda d: _quad(*_TF6_ARGMAX),
        ),
        FunctionDef("TF7", "Levy", levy, _fixed(-10.0, 10.0), None, _const(100.0), lambda d: [np.ones(d)]),
        FunctionDef("TF8", "Levy N.13", levy13, _fixed(-10.0, 10.0), (2,), _const(450.0), lambda d: [np.ones(2)]),
        FunctionDef(
            "TF9", "Rastrigin", rastrigin, _fixed(-5.12, 5.12), (2, 5, 10, 20), _const(200.0),
            lambda d: [np.zeros(d)],
        ),
        FunctionDef("TF10", "Schaffer N.2", schaffer2, _fixed(-100.0, 100.0), (2,), _const(1.0), lambda d: [np.zeros(2)]),
        FunctionDef(
            "TF11", "Schwefel", schwefel, _fixed(-500.0, 500.0), (2,), _const(1800.0),
            lambda d: [np.full(d, _TF11_ARGMAX)],
        ),
        FunctionDef("TF12", "Shubert", shubert, _fixed(-10.0, 10.0), (2,), _const(486.7309)),
        FunctionDef(
            "TF13", "Perm 0,d,beta", perm0, lambda d: (-float(d), float(d)), None, _const(120.0),
            lambda d: [1.0 / np.arange(1, d + 1)], params={"beta": 10.0},
        ),
        FunctionDef(
            "TF14", "Rosenbrock", rosenbrock, _fixed(-5.0, 10.0), None, _const(1.8e5),
            lambda d: [np.ones(d)], min_dim=2,
        ),
        FunctionDef(
            "TF15", "De Jong N.5", dejong5, _fixed(-65.536, 65.536), (2,), _const(509.0020),
            lambda d: [np.array(_TF15_ARGMAX)],
        ),
        FunctionDef(
            "TF16", "Easom", easom, _fixed(-100.0, 100.0), (2,), _const(1.0),
            lambda d: [np.array([np.pi, np.pi])],
        ),
        FunctionDef(
            "TF17", "Michalewicz", michalewicz, _fixed(0.0, np.pi), (2, 5, 10), _MICHALEWICZ_GOALS.get,
            lambda d: [np.array(_TF17_ARGMAX)] if d == 2 else [], params={"m": 10},
        ),
    ]
}

# (name, dim) pairs benchmarked in the published comparison table.
TABLE_PAIRS: Tuple[Tuple[str, int], ...] = tuple(
    [(f"TF{i}", 2) for i in range(1, 9)]
    + [("TF9", d) for d in (2, 5, 10, 20)]
    + [(f"TF{i}", 2) for i in range(10, 17)]
    + [("TF17", d) for d in (2, 5, 10)]
)

# Dimensions listed for functions defined for any d.
LISTED_GENERAL_DIMS = (2, 5, 10, 20)


@dataclass(frozen=True)
class BenchmarkEntry:
    name: str
    dim: int
    title: str
    supported_dims: Optional[Tuple[int, ...]]
    bounds_per_dim: Tuple[float, float]
    goal_value: Optional[float]
    goal_points: Tuple[np.ndarray, ...]
    params: Dict[str, float]
    in_table: bool


def supported_pairs() -> List[Tuple[str, int]]:
    pairs = []
    for name, fdef in FUNCTIONS.items():
        dims = fdef.dims if fdef.dims is not None else LISTED_GENERAL_DIMS
        pairs.extend((name, d) for d in dims)
    return pairs


def _lookup(name: str, dim: int) -> FunctionDef:
    fdef = FUNCTIONS.get(str(name).upper())
    ok = fdef is not None and (
        (fdef.dims is None and int(dim) >= fdef.min_dim) or (fdef.dims is not None and int(dim) in fdef.dims)
    )
    if not ok:
        listing = ", ".join(
            f"{n}:{'/'.join(map(str, f.dims)) if f.dims else f'any d>={f.min_dim}'}" for n, f in FUNCTIONS.items()
        )
        raise UnsupportedFunction(f"unsupported function/dimension ({name}, {dim}); supported: {listing}")
    return fdef


def entry(name: str, dim: int) -> BenchmarkEntry:
    fdef = _lookup(name, dim)
    dim = int(dim)
    return BenchmarkEntry(
        name=fdef.name,
        dim=dim,
        title=fdef.title,
        supported_dims=fdef.dims,
        bounds_per_dim=fdef.bounds(dim),
        goal_value=fdef.goal(dim),
        goal_points=tuple(fdef.goal_points(dim)),
        params=dict(fdef.params),
        in_table=(fdef.name, dim) in TABLE_PAIRS,
    )


def make_function(name: str, dim: int, **params) -> ObjectiveSpec:
    """Build the ObjectiveSpec for a (name, dim) pair.

    ``params`` overrides the function constants, e.g. ``beta`` for TF13.
    """
    fdef = _lookup(name, dim)
    dim = int(dim)
    unknown = set(params) - set(fdef.params)
    if unknown:
        raise ValueError(f"{fdef.name} has no parameters {sorted(unknown)}")
    kw = {**fdef.params, **params}
    fn = fdef.fn

    def batch(X):
        return fn(X, **kw)

    def scalar(x):
        return float(fn(np.asarray(x, dtype=float)[None, :], **kw)[0])

    lo, hi = fdef.bounds(dim)
    return ObjectiveSpec(
        dim=dim,
        bounds=Bounds.cube(lo, hi, dim),
        eval=scalar,
        eval_batch=batch,
        name=f"{fdef.name}-{dim}D",
    )


def known_optimum(name: str, dim: int) -> Tuple[float, List[np.ndarray]]:
    """Published goal value and argmax points for a table pair."""
    key = (str(name).upper(), int(dim))
    if key not in TABLE_PAIRS:
        raise UnsupportedFunction(f"({name}, {dim}) is not in the published comparison table")
    e = entry(*key)
    return e.goal_value, [p.copy() for p in e.goal_points]

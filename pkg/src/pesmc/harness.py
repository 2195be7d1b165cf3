"""Benchmark plans, CSV persistence, summary statistics and the level-set quadrature check."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field, fields
import json
import math
from pathlib import Path
import time
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from . import benchmarks
from .objective import ObjectiveSpec
from .pe_smc import PeSmcConfig, RunResult, TraceRow, run
from .smc_sa import SmcSaConfig, run_smc_sa

ALGORITHMS = {"pe-smc": (run, PeSmcConfig), "smc-sa": (run_smc_sa, SmcSaConfig)}

RUN_HEADER = ["function", "dim", "algo", "seed", "best_f", "best_x", "iters", "evals", "wall_ms", "status"]
SUMMARY_HEADER = ["function", "dim", "algorithm", "n_runs", "mean_best", "std_best", "mean_evals", "mean_wall_ms"]
TRACE_HEADER = ["k", "lambda", "ness", "components", "best_f", "accept_rate"]


def fmt(x) -> str:
    """Full-precision text for a float; parses back to the same double."""
    return format(float(x), ".17g")


@dataclass
class BenchTask:
    fn: str
    dim: int
    algo: str = "pe-smc"
    runs: int = 1
    overrides: Dict[str, object] = field(default_factory=dict)

    def validate(self) -> None:
        benchmarks.entry(self.fn, self.dim)
        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}; choose from {sorted(ALGORITHMS)}")
        if int(self.runs) != self.runs or self.runs < 0:
            raise ValueError(f"runs must be a non-negative integer, got {self.runs!r}")
        cfg_cls = ALGORITHMS[self.algo][1]
        unknown = set(self.overrides) - {f.name for f in fields(cfg_cls)}
        if unknown:
            raise ValueError(f"unknown {self.algo} options {sorted(unknown)}")
        if "seed" in self.overrides:
            raise ValueError("seeds come from base_seed + run index; do not override them")
        cfg_cls(**self.overrides).validate()


@dataclass
class BenchPlan:
    tasks: List[BenchTask]
    base_seed: int = 0

    @classmethod
    def from_dict(cls, data: dict) -> "BenchPlan":
        tasks = [
            BenchTask(
                fn=t["fn"],
                dim=int(t["dim"]),
                algo=t.get("algo", "pe-smc"),
                runs=int(t.get("runs", 1)),
                overrides=dict(t.get("overrides") or {}),
            )
            for t in data.get("tasks", [])
        ]
        return cls(tasks=tasks, base_seed=int(data.get("base_seed", 0)))

    @classmethod
    def load(cls, path) -> "BenchPlan":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def validate(self) -> None:
        for task in self.tasks:
            task.validate()

    def jobs(self) -> List[Tuple[BenchTask, int]]:
        """Every (task, seed) pair in file order; run r of a task uses base_seed + r."""
        return [(t, self.base_seed + r) for t in self.tasks for r in range(t.runs)]


@dataclass
class RunRow:
    function: str
    dim: int
    algo: str
    seed: int
    best_f: float
    best_x: List[float]
    iters: int
    evals: int
    wall_ms: float
    status: str = "ok"

    def to_csv(self) -> List[str]:
        return [
            self.function,
            str(self.dim),
            self.algo,
            str(self.seed),
            fmt(self.best_f),
            ";".join(fmt(v) for v in self.best_x),
            str(self.iters),
            str(self.evals),
            fmt(self.wall_ms),
            self.status,
        ]

    @classmethod
    def from_csv(cls, rec: Dict[str, str]) -> "RunRow":
        return cls(
            function=rec["function"],
            dim=int(rec["dim"]),
            algo=rec["algo"],
            seed=int(rec["seed"]),
            best_f=float(rec["best_f"]),
            best_x=[float(v) for v in rec["best_x"].split(";")] if rec["best_x"] else [],
            iters=int(rec["iters"]),
            evals=int(rec["evals"]),
            wall_ms=float(rec["wall_ms"]),
            status=rec["status"],
        )


@dataclass
class SummaryRow:
    function: str
    dim: int
    algorithm: str
    n_runs: int
    mean_best: float
    std_best: float
    mean_evals: float
    mean_wall_ms: float

    def to_csv(self) -> List[str]:
        return [
            self.function,
            str(self.dim),
            self.algorithm,
            str(self.n_runs),
            fmt(self.mean_best),
            fmt(self.std_best),
            fmt(self.mean_evals),
            fmt(self.mean_wall_ms),
        ]


def run_algorithm(spec: ObjectiveSpec, algo: str, seed: int, **overrides) -> RunResult:
    runner, cfg_cls = ALGORITHMS[algo]
    return runner(spec, cfg_cls(**overrides), seed=seed)


def _execute(job: Tuple[BenchTask, int]) -> RunRow:
    task, seed = job
    name = benchmarks.entry(task.fn, task.dim).name
    t0 = time.perf_counter()
    try:
        result = run_algorithm(benchmarks.make_function(name, task.dim), task.algo, seed, **task.overrides)
    except Exception as exc:  # recorded in the status column
        wall = 1e3 * (time.perf_counter() - t0)
        msg = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
        return RunRow(name, task.dim, task.algo, seed, math.nan, [], 0, 0, wall, msg)
    wall = 1e3 * (time.perf_counter() - t0)
    return RunRow(
        name, task.dim, task.algo, seed, result.best_f, list(map(float, result.best_x)),
        result.iterations, result.evaluations, wall,
    )


def summarize(rows: Iterable[RunRow]) -> List[SummaryRow]:
    """Mean and sample standard deviation per (function, dim, algo) over the completed runs."""
    groups: Dict[Tuple[str, int, str], List[RunRow]] = {}
    for row in rows:
        groups.setdefault((row.function, row.dim, row.algo), [])
        if row.status == "ok":
            groups[(row.function, row.dim, row.algo)].append(row)
    out = []
    for (fn, dim, algo), done in groups.items():
        best = np.array([r.best_f for r in done])
        n = best.size
        out.append(
            SummaryRow(
                function=fn,
                dim=dim,
                algorithm=algo,
                n_runs=n,
                mean_best=float(best.mean()) if n else math.nan,
                std_best=float(best.std(ddof=1)) if n > 1 else math.nan,
                mean_evals=float(np.mean([r.evals for r in done])) if n else math.nan,
                mean_wall_ms=float(np.mean([r.wall_ms for r in done])) if n else math.nan,
            )
        )
    return out


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def read_runs(path) -> List[RunRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [RunRow.from_csv(rec) for rec in csv.DictReader(fh)]


def run_bench(plan: BenchPlan, out_dir, workers: int = 1) -> Tuple[List[RunRow], List[SummaryRow], int]:
    """Run every job of the plan and write ``runs.csv`` and ``summary.csv`` into ``out_dir``.

    Rows are ordered by (task, run index) whatever the worker count.
    Returns the rows, the summaries and the process exit code (nonzero if any run failed).
    """
    plan.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = plan.jobs()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_execute, jobs))
    else:
        rows = [_execute(job) for job in jobs]
    summary = summarize(rows)
    _write_csv(out / "runs.csv", RUN_HEADER, (r.to_csv() for r in rows))
    _write_csv(out / "summary.csv", SUMMARY_HEADER, (s.to_csv() for s in summary))
    code = 0 if all(r.status == "ok" for r in rows) else 1
    return rows, summary, code


def write_trace(path, trace: Sequence[TraceRow]) -> None:
    _write_csv(
        Path(path),
        TRACE_HEADER,
        ([str(t.k), fmt(t.lam), fmt(t.ness), str(t.components), fmt(t.best_f), fmt(t.accept_rate)] for t in trace),
    )


def read_trace(path) -> List[TraceRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            TraceRow(
                k=int(r["k"]),
                lam=float(r["lambda"]),
                ness=float(r["ness"]),
                components=int(r["components"]),
                best_f=float(r["best_f"]),
                accept_rate=float(r["accept_rate"]),
            )
            for r in csv.DictReader(fh)
        ]


def _registry_optimum(spec: ObjectiveSpec) -> float:
    name, _, dim = spec.name.partition("-")
    try:
        goal = benchmarks.entry(name, int(dim.rstrip("D"))).goal_value
    except (ValueError, benchmarks.UnsupportedFunction):
        goal = None
    if goal is None:
        raise ValueError(f"no registry optimum for {spec.name!r}; pass f_star explicitly")
    return float(goal)


def level_set_mass(spec: ObjectiveSpec, lam: float, eps: float, grid_n: int, f_star: Optional[float] = None) -> float:
    """Midpoint-rule estimate of the mass f^lam puts on {f >= f* - eps}, for d <= 2.

    Both integrals share the cell volume, so the ratio is a log-sum-exp difference.
    """
    if spec.dim > 2:
        raise ValueError("level-set quadrature is limited to d <= 2")
    if grid_n < 100:
        raise ValueError("grid_n must be at least 100")
    if not (lam > 0 and eps > 0):
        raise ValueError("lambda and eps must be positive")
    f_star = _registry_optimum(spec) if f_star is None else float(f_star)
    b = spec.bounds
    axes = [b.lower[j] + (np.arange(grid_n) + 0.5) * b.width[j] / grid_n for j in range(spec.dim)]
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    f = spec.evaluate(grid)
    log_mass = lam * np.log(np.maximum(f, spec.f_floor))
    inside = f >= f_star - eps
    if inside.all():
        return 1.0
    if not inside.any():
        return 0.0
    return float(np.exp(logsumexp(log_mass[inside]) - logsumexp(log_mass)))


def list_functions() -> List[str]:
    """One line per supported (function, dim): name, dim, box, goal value."""
    lines = []
    for name, dim in benchmarks.supported_pairs():
        e = benchmarks.entry(name, dim)
        lo, hi = e.bounds_per_dim
        goal = "-" if e.goal_value is None else format(e.goal_value, ".10g")
        lines.append(f"{name} {dim} [{lo:g},{hi:g}]^{dim} {goal}")
    return lines


def result_record(result: RunResult) -> dict:
    """JSON-friendly summary of a run (trace excluded)."""
    return {
        "algorithm": result.algorithm,
        "seed": result.seed,
        "best_f": result.best_f,
        "best_x": [float(v) for v in result.best_x],
        "iterations": result.iterations,
        "evaluations": result.evaluations,
    }


__all__ = [
    "ALGORITHMS",
    "BenchPlan",
    "BenchTask",
    "RunRow",
    "SummaryRow",
    "level_set_mass",
    "list_functions",
    "read_runs",
    "read_trace",
    "run_algorithm",
    "run_bench",
    "summarize",
    "write_trace",
]

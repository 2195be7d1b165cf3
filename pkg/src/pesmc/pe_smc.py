"""Posterior-exploration SMC: the main optimizer loop and its per-iteration exploration procedure."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
import logging
from typing import List, Optional

import numpy as np

from . import tmix
from .annealing import AnnealState, next_lambda
from .is_ops import WeightDegeneracyError, WeightedSamples, cw_metropolis
from .objective import Evaluator, ObjectiveSpec

log = logging.getLogger(__name__)


def default_samples(dim: int) -> int:
    """Sample size per iteration by dimension: 500 / 2000 / 5000 / 50000 for d <= 2 / 5 / 10 / beyond."""
    if dim <= 2:
        return 500
    if dim <= 5:
        return 2000
    if dim <= 10:
        return 5000
    return 50000


@dataclass(frozen=True)
class PeSmcConfig:
    n_samples: Optional[int] = None
    lambda1: float = 1.0
    beta: float = 0.8
    ness_threshold: float = 0.3
    max_new_components_per_iter: int = 30
    em_rounds_per_batch: int = 3
    alpha_min: float = 1e-3
    m_max: int = 100
    additions_per_refit: int = 10
    new_component_mass: float = 0.1
    new_component_width_frac: float = 1.0 / 20.0
    # None means max(N // 10, 50)
    new_component_draws: Optional[int] = None
    em_sigma_include_u: bool = False
    nu: float = tmix.DEFAULT_NU
    # None means 4 * d sweeps
    metropolis_sweeps: Optional[int] = None
    metropolis_step_frac: float = 0.01
    lam_cap_mult: float = 10.0
    lam_max: float = 1e12
    stall_iters: int = 10
    stall_tol: float = 1e-6
    max_iters: int = 200
    seed: int = 0
    record_mixtures: bool = False

    def validate(self) -> None:
        counts = {
            "max_new_components_per_iter": self.max_new_components_per_iter,
            "em_rounds_per_batch": self.em_rounds_per_batch,
            "m_max": self.m_max,
            "additions_per_refit": self.additions_per_refit,
            "stall_iters": self.stall_iters,
            "max_iters": self.max_iters,
        }
        for name, value in counts.items():
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.n_samples is not None and (int(self.n_samples) != self.n_samples or self.n_samples < 2):
            raise ValueError(f"n_samples must be an integer >= 2, got {self.n_samples!r}")
        if self.metropolis_sweeps is not None and (int(self.metropolis_sweeps) != self.metropolis_sweeps or self.metropolis_sweeps < 1):
            raise ValueError(f"metropolis_sweeps must be a positive integer, got {self.metropolis_sweeps!r}")
        if self.new_component_draws is not None and self.new_component_draws < 1:
            raise ValueError("new_component_draws must be positive")
        for name in ("beta", "ness_threshold", "alpha_min", "new_component_mass"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
        for name in ("lambda1", "nu", "metropolis_step_frac", "new_component_width_frac", "stall_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.lam_cap_mult > 1.0:
            raise ValueError("lam_cap_mult must exceed 1")
        if not self.lam_max > self.lambda1:
            raise ValueError("lam_max must exceed lambda1")

    def samples_for(self, dim: int) -> int:
        return int(self.n_samples) if self.n_samples is not None else default_samples(dim)

    def sweeps_for(self, dim: int) -> int:
        return int(self.metropolis_sweeps) if self.metropolis_sweeps is not None else 4 * dim

    @classmethod
    def field_names(cls) -> List[str]:
        return [f.name for f in fields(cls)]


@dataclass
class TraceRow:
    k: int
    lam: float
    ness: float
    components: int
    best_f: float
    accept_rate: float
    additions: int = 0
    budget_exhausted: bool = False


@dataclass
class RunResult:
    best_f: float
    best_x: np.ndarray
    iterations: int
    evaluations: int
    trace: List[TraceRow]
    seed: int
    algorithm: str = "pe-smc"
    mixtures: List[dict] = field(default_factory=list)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([row.lam for row in self.trace])


@dataclass
class PeInfo:
    accept_rate: float
    additions: int
    budget_exhausted: bool
    ness_before: float


def _weigh(points, evaluator, mix, lam) -> WeightedSamples:
    return WeightedSamples.build(points, evaluator.log_f(points), tmix.log_pdf(mix, points), lam)


def _em_batch(mix, samples, cfg):
    for _ in range(cfg.em_rounds_per_batch):
        mix = tmix.em_update(mix, samples, include_u_in_sigma=cfg.em_sigma_include_u)
    return tmix.prune(mix, cfg.alpha_min)


def pe_procedure(mix: tmix.TMixture, lam: float, evaluator, cfg: PeSmcConfig, rng: np.random.Generator):
    """One exploration pass at fixed lambda: IS draw, Metropolis, EM, then component addition.

    Returns the revised mixture, the final weighted sample set and a PeInfo.
    """
    if isinstance(evaluator, ObjectiveSpec):
        evaluator = Evaluator(evaluator)
    spec = evaluator.spec
    bounds = spec.bounds
    n = cfg.samples_for(spec.dim)

    ws = _weigh(tmix.sample(mix, n, rng), evaluator, mix, lam)
    ness_before = ws.ness

    step = cfg.metropolis_step_frac * bounds.width
    points, lf, accept_rate = cw_metropolis(ws.points, ws.log_f, lam, step, cfg.sweeps_for(spec.dim), evaluator, rng)
    ws = WeightedSamples.build(points, lf, tmix.log_pdf(mix, points), lam)

    mix = _em_batch(mix, ws, cfg)
    ws = _weigh(tmix.sample(mix, n, rng), evaluator, mix, lam)

    n_new = cfg.new_component_draws or max(n // 10, 50)
    additions = 0
    while (
        ws.ness < cfg.ness_threshold
        and additions < cfg.max_new_components_per_iter
        and mix.n_components < cfg.m_max
    ):
        center = np.clip(ws.points[int(np.argmax(ws.w))], bounds.lower, bounds.upper)
        mix = tmix.add_component(
            mix, center, bounds, mass=cfg.new_component_mass, width_fraction=cfg.new_component_width_frac
        )
        fresh = tmix.sample(tmix.TMixture.single(mix.means[-1], mix.sigmas[-1], mix.nu), n_new, rng)
        fresh_lf = evaluator.log_f(fresh)
        points = np.vstack([ws.points, fresh])
        log_f = np.concatenate([ws.log_f, fresh_lf])
        ws = WeightedSamples.build(points, log_f, tmix.log_pdf(mix, points), lam)
        additions += 1
        if additions % cfg.additions_per_refit == 0:
            ws = _weigh(tmix.sample(mix, n, rng), evaluator, mix, lam)
            mix = _em_batch(mix, ws, cfg)
            ws = _weigh(tmix.sample(mix, n, rng), evaluator, mix, lam)

    exhausted = ws.ness < cfg.ness_threshold
    return mix, ws, PeInfo(accept_rate, additions, exhausted, ness_before)


def initial_mixture(spec: ObjectiveSpec, nu: float = tmix.DEFAULT_NU) -> tmix.TMixture:
    b = spec.bounds
    return tmix.TMixture.single(b.center, np.diag((b.width / 4.0) ** 2), nu)


def _improved(new: float, ref: float, tol: float) -> bool:
    if not np.isfinite(ref):
        return np.isfinite(new)
    return new > ref + tol * max(abs(ref), np.finfo(float).tiny)


def run(spec: ObjectiveSpec, cfg: Optional[PeSmcConfig] = None, **overrides) -> RunResult:
    """Maximize ``spec`` and return the best point with the per-iteration trace."""
    cfg = replace(cfg or PeSmcConfig(), **overrides)
    cfg.validate()
    evaluator = Evaluator(spec)
    rng = np.random.default_rng(cfg.seed)
    mix = initial_mixture(spec, cfg.nu)
    lam = float(cfg.lambda1)
    prev_lam = None
    trace: List[TraceRow] = []
    mixtures: List[dict] = []
    ref_best = -np.inf
    stalled = 0

    for k in range(1, cfg.max_iters + 1):
        try:
            mix, ws, info = pe_procedure(mix, lam, evaluator, cfg, rng)
        except WeightDegeneracyError:
            if prev_lam is None:
                raise
            # one retry with half the temperature step
            log.warning("weight degeneracy at k=%d, lambda=%g; retrying with a smaller step", k, lam)
            lam = 0.5 * (prev_lam + lam)
            mix, ws, info = pe_procedure(mix, lam, evaluator, cfg, rng)

        trace.append(
            TraceRow(
                k=k,
                lam=lam,
                ness=ws.ness,
                components=mix.n_components,
                best_f=evaluator.best_f,
                accept_rate=info.accept_rate,
                additions=info.additions,
                budget_exhausted=info.budget_exhausted,
            )
        )
        if cfg.record_mixtures:
            mixtures.append(mix.to_record(k))
        log.debug("k=%d lambda=%.6g ness=%.3f M=%d best=%.10g", k, lam, ws.ness, mix.n_components, evaluator.best_f)

        if _improved(evaluator.best_f, ref_best, cfg.stall_tol):
            ref_best = evaluator.best_f
            stalled = 0
        else:
            stalled += 1
        if stalled >= cfg.stall_iters or lam >= cfg.lam_max:
            break

        state = AnnealState(k=k, lam=lam, ess_k=ws.ess, beta=cfg.beta, lam_cap_mult=cfg.lam_cap_mult, lam_max=cfg.lam_max)
        prev_lam, lam = lam, next_lambda(ws.log_f, ws.log_q, state)

    best_x = evaluator.best_x if evaluator.best_x is not None else np.full(spec.dim, np.nan)
    return RunResult(
        best_f=evaluator.best_f,
        best_x=best_x,
        iterations=len(trace),
        evaluations=evaluator.evaluations,
        trace=trace,
        seed=cfg.seed,
        mixtures=mixtures,
    )

"""SMC simulated annealing baseline: Boltzmann reweighting, resampling and one Metropolis step per temperature."""

from __future__ import annotations

from dataclasses import dataclass, replace
import logging
from typing import List, Optional

import numpy as np

from .annealing import boltzmann_schedule
from .is_ops import multinomial_indices, ness, normalize_log_weights
from .objective import Evaluator, ObjectiveSpec
from .pe_smc import RunResult, TraceRow, _improved, default_samples

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SmcSaConfig:
    n_samples: Optional[int] = None
    t1: float = 1.0
    gamma: float = 0.95
    # proposal standard deviation as a fraction of the box width, per coordinate
    proposal_frac: float = 0.05
    stall_iters: int = 10
    stall_tol: float = 1e-6
    max_iters: int = 200
    seed: int = 0

    def validate(self) -> None:
        if not self.t1 > 0:
            raise ValueError(f"t1 must be positive, got {self.t1!r}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma!r}")
        if not self.proposal_frac > 0:
            raise ValueError("proposal_frac must be positive")
        for name in ("stall_iters", "max_iters"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.n_samples is not None and (int(self.n_samples) != self.n_samples or self.n_samples < 2):
            raise ValueError(f"n_samples must be an integer >= 2, got {self.n_samples!r}")
        if not self.stall_tol > 0:
            raise ValueError("stall_tol must be positive")

    def samples_for(self, dim: int) -> int:
        return int(self.n_samples) if self.n_samples is not None else default_samples(dim)


def metropolis_step(X, fx, temperature, step_sigma, evaluator: Evaluator, rng):
    """One full-vector Gaussian random-walk step targeting exp(f / T).

    Proposals outside the box are rejected without evaluation.
    """
    proposal = X + step_sigma * rng.standard_normal(X.shape)
    fy = evaluator.f(proposal)
    u = rng.random(X.shape[0])
    with np.errstate(invalid="ignore"):
        log_ratio = (fy - fx) / temperature
    accept = np.isfinite(fy) & (u < np.exp(np.minimum(log_ratio, 0.0)))
    X = X.copy()
    fx = fx.copy()
    X[accept] = proposal[accept]
    fx[accept] = fy[accept]
    return X, fx, float(accept.mean())


def run_smc_sa(spec: ObjectiveSpec, cfg: Optional[SmcSaConfig] = None, **overrides) -> RunResult:
    """Maximize ``spec`` with SMC-SA under the geometric cooling T_k = t1 * gamma^(k-1)."""
    cfg = replace(cfg or SmcSaConfig(), **overrides)
    cfg.validate()
    evaluator = Evaluator(spec)
    rng = np.random.default_rng(cfg.seed)
    n = cfg.samples_for(spec.dim)
    b = spec.bounds
    step = cfg.proposal_frac * b.width

    X = b.lower + b.width * rng.random((n, spec.dim))
    fx = evaluator.f(X)
    trace: List[TraceRow] = []
    ref_best = -np.inf
    stalled = 0
    inv_prev = 0.0

    for k in range(1, cfg.max_iters + 1):
        temperature = boltzmann_schedule(cfg.t1, cfg.gamma, k)
        inv_t = 1.0 / temperature
        w = normalize_log_weights(fx * (inv_t - inv_prev))
        sample_ness = ness(w)
        idx = multinomial_indices(w, n, rng)
        X, fx = X[idx], fx[idx]
        X, fx, accept_rate = metropolis_step(X, fx, temperature, step, evaluator, rng)
        inv_prev = inv_t

        trace.append(
            TraceRow(
                k=k, lam=inv_t, ness=sample_ness, components=0, best_f=evaluator.best_f, accept_rate=accept_rate
            )
        )
        log.debug("k=%d T=%.6g ness=%.3f best=%.10g", k, temperature, sample_ness, evaluator.best_f)

        if _improved(evaluator.best_f, ref_best, cfg.stall_tol):
            ref_best = evaluator.best_f
            stalled = 0
        else:
            stalled += 1
        if stalled >= cfg.stall_iters:
            break

    best_x = evaluator.best_x if evaluator.best_x is not None else np.full(spec.dim, np.nan)
    return RunResult(
        best_f=evaluator.best_f,
        best_x=best_x,
        iterations=len(trace),
        evaluations=evaluator.evaluations,
        trace=trace,
        seed=cfg.seed,
        algorithm="smc-sa",
    )

"""Importance weighting, effective sample size, multinomial resampling and the componentwise Metropolis move."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .objective import Evaluator, ObjectiveSpec


class WeightDegeneracyError(FloatingPointError):
    """Every log-weight is -inf or non-finite; the weighted set carries no information."""


def normalize_log_weights(log_w: np.ndarray) -> np.ndarray:
    log_w = np.asarray(log_w, dtype=float)
    if log_w.size == 0:
        return log_w.copy()
    c = np.max(log_w)
    if not np.isfinite(c):
        raise WeightDegeneracyError(f"cannot normalize log-weights with maximum {c}")
    w = np.exp(log_w - c)
    return w / w.sum()


def importance_weights(log_f, log_q, lam: float) -> np.ndarray:
    """Normalized weights proportional to f^lam / q, computed in the log domain."""
    log_f = np.asarray(log_f, dtype=float)
    log_q = np.asarray(log_q, dtype=float)
    if log_f.shape != log_q.shape or log_f.size < 1:
        raise ValueError("log_f and log_q must be non-empty arrays of equal shape")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return normalize_log_weights(lam * log_f - log_q)


def ess(w) -> float:
    w = np.asarray(w, dtype=float)
    return float(1.0 / np.sum(w * w))


def ness(w) -> float:
    w = np.asarray(w, dtype=float)
    return ess(w) / w.size


@dataclass
class WeightedSamples:
    points: np.ndarray
    log_f: np.ndarray
    log_q: np.ndarray
    log_w: np.ndarray
    w: np.ndarray
    lam: float

    @classmethod
    def build(cls, points, log_f, log_q, lam: float) -> "WeightedSamples":
        log_f = np.asarray(log_f, dtype=float)
        log_q = np.asarray(log_q, dtype=float)
        log_w = lam * log_f - log_q
        return cls(np.asarray(points, dtype=float), log_f, log_q, log_w, normalize_log_weights(log_w), float(lam))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def ess(self) -> float:
        return ess(self.w)

    @property
    def ness(self) -> float:
        return ness(self.w)

    def reweight(self, log_q=None, lam=None) -> "WeightedSamples":
        return WeightedSamples.build(
            self.points,
            self.log_f,
            self.log_q if log_q is None else log_q,
            self.lam if lam is None else lam,
        )

    def merge(self, other: "WeightedSamples") -> "WeightedSamples":
        return WeightedSamples.build(
            np.vstack([self.points, other.points]),
            np.concatenate([self.log_f, other.log_f]),
            np.concatenate([self.log_q, other.log_q]),
            self.lam,
        )


def multinomial_resample(samples: WeightedSamples, n_out: int, rng: np.random.Generator) -> np.ndarray:
    """n_out i.i.d. categorical draws from the weighted points; each output carries weight 1/n_out."""
    return samples.points[multinomial_indices(samples.w, n_out, rng)]


def multinomial_indices(w: np.ndarray, n_out: int, rng: np.random.Generator) -> np.ndarray:
    return rng.choice(len(w), size=int(n_out), replace=True, p=np.asarray(w, dtype=float))


def cw_metropolis(
    points: np.ndarray,
    log_f: np.ndarray,
    lam: float,
    step_sigma,
    sweeps: int,
    evaluator,
    rng: np.random.Generator,
):
    """Componentwise random-walk Metropolis targeting f^lam.

    Each sweep visits the coordinates in order and moves every sample along
    that coordinate with a Gaussian step, accepting with
    min(1, exp(lam * (log f(x') - log f(x)))). Returns the moved points, their
    log f and the acceptance rate over all proposals. Importance weights are
    left to the caller; the move leaves f^lam invariant.
    """
    if isinstance(evaluator, ObjectiveSpec):
        evaluator = Evaluator(evaluator)
    X = np.array(points, dtype=float, copy=True)
    lf = np.array(log_f, dtype=float, copy=True)
    n, d = X.shape
    step_sigma = np.broadcast_to(np.asarray(step_sigma, dtype=float), (d,))
    if np.any(step_sigma < 0) or sweeps < 1:
        raise ValueError("step sizes must be non-negative and sweeps >= 1")
    accepted = 0
    for _ in range(int(sweeps)):
        for j in range(d):
            proposal = X.copy()
            proposal[:, j] += step_sigma[j] * rng.standard_normal(n)
            lf_new = evaluator.log_f(proposal)
            log_ratio = lam * (lf_new - lf)
            u = rng.random(n)
            accept = u < np.exp(np.minimum(log_ratio, 0.0))
            X[accept] = proposal[accept]
            lf[accept] = lf_new[accept]
            accepted += int(accept.sum())
    total = n * d * int(sweeps)
    return X, lf, (accepted / total if total else 0.0)

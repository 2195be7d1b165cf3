"""Temperature schedules: the ESS-driven lambda update and a geometric cooling schedule for the baseline."""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .is_ops import ess, importance_weights

BISECTION_STEPS = 60
BISECTION_RTOL = 1e-3


@dataclass
class AnnealState:
    k: int = 1
    lam: float = 1.0
    ess_k: float = float("nan")
    beta: float = 0.8
    lam_cap_mult: float = 10.0
    lam_max: float = 1e12

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.lam_cap_mult > 1.0:
            raise ValueError("lam_cap_mult must exceed 1")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")


def ess_at_lambda(log_f, log_q, lam: float) -> float:
    return ess(importance_weights(log_f, log_q, lam))


def next_lambda(log_f, log_q, state: AnnealState) -> float:
    """The lambda in (lam_k, cap * lam_k] whose ESS is closest to beta * ESS_k.

    Doubling from lam_k brackets a crossing of the target, bisection refines it.
    If the ESS never falls to the target before the cap, the cap multiplier is
    used. h need not be monotone (a non-uniform proposal can make it rise at
    first); the search only relies on h(lo) > target >= h(hi).
    """
    lam_k = float(state.lam)
    cap = min(state.lam_cap_mult * lam_k, state.lam_max)
    if not cap > lam_k:
        raise ValueError(f"lambda {lam_k} already at its maximum {state.lam_max}")
    ess_k = state.ess_k if np.isfinite(state.ess_k) else ess_at_lambda(log_f, log_q, lam_k)
    target = state.beta * ess_k

    def h(lam):
        return ess_at_lambda(log_f, log_q, lam)

    lo = lam_k
    hi = None
    while True:
        cand = min(2.0 * lo, cap)
        h_cand = h(cand)
        if h_cand <= target:
            hi = cand
            break
        if cand >= cap:
            return cap
        lo = cand

    for _ in range(BISECTION_STEPS):
        if hi - lo <= BISECTION_RTOL * lo:
            break
        mid = 0.5 * (lo + hi)
        if h(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def boltzmann_schedule(t1: float, gamma: float, k: int) -> float:
    if k < 1:
        raise ValueError("k starts at 1")
    return t1 * math.pow(gamma, k - 1)

"""Hot loops of the t-mixture: component log densities and weighted scatter matrices.

Two implementations share one signature. The numba one is used when numba
imports and ``PESMC_DISABLE_NUMBA`` is unset (or "0"); the numpy one is the
fallback and the reference the numba kernels are tested against.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.linalg import solve_triangular

ENV_FLAG = "PESMC_DISABLE_NUMBA"


def t_logpdf_numpy(X, means, chols, log_norm, nu):
    """Per-component Student-t log densities.

    X (n, d); means (M, d); chols (M, d, d) lower Cholesky factors of the
    scale matrices; log_norm (M,) the log normalizing constants. Returns
    ``(logpdf, maha)``, both (n, M).
    """
    n, d = X.shape
    M = means.shape[0]
    maha = np.empty((n, M))
    for m in range(M):
        z = solve_triangular(chols[m], (X - means[m]).T, lower=True, check_finite=False)
        maha[:, m] = np.einsum("ij,ij->j", z, z)
    logpdf = log_norm[None, :] - 0.5 * (nu + d) * np.log1p(maha / nu)
    return logpdf, maha


def weighted_scatter_numpy(X, means, coef):
    """S[m] = sum_i coef[i, m] (x_i - mu_m)(x_i - mu_m)^T, shape (M, d, d)."""
    M, d = means.shape
    out = np.empty((M, d, d))
    for m in range(M):
        diff = X - means[m]
        out[m] = (diff * coef[:, m, None]).T @ diff
    return out


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an install requirement
    HAVE_NUMBA = False


if HAVE_NUMBA:

    @numba.njit(cache=True, fastmath=False)
    def t_logpdf_numba(X, means, chols, log_norm, nu):
        n, d = X.shape
        M = means.shape[0]
        logpdf = np.empty((n, M))
        maha = np.empty((n, M))
        z = np.empty(d)
        half = 0.5 * (nu + d)
        for m in range(M):
            L = chols[m]
            mu = means[m]
            for i in range(n):
                acc = 0.0
                for r in range(d):
                    s = X[i, r] - mu[r]
                    for c in range(r):
                        s -= L[r, c] * z[c]
                    z[r] = s / L[r, r]
                    acc += z[r] * z[r]
                maha[i, m] = acc
                logpdf[i, m] = log_norm[m] - half * np.log1p(acc / nu)
        return logpdf, maha

    @numba.njit(cache=True)
    def weighted_scatter_numba(X, means, coef):
        n, d = X.shape
        M = means.shape[0]
        out = np.zeros((M, d, d))
        diff = np.empty(d)
        for m in range(M):
            for i in range(n):
                w = coef[i, m]
                if w == 0.0:
                    continue
                for r in range(d):
                    diff[r] = X[i, r] - means[m, r]
                for r in range(d):
                    wr = w * diff[r]
                    for c in range(r + 1):
                        out[m, r, c] += wr * diff[c]
            for r in range(d):
                for c in range(r):
                    out[m, c, r] = out[m, r, c]
        return out


_IMPLS = {"numpy": (t_logpdf_numpy, weighted_scatter_numpy)}
if HAVE_NUMBA:
    _IMPLS["numba"] = (t_logpdf_numba, weighted_scatter_numba)


def _default_backend() -> str:
    disabled = os.environ.get(ENV_FLAG, "").strip().lower() not in ("", "0", "false", "no")
    return "numba" if HAVE_NUMBA and not disabled else "numpy"


BACKEND = _default_backend()


def set_backend(name: str) -> None:
    global BACKEND
    if name not in _IMPLS:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(_IMPLS)}")
    BACKEND = name


def t_logpdf(X, means, chols, log_norm, nu):
    fn = _IMPLS[BACKEND][0]
    return fn(
        np.ascontiguousarray(X, dtype=float),
        np.ascontiguousarray(means, dtype=float),
        np.ascontiguousarray(chols, dtype=float),
        np.ascontiguousarray(log_norm, dtype=float),
        float(nu),
    )


def weighted_scatter(X, means, coef):
    fn = _IMPLS[BACKEND][1]
    return fn(
        np.ascontiguousarray(X, dtype=float),
        np.ascontiguousarray(means, dtype=float),
        np.ascontiguousarray(coef, dtype=float),
    )

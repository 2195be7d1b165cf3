"""Student-t mixture importance density: evaluation, sampling, weighted EM, growth and pruning."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import gammaln, logsumexp

from . import _kernels
from .objective import Bounds

DEFAULT_NU = 5.0
STARVED_MASS = 1e-12


class NotPositiveDefinite(np.linalg.LinAlgError):
    pass


def _cholesky(sigma: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"scale matrix is not positive definite: {exc}") from None


def mahalanobis_sq(mu, sigma, y) -> float:
    """(y - mu)^T sigma^{-1} (y - mu) via a triangular solve against chol(sigma)."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    z = solve_triangular(_cholesky(sigma), y - mu, lower=True)
    return float(z @ z)


def t_log_norm(chol: np.ndarray, nu: float) -> float:
    """Log of the normalizing constant of a d-variate t density with scale chol @ chol.T."""
    d = chol.shape[0]
    half_logdet = np.sum(np.log(np.diag(chol)))
    return float(gammaln(0.5 * (nu + d)) - gammaln(0.5 * nu) - 0.5 * d * np.log(np.pi * nu) - half_logdet)


@dataclass(frozen=True)
class TComponent:
    alpha: float
    mu: np.ndarray
    sigma: np.ndarray
    nu: float = DEFAULT_NU


@dataclass(frozen=True, eq=False)
class TMixture:
    """A mixture of multivariate t densities sharing one degrees-of-freedom value.

    Arrays are stored stacked: ``alpha`` (M,), ``means`` (M, d), ``sigmas`` (M, d, d).
    Construction validates the weights and factorizes every scale matrix.
    """

    alpha: np.ndarray
    means: np.ndarray
    sigmas: np.ndarray
    nu: float = DEFAULT_NU

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float)).copy()
        means = np.atleast_2d(np.asarray(self.means, dtype=float)).copy()
        sigmas = np.asarray(self.sigmas, dtype=float).copy()
        M, d = means.shape
        if sigmas.ndim == 2 and M == 1:
            sigmas = sigmas[None]
        if alpha.shape != (M,) or sigmas.shape != (M, d, d) or M < 1:
            raise ValueError(f"inconsistent shapes: alpha {alpha.shape}, means {means.shape}, sigmas {sigmas.shape}")
        if np.any(alpha < 0) or not np.isclose(alpha.sum(), 1.0, rtol=0, atol=1e-12):
            raise ValueError(f"component masses must be non-negative and sum to 1, got {alpha}")
        if not self.nu > 0:
            raise ValueError("nu must be positive")
        chols = np.empty_like(sigmas)
        for m in range(M):
            chols[m] = _cholesky(sigmas[m])
        log_norm = np.array([t_log_norm(chols[m], self.nu) for m in range(M)])
        for a in (alpha, means, sigmas, chols, log_norm):
            a.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sigmas", sigmas)
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "chols", chols)
        object.__setattr__(self, "log_norm", log_norm)

    @classmethod
    def single(cls, mu, sigma, nu: float = DEFAULT_NU) -> "TMixture":
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        sigma = np.asarray(sigma, dtype=float).reshape(mu.size, mu.size)
        return cls(np.ones(1), mu[None], sigma[None], nu)

    @classmethod
    def from_components(cls, components: List[TComponent]) -> "TMixture":
        nus = {c.nu for c in components}
        if len(nus) != 1:
            raise ValueError("all components must share one nu")
        return cls(
            np.array([c.alpha for c in components]),
            np.array([c.mu for c in components]),
            np.array([c.sigma for c in components]),
            nus.pop(),
        )

    @property
    def n_components(self) -> int:
        return self.alpha.size

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    @property
    def components(self) -> List[TComponent]:
        return [TComponent(float(a), m.copy(), s.copy(), self.nu) for a, m, s in zip(self.alpha, self.means, self.sigmas)]

    def component_logpdf(self, X: np.ndarray):
        """(log S(x_i | mu_m, Sigma_m, nu), Mahalanobis^2), both (n, M)."""
        return _kernels.t_logpdf(X, self.means, self.chols, self.log_norm, self.nu)

    def to_record(self, iteration: Optional[int] = None) -> dict:
        return {
            "iteration": iteration,
            "components": [
                {"alpha": float(a), "mu": m.tolist(), "sigma": s.reshape(-1).tolist(), "nu": self.nu}
                for a, m, s in zip(self.alpha, self.means, self.sigmas)
            ],
        }

    @classmethod
    def from_record(cls, record: dict) -> "TMixture":
        comps = record["components"]
        d = len(comps[0]["mu"])
        return cls(
            np.array([c["alpha"] for c in comps]),
            np.array([c["mu"] for c in comps]),
            np.array([np.reshape(c["sigma"], (d, d)) for c in comps]),
            comps[0]["nu"],
        )


def _as_rows(x, d):
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = X.reshape(1, d) if single else X
    return X, single


def log_pdf(mix: TMixture, x):
    """log q(x); accepts one d-vector or an (n, d) array."""
    X, single = _as_rows(x, mix.dim)
    with np.errstate(divide="ignore"):
        log_alpha = np.log(mix.alpha)
    lp, _ = mix.component_logpdf(X)
    out = logsumexp(lp + log_alpha, axis=1)
    return float(out[0]) if single else out


def responsibilities(mix: TMixture, X: np.ndarray):
    """Posterior component probabilities eps(m | x_i), the mixture log density and Mahalanobis^2."""
    with np.errstate(divide="ignore"):
        log_alpha = np.log(mix.alpha)
    lp, maha = mix.component_logpdf(X)
    joint = lp + log_alpha
    log_q = logsumexp(joint, axis=1)
    resp = np.exp(joint - log_q[:, None])
    return resp, log_q, maha


def sample(mix: TMixture, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. draws: pick a component by mass, then mu + L z sqrt(nu / chi2_nu)."""
    n = int(n)
    d = mix.dim
    out = np.empty((n, d))
    if n == 0:
        return out
    comp = rng.choice(mix.n_components, size=n, p=mix.alpha)
    z = rng.standard_normal((n, d))
    scale = np.sqrt(mix.nu / rng.chisquare(mix.nu, size=n))
    for m in np.unique(comp):
        idx = comp == m
        out[idx] = mix.means[m] + (z[idx] @ mix.chols[m].T) * scale[idx, None]
    return out


def regularize(sigma: np.ndarray, fallback_scale: float = 1.0) -> np.ndarray:
    """Symmetrize and add escalating diagonal jitter until the Cholesky factorization succeeds."""
    d = sigma.shape[0]
    sigma = 0.5 * (sigma + sigma.T)
    base = np.trace(sigma) / d
    if not (np.isfinite(base) and base > 0):
        base = fallback_scale
    jitter = 1e-9 * base
    eye = np.eye(d)
    for _ in range(40):
        candidate = sigma + jitter * eye
        try:
            np.linalg.cholesky(candidate)
            return candidate
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise NotPositiveDefinite("could not regularize scale matrix")


def em_update(mix: TMixture, samples, include_u_in_sigma: bool = False) -> TMixture:
    """One weighted EM step on (alpha, mu, Sigma); nu and M are unchanged.

    ``samples`` needs ``points`` (n, d) and normalized weights ``w`` (n,).
    The scale update divides by sum_i w_i eps(m|x_i) unless
    ``include_u_in_sigma`` asks for the textbook denominator that also carries
    u_m. A component whose responsibility mass is below 1e-12 keeps its mean
    and scale; one whose effective sample count is below d + 1 keeps its scale.
    """
    X = np.asarray(samples.points, dtype=float)
    w = np.asarray(samples.w, dtype=float)
    d = mix.dim
    resp, _, maha = responsibilities(mix, X)
    w_resp = w[:, None] * resp
    mass = w_resp.sum(axis=0)
    u = (mix.nu + d) / (mix.nu + maha)
    w_resp_u = w_resp * u
    mass_u = w_resp_u.sum(axis=0)
    live = (mass >= STARVED_MASS) & (mass_u > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        eff_count = mass**2 / np.sum(w_resp**2, axis=0)
    refit_scale = live & (eff_count >= d + 1)

    means = mix.means.copy()
    sigmas = mix.sigmas.copy()
    if live.any():
        means[live] = (w_resp_u[:, live].T @ X) / mass_u[live, None]
    if refit_scale.any():
        scatter = _kernels.weighted_scatter(X, means[refit_scale], w_resp_u[:, refit_scale])
        denom = mass_u[refit_scale] if include_u_in_sigma else mass[refit_scale]
        for k, m in enumerate(np.flatnonzero(refit_scale)):
            old_scale = np.trace(mix.sigmas[m]) / d
            sigmas[m] = regularize(scatter[k] / denom[k], fallback_scale=old_scale)

    alpha = np.maximum(mass, np.finfo(float).tiny)
    alpha = alpha / alpha.sum()
    return TMixture(alpha, means, sigmas, mix.nu)


def add_component(
    mix: TMixture,
    center,
    bounds: Bounds,
    mass: float = 0.1,
    width_fraction: float = 1.0 / 20.0,
) -> TMixture:
    """Append a component at ``center`` with diagonal scale (width_fraction * box width)^2."""
    center = np.asarray(center, dtype=float).reshape(mix.dim)
    new_sigma = np.diag((bounds.width * width_fraction) ** 2)
    alpha = np.append(mix.alpha * (1.0 - mass), mass)
    alpha = alpha / alpha.sum()
    return TMixture(
        alpha,
        np.vstack([mix.means, center]),
        np.concatenate([mix.sigmas, new_sigma[None]]),
        mix.nu,
    )


def prune(mix: TMixture, alpha_min: float) -> TMixture:
    """Drop components with mass below alpha_min and rescale the rest; never returns an empty mixture."""
    keep = mix.alpha >= alpha_min
    if not keep.any():
        keep = np.zeros_like(keep)
        keep[int(np.argmax(mix.alpha))] = True
    if keep.all():
        return mix
    alpha = mix.alpha[keep]
    return TMixture(alpha / alpha.sum(), mix.means[keep], mix.sigmas[keep], mix.nu)

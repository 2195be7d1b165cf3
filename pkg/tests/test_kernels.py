import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pesmc import _kernels, tmix

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def _inputs(seed, n, d, m):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, d, d))
    sigmas = A @ A.transpose(0, 2, 1) + 0.5 * np.eye(d)
    mix = tmix.TMixture(rng.dirichlet(np.ones(m)), rng.standard_normal((m, d)), sigmas)
    X = rng.standard_normal((n, d)) * 3
    coef = rng.random((n, m))
    coef[rng.random((n, m)) < 0.2] = 0.0
    return mix, X, coef


@needs_numba
@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 60), d=st.integers(1, 6), m=st.integers(1, 5))
def test_numba_matches_numpy(seed, n, d, m):
    mix, X, coef = _inputs(seed, n, d, m)
    lp_np, mh_np = _kernels.t_logpdf_numpy(X, mix.means, mix.chols, mix.log_norm, mix.nu)
    lp_nb, mh_nb = _kernels.t_logpdf_numba(X, mix.means, mix.chols, mix.log_norm, mix.nu)
    np.testing.assert_allclose(lp_nb, lp_np, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(mh_nb, mh_np, rtol=1e-11, atol=1e-12)
    s_np = _kernels.weighted_scatter_numpy(X, mix.means, coef)
    s_nb = _kernels.weighted_scatter_numba(X, mix.means, coef)
    np.testing.assert_allclose(s_nb, s_np, rtol=1e-11, atol=1e-11)
    np.testing.assert_array_equal(s_nb, s_nb.transpose(0, 2, 1))


@needs_numba
def test_backend_switch_gives_same_em():
    mix, X, _ = _inputs(1, 200, 3, 3)
    samples = type("S", (), {"points": X, "w": np.full(200, 1 / 200)})()
    before = _kernels.BACKEND
    try:
        _kernels.set_backend("numpy")
        a = tmix.em_update(mix, samples)
        _kernels.set_backend("numba")
        b = tmix.em_update(mix, samples)
    finally:
        _kernels.set_backend(before)
    np.testing.assert_allclose(a.sigmas, b.sigmas, rtol=1e-10)
    np.testing.assert_allclose(a.means, b.means, rtol=1e-12)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        _kernels.set_backend("cuda")


@pytest.mark.parametrize("value, expected", [("1", "numpy"), ("true", "numpy"), ("0", None), ("", None)])
def test_environment_flag_selects_backend(value, expected):
    env = dict(os.environ, **{_kernels.ENV_FLAG: value})
    out = subprocess.run(
        [sys.executable, "-c", "from pesmc import _kernels; print(_kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    ).stdout.strip()
    want = expected or ("numba" if _kernels.HAVE_NUMBA else "numpy")
    assert out == want

import math
from dataclasses import replace

import numpy as np
import pytest

from pesmc import Bounds, ObjectiveSpec, PeSmcConfig, make_function, run, tmix
from pesmc import pe_smc
from pesmc.benchmarks import rastrigin
from pesmc.is_ops import WeightDegeneracyError
from pesmc.objective import Evaluator
from pesmc.pe_smc import default_samples, initial_mixture, pe_procedure

from conftest import CountingObjective


def counted_spec(fn, dim, low, high):
    counter = CountingObjective(fn)
    spec = ObjectiveSpec(dim=dim, bounds=Bounds.cube(low, high, dim), eval=counter.scalar, eval_batch=counter.batch)
    return spec, counter


def test_default_sample_sizes():
    assert [default_samples(d) for d in (1, 2, 5, 10, 20)] == [500, 500, 2000, 5000, 50000]
    cfg = PeSmcConfig()
    assert cfg.samples_for(5) == 2000 and replace(cfg, n_samples=64).samples_for(5) == 64
    assert cfg.sweeps_for(3) == 12 and replace(cfg, metropolis_sweeps=2).sweeps_for(3) == 2


@pytest.mark.parametrize(
    "bad",
    [
        {"beta": 1.0},
        {"ness_threshold": 0.0},
        {"alpha_min": 1.5},
        {"m_max": 0},
        {"em_rounds_per_batch": 0},
        {"n_samples": 1},
        {"lambda1": -1.0},
        {"max_iters": 2.5},
        {"metropolis_sweeps": 0},
        {"lam_cap_mult": 1.0},
    ],
)
def test_invalid_config_fails_before_any_evaluation(bad):
    spec, counter = counted_spec(rastrigin, 2, -5.12, 5.12)
    with pytest.raises(ValueError):
        run(spec, **bad)
    assert counter.calls == 0


def test_initial_mixture_covers_box():
    mix = initial_mixture(make_function("TF11", 2))
    np.testing.assert_array_equal(mix.means[0], [0.0, 0.0])
    np.testing.assert_allclose(mix.sigmas[0], np.diag([250.0**2, 250.0**2]))
    assert mix.nu == 5.0


def test_flat_objective_adds_nothing(flat_spec):
    spec = flat_spec(dim=2, low=-1e6, high=1e6)
    mix0 = initial_mixture(spec)
    mix, ws, info = pe_procedure(mix0, 1.0, Evaluator(spec), PeSmcConfig(n_samples=300), np.random.default_rng(0))
    assert info.additions == 0 and not info.budget_exhausted
    assert mix.n_components == 1
    assert abs(mix.alpha.sum() - 1.0) <= 1e-12
    # weights are 1/q on a flat target, so NESS stays well above the threshold but below 1
    assert ws.ness >= PeSmcConfig().ness_threshold


def _two_spikes(X):
    x = np.asarray(X)[:, 0]
    return np.exp(-((x + 3.0) ** 2) / 0.5) + np.exp(-((x - 3.0) ** 2) / 0.5)


def test_component_addition_reaches_the_uncovered_spike():
    # one component sits on the left spike; the right one must be found by additions
    spec = ObjectiveSpec(
        dim=1, bounds=Bounds.cube(-10.0, 10.0, 1),
        eval=lambda x: float(_two_spikes(np.atleast_2d(x))[0]), eval_batch=_two_spikes,
    )
    new_sigma = 20.0 / 20.0
    hits = 0
    for seed in range(50):
        mix0 = tmix.TMixture.single([-3.0], [[4.0]])
        mix, _, _ = pe_procedure(mix0, 1.0, Evaluator(spec), PeSmcConfig(n_samples=500), np.random.default_rng(seed))
        hits += bool(np.any(np.abs(mix.means[:, 0] - 3.0) <= 3 * new_sigma))
    assert hits >= 45


@pytest.mark.parametrize("seed", range(5))
def test_pe_output_ness_meets_threshold_or_budget_spent(seed):
    spec = make_function("TF9", 2)
    cfg = PeSmcConfig(n_samples=300)
    mix, ws, info = pe_procedure(initial_mixture(spec), 3.0, Evaluator(spec), cfg, np.random.default_rng(seed))
    assert ws.ness >= cfg.ness_threshold or info.budget_exhausted
    assert info.budget_exhausted == (ws.ness < cfg.ness_threshold)
    assert 1 <= mix.n_components <= cfg.m_max
    assert abs(mix.alpha.sum() - 1.0) <= 1e-10


def test_m_max_is_respected():
    spec = make_function("TF9", 2)
    cfg = PeSmcConfig(n_samples=200, m_max=4, ness_threshold=0.99)
    mix, _, info = pe_procedure(initial_mixture(spec), 50.0, Evaluator(spec), cfg, np.random.default_rng(1))
    assert mix.n_components <= 4
    assert info.budget_exhausted


@pytest.fixture(scope="module")
def counted_run():
    spec, counter = counted_spec(rastrigin, 2, -5.12, 5.12)
    seen = []
    inner = counter.batch

    def recording(X):
        out = inner(X)
        seen.append(out.max())
        return out

    spec = replace(spec, eval_batch=recording)
    result = run(spec, seed=3, record_mixtures=True)
    return result, counter, seen


def test_evaluation_accounting(counted_run):
    result, counter, _ = counted_run
    assert result.evaluations == counter.calls > 0


def test_best_is_max_over_everything_evaluated(counted_run):
    result, _, seen = counted_run
    assert result.best_f == max(seen)
    assert rastrigin(result.best_x)[0] == result.best_f


def test_trace_invariants(counted_run):
    result, _, _ = counted_run
    trace = result.trace
    assert result.iterations == len(trace) and [t.k for t in trace] == list(range(1, len(trace) + 1))
    lams = [t.lam for t in trace]
    assert all(b > a for a, b in zip(lams, lams[1:]))
    bests = [t.best_f for t in trace]
    assert all(b >= a for a, b in zip(bests, bests[1:]))
    assert all(1 <= t.components <= 100 for t in trace)
    assert all(0 <= t.accept_rate <= 1 and 0 < t.ness <= 1 for t in trace)
    assert trace[0].lam == 1.0


def test_recorded_mixtures_are_normalized(counted_run):
    result, _, _ = counted_run
    assert len(result.mixtures) == result.iterations
    for rec in result.mixtures:
        mix = tmix.TMixture.from_record(rec)
        assert abs(mix.alpha.sum() - 1.0) <= 1e-10


def test_stall_rule_stops_the_run(flat_spec):
    result = run(flat_spec(dim=2), n_samples=100, stall_iters=3)
    assert result.iterations == 4  # first iteration sets the record, three more without improvement
    assert result.best_f == 3.0


def test_max_iters_bounds_the_run():
    assert run(make_function("TF9", 2), max_iters=3, n_samples=100).iterations == 3


def test_seed_determinism_bitwise():
    spec = make_function("TF16", 2)
    a = run(spec, seed=11, n_samples=200)
    b = run(spec, seed=11, n_samples=200)
    assert a.trace == b.trace
    assert a.best_f == b.best_f and np.array_equal(a.best_x, b.best_x)
    c = run(spec, seed=12, n_samples=200)
    assert c.trace != a.trace


def test_degeneracy_retries_once_with_half_step(monkeypatch):
    calls = []
    real = pe_smc.pe_procedure

    def flaky(mix, lam, evaluator, cfg, rng):
        calls.append(lam)
        if len(calls) == 2:
            raise WeightDegeneracyError("synthetic")
        return real(mix, lam, evaluator, cfg, rng)

    monkeypatch.setattr(pe_smc, "pe_procedure", flaky)
    result = pe_smc.run(make_function("TF9", 2), n_samples=100, max_iters=3)
    assert calls[2] == pytest.approx(0.5 * (calls[0] + calls[1]))
    assert result.trace[1].lam == calls[2]


def test_degeneracy_on_first_iteration_propagates(monkeypatch):
    def broken(*args):
        raise WeightDegeneracyError("synthetic")

    monkeypatch.setattr(pe_smc, "pe_procedure", broken)
    with pytest.raises(WeightDegeneracyError):
        pe_smc.run(make_function("TF9", 2), n_samples=100)


def test_quick_rastrigin_solve():
    result = run(make_function("TF9", 2), seed=0)
    assert result.best_f > 199.99
    assert np.all(np.abs(result.best_x) < 1e-2)
    assert math.isfinite(result.best_f)

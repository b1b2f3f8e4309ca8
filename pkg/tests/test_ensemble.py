import numpy as np
import pytest

from qhj_impulse.ensemble import (
    BLOCK_SIZE,
    EnsembleSpec,
    FixedSource,
    RandomSetSource,
    SamplerParams,
    resolve_threads,
    run_ensemble,
    sample_microstate,
)
from qhj_impulse.errors import DegeneracyError, NumericalError, ValidationError
from qhj_impulse.kinematics import is_monotone
from qhj_impulse.model import ImpulseSpec, Microstate, WellModel

W = WellModel()


def test_sampler_respects_bounds():
    rng = np.random.default_rng(0)
    for _ in range(200):
        ms = sample_microstate(rng, SamplerParams())
        assert ms.b == 1.0 and 0.2 <= ms.a <= 5.0
        assert abs(ms.c) <= 0.95 * 2 * np.sqrt(ms.a)
        assert is_monotone(ms)


def test_sampler_can_skip_rejection():
    rng = np.random.default_rng(1)
    draws = [sample_microstate(rng, SamplerParams(require_monotone=False)) for _ in range(200)]
    assert not all(is_monotone(ms) for ms in draws)


def test_random_set_is_reproducible():
    assert RandomSetSource(9, 5).draw() == RandomSetSource(9, 5).draw()


def test_thread_count_does_not_change_result():
    spec = EnsembleSpec(3 * BLOCK_SIZE + 17, ImpulseSpec(epsilon=0.1), RandomSetSource(4, 3), rng_seed=5)
    one = run_ensemble(spec, W, threads=1)
    four = run_ensemble(spec, W, threads=4)
    assert one.mean_e1 == four.mean_e1
    assert one.stderr_e1 == four.stderr_e1
    assert one.case_histogram == four.case_histogram


def test_flat_state_population_shares():
    rep = run_ensemble(EnsembleSpec(200_000, ImpulseSpec(epsilon=0.1), FixedSource(Microstate(1, 1, 0)), rng_seed=3), W)
    frac = rep.case_histogram["interior_zero"] / rep.n
    assert abs(frac - 0.9) <= 3 * np.sqrt(0.9 * 0.1 / rep.n)
    assert abs(rep.mean_e1) <= 3 * rep.stderr_e1
    assert sum(rep.case_histogram.values()) == rep.n


def test_samples_kept_on_request():
    rep = run_ensemble(EnsembleSpec(1000, ImpulseSpec(), RandomSetSource(2, 4)), W, keep_samples=True)
    assert rep.samples["e1"].shape == (1000,)
    assert set(rep.samples["microstate"]) == {0, 1, 2, 3}
    assert [s.n for s in rep.sub_ensembles] == [250, 250, 250, 250]


def test_degenerate_microstate_aborts_with_context():
    spec = EnsembleSpec(10, ImpulseSpec(), FixedSource(Microstate(5, 0.5, -1)))
    with pytest.raises(DegeneracyError, match="microstate 0"):
        run_ensemble(spec, W)


def test_skip_policy_records_skips():
    spec = EnsembleSpec(10, ImpulseSpec(), FixedSource(Microstate(5, 0.5, -1)), on_error="skip")
    with pytest.raises(NumericalError, match="every sample was skipped"):
        run_ensemble(spec, W)


@pytest.mark.parametrize("kwargs", [dict(n_samples=0), dict(rng_seed=-1), dict(on_error="ignore"), dict(tau_distribution="gaussian")])
def test_spec_validation(kwargs):
    base = dict(n_samples=10, impulse=ImpulseSpec(), microstate_source=FixedSource(Microstate(1, 1, 0)))
    base.update(kwargs)
    with pytest.raises(ValidationError):
        EnsembleSpec(**base)


def test_threads_env_fallback(monkeypatch):
    monkeypatch.setenv("QHJ_IMPULSE_THREADS", "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2
    monkeypatch.delenv("QHJ_IMPULSE_THREADS")
    assert resolve_threads(None) == 1
    with pytest.raises(ValidationError):
        resolve_threads(0)

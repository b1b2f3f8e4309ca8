import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhj_impulse import eigenpair as ep
from qhj_impulse.errors import DomainError
from qhj_impulse.model import Microstate, WellModel

from conftest import seeded_microstates

microstates = st.builds(
    lambda a, r, b: Microstate(a, b, r * 2 * math.sqrt(a * b)),
    st.floats(0.2, 5.0), st.floats(-0.95, 0.95), st.floats(0.2, 5.0),
)


@given(microstates)
@settings(max_examples=50)
def test_wronskian_squared_target(ms):
    ctx = ep.make_context(WellModel(), ms)
    w = np.asarray(ep.wronskian(ctx, np.linspace(-1, 1, 101)))
    assert np.std(w) / abs(np.mean(w)) < 1e-12
    assert np.mean(w) ** 2 == pytest.approx(2.0 / ms.disc, rel=1e-12)


@given(microstates)
@settings(max_examples=50)
def test_reconstruction_is_phi(ms):
    ctx = ep.make_context(WellModel(), ms)
    x = np.linspace(-0.999, 0.999, 57)
    assert np.max(np.abs(ep.reconstruct_psi(ctx, x) - ep.phi(ctx, x))) < 1e-12


def test_phi_theta_reference_values():
    ctx = ep.make_context(WellModel(), Microstate(1, 1, 0))
    # norm = (2 m / (hbar^2 k^2 D))^(1/4) = (8/pi^2)^(1/4)
    norm = (8 / math.pi**2) ** 0.25
    assert ep.phi(ctx, 0.0) == pytest.approx(norm, rel=1e-15)
    assert ep.theta(ctx, 1.0) == pytest.approx(norm, rel=1e-15)
    assert abs(ep.phi(ctx, 1.0)) < 1e-15


def test_hamilton_W_wall_limits():
    ctx = ep.make_context(WellModel(), Microstate(2, 3, 1))
    assert ep.hamilton_W(ctx, 1.0) == pytest.approx(math.pi / 2)
    assert ep.hamilton_W(ctx, -1.0) == pytest.approx(-math.pi / 2)
    near = ep.hamilton_W(ctx, 1 - 1e-9)
    assert near == pytest.approx(math.pi / 2, abs=1e-7)


@pytest.mark.parametrize("ms", seeded_microstates(3, 5, require_monotone=False))
def test_qshje_residual_vanishes(ms):
    ctx = ep.make_context(WellModel(q=2.5, m=0.7, hbar=1.3), ms)
    x = np.linspace(-2.5, 2.5, 203)[1:-1]
    assert np.max(np.abs(ep.qshje_residual(ctx, x))) < 1e-9


def test_momentum_is_derivative_of_W():
    ctx = ep.make_context(WellModel(), Microstate(2, 3, 1))
    x, h = 0.3, 1e-6
    fd = (ep.hamilton_W(ctx, x + h) - ep.hamilton_W(ctx, x - h)) / (2 * h)
    assert ep.conjugate_momentum(ctx, x) == pytest.approx(fd, rel=1e-8)
    assert ep.conjugate_momentum(ctx, x, -1) == -ep.conjugate_momentum(ctx, x)


def test_domain_checks():
    ctx = ep.make_context(WellModel(), Microstate(1, 1, 0))
    with pytest.raises(DomainError):
        ep.phi(ctx, 1.5)
    with pytest.raises(DomainError):
        ep.schwarzian(ctx, 1.0)
    with pytest.raises(ValueError):
        ep.conjugate_momentum(ctx, 0.0, sign=0)

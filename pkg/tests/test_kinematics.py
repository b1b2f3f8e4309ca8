import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhj_impulse.errors import DegeneracyError, DomainError, WindowError
from qhj_impulse.kinematics import (
    Direction,
    TrajectoryClock,
    band_edge_time,
    exact_time_of_position,
    is_monotone,
    locate_particle,
    monotone_margin,
    revert_position,
    sheet_coordinates,
    wall_series_time,
)
from qhj_impulse.model import Microstate, WellModel

from conftest import seeded_microstates

W = WellModel()


def test_reference_clock():
    clock = TrajectoryClock(Microstate(2, 3, 1), W)
    assert clock.half_sheet == pytest.approx(0.50885352878076907, rel=1e-15)
    assert clock.t_period == pytest.approx(4 * 0.50885352878076907, rel=1e-15)
    assert exact_time_of_position(clock, 0.5) == pytest.approx(0.25442676439038453, rel=1e-14)
    assert exact_time_of_position(clock, 1.0) == pytest.approx(clock.half_sheet, rel=1e-15)


def test_uniform_motion_at_flat_state():
    clock = TrajectoryClock(Microstate(1, 1, 0), W)
    x = np.linspace(-1, 1, 11)
    assert np.allclose(exact_time_of_position(clock, x), x / W.speed, rtol=1e-15, atol=0)
    assert np.allclose(exact_time_of_position(clock, x, "-x"), -x / W.speed, rtol=1e-15, atol=0)


@pytest.mark.parametrize("abc,expected", [((1, 1, 0), True), ((2, 3, 1), True), ((5, 0.5, -1), False)])
def test_monotone_classification(abc, expected):
    assert is_monotone(Microstate(*abc)) is expected


def test_monotone_margin_matches_dense_scan():
    for ms in seeded_microstates(11, 10, require_monotone=False):
        s = np.linspace(-math.pi, math.pi, 200001)
        a, b, c = ms.as_tuple()
        N = 0.5 * (a + b) + 0.5 * (a - b) * (np.cos(s) + s * np.sin(s)) + 0.5 * c * (np.sin(s) - s * np.cos(s))
        dense = N.min() / (0.5 * (a + b) + 0.5 * (a - b))
        # coarse grid away from zero, refined near it
        assert monotone_margin(ms) == pytest.approx(dense, abs=1e-4)
        assert (monotone_margin(ms) > 0) == (dense > 0)


def test_wall_series_agrees_to_second_order():
    clock = TrajectoryClock(Microstate(2, 3, 1), W)
    errs = []
    for eps in (0.02, 0.01, 0.005):
        x = -1 + eps
        errs.append(abs(wall_series_time(clock, x, eps) - exact_time_of_position(clock, x)))
    assert errs[0] / errs[1] == pytest.approx(8, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(8, rel=0.05)


def test_band_edge_is_series_time_at_edge():
    clock = TrajectoryClock(Microstate(2, 3, 1), W)
    eps = 0.05
    assert band_edge_time(clock, eps, "left") == pytest.approx(-wall_series_time(clock, -1 + eps, eps), rel=1e-14)
    assert band_edge_time(clock, eps, "right") == pytest.approx(wall_series_time(clock, 1 - eps, eps, wall="right"), rel=1e-14)


def test_reversion_exact_at_flat_state():
    clock = TrajectoryClock(Microstate(1, 1, 0), W)
    for x in (-1.0, -0.97, -0.951):
        dt = exact_time_of_position(clock, x)
        assert revert_position(clock, dt, 0.05) == pytest.approx(x, abs=1e-15)


def test_reversion_window_enforced():
    clock = TrajectoryClock(Microstate(2, 3, 1), W)
    with pytest.raises(WindowError):
        revert_position(clock, 0.0, 0.05)
    with pytest.raises(DomainError):
        wall_series_time(clock, 0.0, 0.05)


@given(st.floats(-50, 50, allow_nan=False))
@settings(max_examples=200)
def test_sheet_coordinates_reconstruct_time(t):
    clock = TrajectoryClock(Microstate(2, 3, 1), W, tau0=0.3)
    cycle, plus, s = sheet_coordinates(clock, t)
    tau_p, tau_m = clock.epochs(cycle)
    back = tau_p + s if plus else tau_m - s
    assert back == pytest.approx(t, abs=1e-12)
    assert -clock.half_sheet <= s <= clock.half_sheet


@pytest.mark.parametrize("ms", seeded_microstates(5, 6))
def test_locate_particle_round_trip(ms):
    clock = TrajectoryClock(ms, W, tau0=-0.4)
    for t in np.linspace(-3, 7, 23):
        snap = locate_particle(clock, t)
        s = t - snap.sheet_epoch if snap.direction is Direction.PLUS else snap.sheet_epoch - t
        assert exact_time_of_position(clock, snap.x) == pytest.approx(s, abs=1e-12)


def test_locate_particle_walls():
    clock = TrajectoryClock(Microstate(2, 3, 1), W)
    H = clock.half_sheet
    assert locate_particle(clock, -H).x == -1.0
    assert locate_particle(clock, H).x == 1.0
    assert locate_particle(clock, H).direction is Direction.MINUS


def test_locate_particle_rejects_non_monotone():
    with pytest.raises(DegeneracyError):
        locate_particle(TrajectoryClock(Microstate(5, 0.5, -1), W), 0.1)


@pytest.mark.parametrize("abc", [(1, 1, 0.5), (2, 3, 1), (0.4, 1, -0.3)])
def test_reversion_solves_wall_series(abc):
    clock = TrajectoryClock(Microstate(*abc), W)
    eps = 0.1
    H, edge = clock.half_sheet, band_edge_time(clock, eps, "left")
    for t in np.linspace(-H, -edge, 7):
        x = revert_position(clock, t, eps)
        assert wall_series_time(clock, x, eps) == pytest.approx(t, abs=1e-10)

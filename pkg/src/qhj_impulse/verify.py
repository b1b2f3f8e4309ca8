"""Invariant suites behind ``qhj-impulse verify``.

Each group checks one module's contracts against the configured well,
microstate and impulse. Groups return a list of ``Check`` records; a group
that cannot apply to the configured microstate records a skip instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import eigenpair as ep
from .ensemble import EnsembleSpec, FixedSource, run_ensemble
from .errors import NumericalError
from .kinematics import (
    Direction,
    TrajectoryClock,
    exact_time_of_position,
    is_monotone,
    locate_particle,
    revert_position,
)
from .model import ImpulseSpec, Microstate, WellModel
from .oracle import QuadratureSpec, canonical_fd_e1, fit_convergence_order, matrix_element_quadrature
from .perturbation import (
    CASE_ORDER,
    E1Case,
    Variant,
    copenhagen_bracket,
    copenhagen_matrix_element,
    gamma_for_case,
    trajectory_e1,
    window_midpoint,
)


@dataclass(frozen=True)
class Check:
    group: str
    name: str
    passed: bool
    detail: str = ""
    skipped: bool = False


def _rel(x: float, y: float) -> float:
    return abs(x - y) / max(abs(y), 1e-300)


def _grid(well: WellModel, n: int = 101, open_ends: bool = False) -> np.ndarray:
    x = np.linspace(-well.q, well.q, n)
    return x[1:-1] if open_ends else x


def check_model(well, ms, spec):
    out = []
    out.append(Check("model", "k = pi/(2q)", _rel(well.k, math.pi / (2 * well.q)) < 1e-15))
    E0 = well.hbar**2 * well.k**2 / (2 * well.m)
    out.append(Check("model", "E0 = hbar^2 k^2 / 2m", _rel(well.E0, E0) < 1e-14))
    out.append(Check("model", "G sqrt(D) = b", _rel(ms.G * math.sqrt(ms.disc), ms.b) < 1e-14))
    out.append(Check("model", "G scale invariant", _rel(ms.scaled(3.7).G, ms.G) < 1e-14))
    return out


def check_wronskian(well, ms, spec):
    ctx = ep.make_context(well, ms)
    w = np.asarray(ep.wronskian(ctx, _grid(well, 1001)))
    spread = float(np.std(w) / abs(np.mean(w)))
    target = _rel(float(np.mean(w)) ** 2, ep.wronskian_squared_target(ctx))
    return [
        Check("wronskian", "constant in x", spread <= 1e-10, f"stdev/|mean| = {spread:.3g}"),
        Check("wronskian", "W^2 = 2m/(hbar^2 D)", target <= 1e-12, f"rel err = {target:.3g}"),
    ]


def check_psi(well, ms, spec):
    ctx = ep.make_context(well, ms)
    x = _grid(well, 101, open_ends=True)
    err = float(np.max(np.abs(np.asarray(ep.reconstruct_psi(ctx, x)) - np.asarray(ep.phi(ctx, x)))))
    return [Check("psi", "reconstruction equals phi", err <= 1e-12, f"max abs err = {err:.3g}")]


def check_qshje(well, ms, spec):
    ctx = ep.make_context(well, ms)
    res = float(np.max(np.abs(ep.qshje_residual(ctx, _grid(well, 201, open_ends=True)))))
    return [Check("qshje", "residual vanishes", res <= 1e-9, f"max |residual| = {res:.3g}")]


def check_momentum(well, ms, spec):
    ctx = ep.make_context(well, ms)
    x = _grid(well, 41, open_ends=True)
    h = 1e-5 * well.q
    fd = (np.asarray(ep.hamilton_W(ctx, x + h)) - np.asarray(ep.hamilton_W(ctx, x - h))) / (2 * h)
    p = np.asarray(ep.conjugate_momentum(ctx, x))
    err = float(np.max(np.abs(fd - p) / np.abs(p)))
    sym = float(np.max(np.abs(np.asarray(ep.conjugate_momentum(ctx, x, -1)) + p)))
    return [
        Check("momentum", "dW/dx matches conjugate momentum", err <= 1e-7, f"max rel err = {err:.3g}"),
        Check("momentum", "reverse sheet flips sign", sym == 0.0),
    ]


def _skip_nonmonotone(group, ms):
    return [Check(group, "monotone equation of motion", True, f"skipped: {ms.as_tuple()} is not monotone", True)]


def check_kinematics(well, ms, spec):
    if not is_monotone(ms):
        return _skip_nonmonotone("kinematics", ms)
    clock = TrajectoryClock(ms, well, 0.0)
    H = clock.half_sheet
    wall = _rel(exact_time_of_position(clock, well.q), H)
    worst = 0.0
    for t in np.linspace(-H, 3 * H, 17):
        snap = locate_particle(clock, float(t))
        s = t - snap.sheet_epoch if snap.direction is Direction.PLUS else snap.sheet_epoch - t
        worst = max(worst, abs(exact_time_of_position(clock, snap.x) - s))
    return [
        Check("kinematics", "wall reached at t - tau = H", wall <= 1e-14, f"rel err = {wall:.3g}"),
        Check("kinematics", "locate_particle round trip", bool(worst <= 1e-10 * clock.t_period), f"max |dt| = {worst:.3g}"),
    ]


def _reversion_error(clock, eps):
    x = -clock.well.q + 0.5 * eps
    dt = exact_time_of_position(clock, x)
    return abs(revert_position(clock, dt, eps) - x)


def check_reversion(well, ms, spec):
    if not is_monotone(ms):
        return _skip_nonmonotone("reversion", ms)
    clock = TrajectoryClock(ms, well)
    base = min(spec.epsilon, 0.05 * well.q)
    eps = [base, base / 2, base / 4, base / 8]
    errs = [(e, _reversion_error(clock, e)) for e in eps]
    if any(err == 0.0 for _, err in errs):
        return [Check("reversion", "round trip exact", True, "round-trip error is zero")]
    order = fit_convergence_order(errs)
    return [Check("reversion", "round-trip error at least third order", order >= 2.7, f"fitted order = {order:.3f}")]


def check_copenhagen(well, ms, spec):
    quad = float(matrix_element_quadrature(well, spec, QuadratureSpec()))
    closed = copenhagen_bracket(well, spec.epsilon) / well.q
    orig = copenhagen_matrix_element(well, spec, Variant.ORIGINAL)
    errata = copenhagen_matrix_element(well, spec, Variant.ERRATA)
    err = _rel(closed, quad)
    return [
        Check("copenhagen", "bracket matches quadrature", err <= 1e-10, f"rel err = {err:.3g}"),
        Check("copenhagen", "errata = original / q", errata == orig / well.q),
    ]


def check_trajectory_e1(well, ms, spec):
    out = []
    flat = Microstate(1.0, 1.0, 0.0)
    unit = ImpulseSpec(spec.F, spec.epsilon, 0.0, spec.T_weight)
    expect = spec.F * well.hbar * well.k * spec.T_weight / well.m
    signs = {E1Case.LEFT_WALL_PLUS: 1, E1Case.RIGHT_WALL_PLUS: -1, E1Case.RIGHT_WALL_MINUS: 1, E1Case.LEFT_WALL_MINUS: -1}
    worst = 0.0
    for case, sign in signs.items():
        s = window_midpoint(well, flat, unit, case)
        g = gamma_for_case(well, flat, 0.0, case, s)
        got = trajectory_e1(well, flat, ImpulseSpec(spec.F, spec.epsilon, g, spec.T_weight), 0.0).e1
        worst = max(worst, abs(got - sign * expect))
    out.append(Check("trajectory_e1", "flat-state wall values", worst <= 1e-14 * max(1.0, abs(expect)), f"max err = {worst:.3g}"))
    if not is_monotone(ms):
        return out + _skip_nonmonotone("trajectory_e1", ms)
    small = ImpulseSpec(spec.F if spec.F != 0 else 1.0, 1e-3 * well.q, 0.0, spec.T_weight)
    worst = 0.0
    for case in CASE_ORDER[:4]:
        s = window_midpoint(well, ms, small, case)
        g = gamma_for_case(well, ms, 0.0, case, s)
        ev = ImpulseSpec(small.F, small.epsilon, g, small.T_weight)
        closed = trajectory_e1(well, ms, ev, 0.0).e1
        fd = canonical_fd_e1(well, ms, ev, 0.0, fd_step=1e-6 * TrajectoryClock(ms, well).half_sheet)
        worst = max(worst, _rel(closed, fd))
    out.append(Check("trajectory_e1", "closed forms match canonical FD", worst <= 1e-4, f"max rel err = {worst:.3g}"))
    return out


def check_ensemble(well, ms, spec):
    if not is_monotone(ms):
        return _skip_nonmonotone("ensemble", ms)
    ens = EnsembleSpec(50_000, ImpulseSpec(spec.F, spec.epsilon, spec.gamma, spec.T_weight), FixedSource(ms), rng_seed=12345)
    rep = run_ensemble(ens, well, threads=1)
    z = abs(rep.mean_e1) / rep.stderr_e1 if rep.stderr_e1 > 0 else 0.0
    total = sum(rep.case_histogram.values())
    return [
        Check("ensemble", "mean consistent with zero", z <= 4.0, f"|mean|/stderr = {z:.3f}"),
        Check("ensemble", "case counts sum to n", total == rep.n),
    ]


GROUPS: dict[str, Callable] = {
    "model": check_model,
    "wronskian": check_wronskian,
    "psi": check_psi,
    "qshje": check_qshje,
    "momentum": check_momentum,
    "kinematics": check_kinematics,
    "reversion": check_reversion,
    "copenhagen": check_copenhagen,
    "trajectory_e1": check_trajectory_e1,
    "ensemble": check_ensemble,
}


def run_groups(well: WellModel, ms: Microstate, spec: ImpulseSpec, groups=None) -> list[Check]:
    names = list(GROUPS) if not groups else list(groups)
    for name in names:
        if name not in GROUPS:
            raise KeyError(name)
    results = []
    for name in names:
        try:
            results.extend(GROUPS[name](well, ms, spec))
        except NumericalError as exc:
            results.append(Check(name, "numerical failure", False, str(exc)))
    return results

"""Brute-force reference computations.

Nothing here calls into eigenpair, kinematics or perturbation: the
equation of motion, the sheet bookkeeping and the impulse profile are
re-derived locally so that agreement means something.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, ValidationError, WindowError
from .model import ImpulseSpec, Microstate, WellModel


@dataclass(frozen=True)
class QuadratureSpec:
    rule: str = "adaptive_simpson"
    abs_tol: float = 1e-14
    max_depth: int = 50
    rel_tol: float = 1e-13

    def __post_init__(self):
        if self.rule not in ("adaptive_simpson", "gauss_legendre"):
            raise ValidationError("rule", f"unknown quadrature rule {self.rule!r}")
        if not self.abs_tol > 0:
            raise ValidationError("abs_tol", f"must be > 0, got {self.abs_tol!r}")
        if self.max_depth < 1:
            raise ValidationError("max_depth", f"must be >= 1, got {self.max_depth!r}")


def adaptive_simpson(f, lo: float, hi: float, abs_tol: float, rel_tol: float = 0.0, max_depth: int = 50) -> float:
    """Recursive Simpson with Richardson correction."""

    def simpson(a, fa, b, fb):
        m = 0.5 * (a + b)
        fm = f(m)
        return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, fa, b, fb, m, fm, whole, tol, depth):
        lm, flm, left = simpson(a, fa, m, fm)
        rm, frm, right = simpson(m, fm, b, fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * max(tol, rel_tol * abs(left + right)):
            return left + right + delta / 15.0
        if depth >= max_depth:
            raise ConvergenceError(f"adaptive Simpson did not converge on [{a}, {b}] at depth {depth}")
        return recurse(a, fa, m, fm, lm, flm, left, tol / 2.0, depth + 1) + recurse(
            m, fm, b, fb, rm, frm, right, tol / 2.0, depth + 1
        )

    if hi == lo:
        return 0.0
    fa, fb = f(lo), f(hi)
    m, fm, whole = simpson(lo, fa, hi, fb)
    return recurse(lo, fa, hi, fb, m, fm, whole, abs_tol, 0)


def gauss_legendre(f, lo: float, hi: float, abs_tol: float, rel_tol: float = 0.0, max_depth: int = 50) -> float:
    """Gauss-Legendre with node doubling until successive estimates agree."""
    if hi == lo:
        return 0.0

    def rule(n):
        nodes, weights = np.polynomial.legendre.leggauss(n)
        half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
        return half * float(np.sum(weights * np.array([f(mid + half * t) for t in nodes])))

    n = 8
    prev = rule(n)
    for _ in range(max_depth):
        n *= 2
        cur = rule(n)
        if abs(cur - prev) <= max(abs_tol, rel_tol * abs(cur)):
            return cur
        prev = cur
        if n > 4096:
            break
    raise ConvergenceError(f"Gauss-Legendre did not reach tolerance {abs_tol} with {n} nodes")


def tent_matrix_element(well: WellModel, epsilon: float, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """<0| tent |0> with psi = q^(-1/2) cos(kx), integrated numerically over both bands."""
    q, k = well.q, well.k
    if epsilon == 0.0:
        return 0.0

    def left(x):
        return math.cos(k * x) ** 2 / q * (-x - q + epsilon)

    def right(x):
        return math.cos(k * x) ** 2 / q * (x - q + epsilon)

    integrate = adaptive_simpson if quad.rule == "adaptive_simpson" else gauss_legendre
    return integrate(left, -q, -q + epsilon, quad.abs_tol, quad.rel_tol, quad.max_depth) + integrate(
        right, q - epsilon, q, quad.abs_tol, quad.rel_tol, quad.max_depth
    )


def matrix_element_quadrature(well: WellModel, spec: ImpulseSpec, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Numerical <0|dV|0> for the normalised ground state.

    With psi normalised on [-q, q] this is the corrected (divided by q)
    matrix element; multiply by q for the bare bracket.
    """
    return tent_matrix_element(well, spec.epsilon, quad)


# -- equation of motion, re-derived -------------------------------------------------


def _eom_time(well: WellModel, ms: Microstate, x: float) -> float:
    """t - tau on a +x sheet, from dW/dE = hbar x sqrt(D) k'(E) / (a cos^2 + b sin^2 + c sin cos)."""
    kx = well.k * x
    cs, sn = math.cos(kx), math.sin(kx)
    den = ms.a * cs * cs + ms.b * sn * sn + ms.c * sn * cs
    disc = ms.a * ms.b - 0.25 * ms.c * ms.c
    return well.m * x * math.sqrt(disc) / (well.hbar * well.k * den)


def _bisect(fun, lo: float, hi: float, xtol: float, maxiter: int = 400) -> float:
    flo, fhi = fun(lo), fun(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ConvergenceError(f"no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol or mid <= lo or mid >= hi:
            return mid
        fm = fun(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    raise ConvergenceError(f"bisection did not reach xtol {xtol} in {maxiter} steps")


def invert_eom_bruteforce(clock, dt: float, direction: int = +1, xtol: float = 1e-13) -> float:
    """Solve the exact equation of motion for x by plain bisection.

    ``dt`` is t - tau on the sheet of the given direction. Only the
    microstate and well of ``clock`` are used.
    """
    return _invert(clock.well, clock.ms, dt, direction, xtol)


def _invert(well: WellModel, ms: Microstate, dt: float, direction: int, xtol: float) -> float:
    q = well.q
    target = dt if direction > 0 else -dt
    wall = _eom_time(well, ms, q)
    if not -wall <= target <= wall:
        raise WindowError(f"t - tau = {dt} outside the sheet span [-{wall}, {wall}] (direction {direction:+d})")
    try:
        return _bisect(lambda x: _eom_time(well, ms, x) - target, -q, q, xtol)
    except ConvergenceError as exc:
        raise ConvergenceError(f"{exc} (direction {direction:+d}, t - tau = {dt})") from exc


def position_at(well: WellModel, ms: Microstate, tau_plus: float, t: float, xtol: float = 0.0) -> tuple[float, int]:
    """(x, direction) at absolute time t for the trajectory with +x epoch tau_plus."""
    wall = _eom_time(well, ms, well.q)  # half-sheet duration
    period = 4.0 * wall
    phase = (t - tau_plus + wall) % period
    if phase < 2.0 * wall:
        return _invert(well, ms, phase - wall, +1, xtol), +1
    # -x sheet epoch sits 2 * wall after tau_plus
    return _invert(well, ms, phase - 3.0 * wall, -1, xtol), -1


def _tent(well: WellModel, epsilon: float, x: float) -> tuple[float, str]:
    q = well.q
    if -q <= x < -q + epsilon:
        return -x - q + epsilon, "left"
    if q - epsilon < x <= q:
        return x - q + epsilon, "right"
    return 0.0, "none"


def canonical_fd_e1(
    well: WellModel, ms: Microstate, spec: ImpulseSpec, tau0: float, fd_step: float = 1e-7
) -> float:
    """E1 = F T d(dV)/d(tau) by central differences on the exactly inverted trajectory."""
    samples = []
    for shift in (-fd_step, 0.0, fd_step):
        x, direction = position_at(well, ms, tau0 + shift, spec.gamma)
        value, band = _tent(well, spec.epsilon, x)
        samples.append((value, band, direction))
    bands = {(band, direction) for _, band, direction in samples}
    if len(bands) != 1 or samples[1][1] == "none":
        raise WindowError(
            f"finite-difference stencil (h = {fd_step}) leaves a single wall band: {sorted(bands)}"
        )
    return spec.F * spec.T_weight * (samples[2][0] - samples[0][0]) / (2.0 * fd_step)


def fit_convergence_order(errors: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(err) against log(h)."""
    if len(errors) < 3:
        raise ValidationError("errors", f"need at least 3 points, got {len(errors)}")
    h = np.array([e[0] for e in errors], dtype=float)
    err = np.array([e[1] for e in errors], dtype=float)
    if np.any(h <= 0):
        raise ValidationError("h", "step sizes must be > 0")
    if np.any(err <= 0):
        raise ValidationError("err", "errors must be > 0")
    if np.any(np.diff(h) >= 0):
        raise ValidationError("h", "step sizes must be strictly decreasing")
    slope, _ = np.polyfit(np.log(h), np.log(err), 1)
    return float(slope)

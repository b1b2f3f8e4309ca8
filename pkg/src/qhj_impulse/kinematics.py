"""Trajectory engine: exact t(x), its wall-band expansion and reversion,
sheet bookkeeping and particle localization.

Time is measured relative to the epoch of the sheet in use. The +x sheet
runs from x = -q at t - tau = -H to x = +q at t - tau = +H, where
H = m q / (hbar k G). The following -x sheet has epoch tau + 2H, so a
full cycle lasts 4H.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import ConvergenceError, DegeneracyError, DomainError, WindowError
from .model import Microstate, WellModel


class Direction(Enum):
    PLUS = "+x"
    MINUS = "-x"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.PLUS else -1

    @classmethod
    def coerce(cls, value) -> Direction:
        if isinstance(value, cls):
            return value
        if value in (1, "+", "+x", "plus"):
            return cls.PLUS
        if value in (-1, "-", "-x", "minus"):
            return cls.MINUS
        raise ValueError(f"unknown direction {value!r}")


@dataclass(frozen=True)
class ParticleSnapshot:
    x: float
    direction: Direction
    sheet_epoch: float
    cycle_index: int


@dataclass(frozen=True)
class TrajectoryClock:
    """A microstate together with the epoch ``tau0`` of a reference +x sheet."""

    ms: Microstate
    well: WellModel
    tau0: float = 0.0

    @property
    def half_sheet(self) -> float:
        """H = m q / (hbar k G): time from the centre to a wall on one sheet."""
        w = self.well
        return w.m * w.q / (w.hbar * w.k * self.ms.G)

    @property
    def sheet_shift(self) -> float:
        """tau_minus - tau_plus within one cycle."""
        return 2.0 * self.half_sheet

    @property
    def t_period(self) -> float:
        return 4.0 * self.half_sheet

    def epochs(self, cycle: int = 0) -> tuple[float, float]:
        """(tau_plus, tau_minus) of the given cycle."""
        tau_p = self.tau0 + cycle * self.t_period
        return tau_p, tau_p + self.sheet_shift


def _numerator_profile(ms: Microstate, s):
    """Sign-determining factor of dt/dx as a function of s = 2kx in [-pi, pi]."""
    a, b, c = ms.as_tuple()
    return (
        0.5 * (a + b)
        + 0.5 * (a - b) * (np.cos(s) + s * np.sin(s))
        + 0.5 * c * (np.sin(s) - s * np.cos(s))
    )


_PROFILE_GRID = np.linspace(-math.pi, math.pi, 1025)


@functools.lru_cache(maxsize=4096)
def monotone_margin(ms: Microstate) -> float:
    """Minimum over the sheet of dt/dx, normalised by its value at x = 0.

    Positive iff the exact equation of motion is strictly increasing in x on
    a +x sheet. Depends only on (a, b, c). The coarse grid minimum is
    refined only when it is close enough to zero for the sign to be in doubt.
    """
    ref = float(_numerator_profile(ms, 0.0))
    vals = _numerator_profile(ms, _PROFILE_GRID)
    i = int(np.argmin(vals))
    best = float(vals[i]) / ref
    # grid error bound: max|N''| h^2 / 8 with |N''| <= (|a-b| + |c|)(1 + pi)/2
    h = _PROFILE_GRID[1] - _PROFILE_GRID[0]
    slack = (abs(ms.a - ms.b) + abs(ms.c)) * (1.0 + math.pi) / 2.0 * h * h / 8.0 / ref
    if best > 2.0 * slack:
        return best
    lo = _PROFILE_GRID[max(i - 1, 0)]
    hi = _PROFILE_GRID[min(i + 1, _PROFILE_GRID.size - 1)]
    res = minimize_scalar(
        lambda s: float(_numerator_profile(ms, s)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return min(best, float(res.fun) / ref)


def is_monotone(ms: Microstate) -> bool:
    return monotone_margin(ms) > 0.0


def require_monotone(ms: Microstate) -> None:
    margin = monotone_margin(ms)
    if margin <= 0.0:
        raise DegeneracyError(
            f"microstate {ms.as_tuple()} has a non-monotone equation of motion "
            f"(min dt/dx ratio {margin:.3g}); x(t) is multivalued on a sheet"
        )


def _check_closed(clock: TrajectoryClock, x) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    q = clock.well.q
    if np.any(np.abs(xa) > q) or np.any(~np.isfinite(xa)):
        raise DomainError(f"x outside [-{q}, {q}]: {x!r}")
    return xa


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def exact_time_of_position(clock: TrajectoryClock, x, direction=Direction.PLUS):
    """t - tau = +-2 (m x / hbar k) sqrt(ab - c^2/4) / [a + b + (a-b) cos 2kx + c sin 2kx]."""
    xa = _check_closed(clock, x)
    sign = Direction.coerce(direction).sign
    a, b, c = clock.ms.as_tuple()
    w = clock.well
    den = a + b + (a - b) * np.cos(2.0 * w.k * xa) + c * np.sin(2.0 * w.k * xa)
    return _out(sign * 2.0 * (w.m * xa / (w.hbar * w.k)) * math.sqrt(clock.ms.disc) / den)


def wall_series_time(clock: TrajectoryClock, x, eps: float, direction=Direction.PLUS, wall: str = "left"):
    """Second-order wall expansion of the equation of motion.

    Left band (0 <= x + q <= eps), offset y = x + q:
        t - tau = (m x / hbar k) sqrt(D) / [b - c k y + (a - b) k^2 y^2]
    Right band (0 <= q - x <= eps), offset z = q - x, with the sign of the c
    term reversed. The discarded terms are O(offset^3).
    """
    xa = _check_closed(clock, x)
    a, b, c = clock.ms.as_tuple()
    w = clock.well
    if wall == "left":
        off, cs = xa + w.q, -1.0
    elif wall == "right":
        off, cs = w.q - xa, 1.0
    else:
        raise ValueError(f"wall must be 'left' or 'right', got {wall!r}")
    # allow rounding in x = -q + eps
    slack = 4.0 * np.finfo(float).eps * w.q
    if np.any(off < -slack) or np.any(off > eps + slack):
        raise DomainError(f"x = {x!r} outside the {wall} wall band of width {eps}")
    sign = Direction.coerce(direction).sign
    den = b + cs * c * w.k * off + (a - b) * w.k**2 * off**2
    return _out(sign * (w.m * xa / (w.hbar * w.k)) * math.sqrt(clock.ms.disc) / den)


def band_edge_time(clock: TrajectoryClock, eps: float, wall: str) -> float:
    """|t - tau| at which the wall expansion puts the particle eps from the wall.

    Left wall: m (q - eps) / [hbar k G (1 - (c/b) k eps + ((a-b)/b) k^2 eps^2)];
    the right wall has +(c/b) k eps.
    """
    a, b, c = clock.ms.as_tuple()
    w = clock.well
    cs = -1.0 if wall == "left" else 1.0
    poly = 1.0 + cs * (c / b) * w.k * eps + ((a - b) / b) * w.k**2 * eps**2
    return w.m * (w.q - eps) / (w.hbar * w.k * clock.ms.G * poly)


def band_root(ms: Microstate, well: WellModel, s, wall: str):
    """Small root of the truncated wall equation and its time derivative.

    ``s`` is the signed sheet time of the +x sheet (negative at the left
    wall, positive at the right wall). Returns (offset, d offset/ds) where the
    offset is x + q (left) or q - x (right).

    The quadratic is A w^2 -+ B w + C = 0 with A = ((a-b)/b) k^2,
    B = (c/b) k + m/(hbar k G s), C = 1 +- m q/(hbar k G s). The root
    continuous with the linear a = b solution is 2C/(B + sgn(B) sqrt(disc)),
    which is also numerically stable as a -> b.
    """
    a, b, c = ms.as_tuple()
    k, q = well.k, well.q
    sa = np.asarray(s, dtype=float)
    A = ((a - b) / b) * k * k
    scale = well.m / (well.hbar * k * ms.G)
    mu = scale / sa
    u = scale / (sa * sa)
    B = (c / b) * k + mu
    if wall == "left":
        C = 1.0 + mu * q
    elif wall == "right":
        C = 1.0 - mu * q
    else:
        raise ValueError(f"wall must be 'left' or 'right', got {wall!r}")
    disc = B * B - 4.0 * A * C
    if np.any(disc < 0.0):
        raise DegeneracyError(f"negative radicand in wall reversion at s = {s!r}")
    R = np.where(B >= 0.0, 1.0, -1.0) * np.sqrt(disc)
    if np.any(B + R == 0.0):
        raise DegeneracyError(f"degenerate wall reversion at s = {s!r}")
    if wall == "left":
        off = 2.0 * C / (B + R)
    else:
        off = -2.0 * C / (B + R)
    doff = u * (off - q) / R
    return _out(off), _out(doff)


def revert_position(clock: TrajectoryClock, dt, eps: float, direction=Direction.PLUS):
    """Approximate x near the left wall from the sheet time ``dt = t - tau``.

    Inverts the second-order wall expansion in closed form. On a -x sheet
    the sheet time enters with the opposite sign.
    """
    sign = Direction.coerce(direction).sign
    s = sign * np.asarray(dt, dtype=float)
    H = clock.half_sheet
    edge = band_edge_time(clock, eps, "left")
    if np.any(s < -H) or np.any(s > -edge):
        raise WindowError(f"t - tau = {dt!r} outside the left-band window [{-H}, {-edge}]")
    off, _ = band_root(clock.ms, clock.well, s, "left")
    return _out(np.asarray(off) - clock.well.q)


def sheet_coordinates(clock: TrajectoryClock, t):
    """Reduce absolute time(s) to (cycle, on_plus_sheet, signed sheet time s).

    s is the argument of the +x equation of motion: t - tau_plus on +x sheets
    and tau_minus - t on -x sheets, both within [-H, H]. Works elementwise on
    arrays.
    """
    H, T = clock.half_sheet, clock.t_period
    shifted = np.asarray(t, dtype=float) - clock.tau0 + H
    cycle = np.floor(shifted / T)
    r = shifted - cycle * T
    wrap = r >= T
    cycle = np.where(wrap, cycle + 1, cycle)
    r = np.where(wrap, r - T, np.maximum(r, 0.0))
    plus = r < 2.0 * H
    s = np.clip(np.where(plus, r - H, 3.0 * H - r), -H, H)
    if np.ndim(s) == 0:
        return int(cycle), bool(plus), float(s)
    return cycle.astype(np.int64), plus, s


def locate_particle(clock: TrajectoryClock, t_query: float, xtol: float = 1e-14, maxiter: int = 200) -> ParticleSnapshot:
    """Position and sheet of the particle at absolute time ``t_query``.

    Solves the exact equation of motion by bracketed root finding on [-q, q].
    """
    require_monotone(clock.ms)
    cycle, plus, s = sheet_coordinates(clock, float(t_query))
    q, H = clock.well.q, clock.half_sheet
    tau_p, tau_m = clock.epochs(cycle)
    if s <= -H:
        x = -q
    elif s >= H:
        x = q
    else:
        fun = lambda x: exact_time_of_position(clock, x, Direction.PLUS) - s  # noqa: E731
        try:
            x, info = brentq(fun, -q, q, xtol=xtol, maxiter=maxiter, full_output=True, disp=False)
        except ValueError as exc:
            raise ConvergenceError(f"no bracket for s = {s} on sheet (cycle {cycle}): {exc}") from exc
        if not info.converged:
            raise ConvergenceError(
                f"root finder stopped after {info.iterations} iterations "
                f"(t = {t_query}, cycle {cycle}, s = {s}, flag {info.flag})"
            )
    if plus:
        return ParticleSnapshot(float(x), Direction.PLUS, tau_p, cycle)
    return ParticleSnapshot(float(x), Direction.MINUS, tau_m, cycle)

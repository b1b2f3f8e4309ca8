"""First-order energy transfer from the impulse, in both representations.

Copenhagen: E1 = F * <0|dV|0> * T, with the matrix element available in the
original form (bare bracket) and the corrected form (bracket / q).

Trajectory: E1 depends on where the particle is when the impulse fires.
Inside a wall band E1 = F * T * dV/dtau evaluated along the reverted wall
trajectory; elsewhere E1 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegeneracyError, WindowError
from .kinematics import TrajectoryClock, band_edge_time, band_root, require_monotone, sheet_coordinates
from .model import ImpulseSpec, Microstate, WellModel, check_impulse

# below this |a-b|/b the closed forms lose too many digits to cancellation
DEGENERATE_AB = 1e-8


class Variant(str, Enum):
    ORIGINAL = "original"
    ERRATA = "errata"


class E1Case(str, Enum):
    LEFT_WALL_PLUS = "left_wall_plus"
    RIGHT_WALL_PLUS = "right_wall_plus"
    RIGHT_WALL_MINUS = "right_wall_minus"
    LEFT_WALL_MINUS = "left_wall_minus"
    INTERIOR_ZERO = "interior_zero"


CASE_ORDER = tuple(E1Case)
_CASE_CODE = {case: i for i, case in enumerate(CASE_ORDER)}


@dataclass(frozen=True)
class CopenhagenE1:
    matrix_element: float
    e1: float
    variant: Variant


@dataclass(frozen=True)
class TrajectoryE1:
    e1: float
    case_id: E1Case
    window: tuple[float, float]
    sheet_time: float


def _x_minus_sin(x: float) -> float:
    """x - sin(x) without cancellation for small x."""
    if abs(x) >= 1.0:
        return x - math.sin(x)
    term = x**3 / 6.0
    total, n = 0.0, 1
    while True:
        total += term
        n += 1
        term *= -(x * x) / ((2 * n) * (2 * n + 1))
        if abs(term) <= 1e-18 * abs(total):
            return total + term


def copenhagen_bracket(well: WellModel, epsilon: float) -> float:
    """eps^2/2 - 1/(4k^2) + cos(2 k eps)/(4k^2).

    Evaluated as (eps - sin(k eps)/k)(eps + sin(k eps)/k)/2, which is the same
    quantity but keeps full relative precision down to eps -> 0, where it
    behaves like k^2 eps^4 / 6.
    """
    k = well.k
    ke = k * epsilon
    return 0.5 * (_x_minus_sin(ke) / k) * (epsilon + math.sin(ke) / k)


def copenhagen_matrix_element(well: WellModel, spec: ImpulseSpec, variant=Variant.ORIGINAL) -> float:
    check_impulse(well, spec)
    bracket = copenhagen_bracket(well, spec.epsilon)
    if Variant(variant) is Variant.ERRATA:
        return bracket / well.q
    return bracket


def copenhagen_e1(well: WellModel, spec: ImpulseSpec, variant=Variant.ORIGINAL) -> CopenhagenE1:
    variant = Variant(variant)
    me = copenhagen_matrix_element(well, spec, variant)
    return CopenhagenE1(me, spec.F * me * spec.T_weight, variant)


@dataclass(frozen=True)
class CaseWindows:
    """Sheet-time windows of the four wall cases for one microstate and band.

    H is the wall time; left/right are the band-edge times from the wall
    expansion. Plus cases use s = gamma - tau_plus, minus cases use
    s = tau_minus - gamma.
    """

    H: float
    left: float
    right: float

    def bounds(self, case: E1Case) -> tuple[float, float]:
        case = E1Case(case)
        if case in (E1Case.LEFT_WALL_PLUS, E1Case.LEFT_WALL_MINUS):
            return (-self.H, -self.left)
        if case in (E1Case.RIGHT_WALL_PLUS, E1Case.RIGHT_WALL_MINUS):
            return (self.right, self.H)
        return (-self.left, self.right)

    def contains(self, case: E1Case, s: float) -> bool:
        # open or closed ends differ per case
        lo, hi = self.bounds(case)
        case = E1Case(case)
        if case in (E1Case.LEFT_WALL_PLUS, E1Case.LEFT_WALL_MINUS):
            return lo < s <= hi
        if case is E1Case.RIGHT_WALL_PLUS:
            return lo < s < hi
        if case is E1Case.RIGHT_WALL_MINUS:
            return lo <= s < hi
        return lo <= s <= hi


def case_windows(well: WellModel, ms: Microstate, epsilon: float) -> CaseWindows:
    clock = TrajectoryClock(ms, well)
    H = clock.half_sheet
    left = band_edge_time(clock, epsilon, "left")
    right = band_edge_time(clock, epsilon, "right")
    if not (0.0 < left < H and 0.0 < right < H):
        raise DegeneracyError(
            f"band edge times ({left}, {right}) not inside (0, H={H}) for microstate "
            f"{ms.as_tuple()} and epsilon {epsilon}"
        )
    return CaseWindows(H, left, right)


def _case_sign_and_wall(case: E1Case) -> tuple[float, str]:
    return {
        E1Case.LEFT_WALL_PLUS: (1.0, "left"),
        E1Case.LEFT_WALL_MINUS: (-1.0, "left"),
        E1Case.RIGHT_WALL_PLUS: (1.0, "right"),
        E1Case.RIGHT_WALL_MINUS: (-1.0, "right"),
    }[case]


def _closed_form(case: E1Case, well: WellModel, ms: Microstate, spec: ImpulseSpec, s):
    """Closed forms in the wall-band parameters A, B, C.

    The radical is taken on the branch of sign(B), and the right-wall q-term
    sign is the one consistent with the right-wall quadratic.
    """
    a, b, c = ms.as_tuple()
    k, q = well.k, well.q
    A = ((a - b) / b) * k * k
    scale = well.m / (well.hbar * k * ms.G)
    mu = scale / s
    u = scale / (s * s)
    B = (c / b) * k + mu
    sign, wall = _case_sign_and_wall(case)
    C = 1.0 + mu * q if wall == "left" else 1.0 - mu * q
    disc = B * B - 4.0 * A * C
    if np.any(disc < 0.0):
        raise DegeneracyError(f"negative radicand in {case.value} at sheet time {s!r}")
    R = np.where(B >= 0.0, 1.0, -1.0) * np.sqrt(disc)
    pref = spec.T_weight * b * spec.F / (2.0 * (a - b) * k * k)
    if wall == "left":
        brace = -u + (u * B - 2.0 * A * q * u) / R
    else:
        brace = u - (u * B + 2.0 * A * q * u) / R
    return sign * pref * brace


def _rationalized_form(case: E1Case, well: WellModel, ms: Microstate, spec: ImpulseSpec, s):
    # dV/dtau reduces to d(offset)/ds on either wall; sign carries the sheet
    sign, wall = _case_sign_and_wall(case)
    _, doff = band_root(ms, well, s, wall)
    return sign * spec.F * spec.T_weight * np.asarray(doff)


def _wall_value(case: E1Case, well: WellModel, ms: Microstate, spec: ImpulseSpec, s):
    if abs(ms.a - ms.b) / ms.b < DEGENERATE_AB:
        return _rationalized_form(case, well, ms, spec, s)
    return _closed_form(case, well, ms, spec, s)


def trajectory_e1_case(case_id, well: WellModel, ms: Microstate, spec: ImpulseSpec, sheet_time: float) -> float:
    """Evaluate one case formula.

    ``sheet_time`` is gamma - tau_plus for the +x cases and tau_minus - gamma
    for the -x cases, and must lie inside that case's window.
    """
    case = E1Case(case_id)
    check_impulse(well, spec)
    require_monotone(ms)
    win = case_windows(well, ms, spec.epsilon)
    if not win.contains(case, sheet_time):
        raise WindowError(f"sheet time {sheet_time} outside the {case.value} window {win.bounds(case)}")
    if case is E1Case.INTERIOR_ZERO:
        return 0.0
    return float(_wall_value(case, well, ms, spec, float(sheet_time)))


def classify(win: CaseWindows, plus, s):
    """Case codes (indices into CASE_ORDER) for arrays of sheet coordinates.

    The wall instants s = +-H belong to the wall case of their sheet; the
    formulas are continuous there.
    """
    plus = np.asarray(plus, dtype=bool)
    s = np.asarray(s, dtype=float)
    codes = np.full(s.shape, _CASE_CODE[E1Case.INTERIOR_ZERO], dtype=np.int64)
    left = s <= -win.left
    codes[plus & left] = _CASE_CODE[E1Case.LEFT_WALL_PLUS]
    codes[plus & (s > win.right)] = _CASE_CODE[E1Case.RIGHT_WALL_PLUS]
    codes[~plus & (s >= win.right)] = _CASE_CODE[E1Case.RIGHT_WALL_MINUS]
    codes[~plus & left] = _CASE_CODE[E1Case.LEFT_WALL_MINUS]
    return codes


def trajectory_e1_batch(well: WellModel, ms: Microstate, spec: ImpulseSpec, tau0):
    """Vectorised dispatch over an array of +x epochs. Returns (e1, codes)."""
    require_monotone(ms)
    win = case_windows(well, ms, spec.epsilon)
    clock = TrajectoryClock(ms, well, 0.0)
    _, plus, s = sheet_coordinates(clock, spec.gamma - np.asarray(tau0, dtype=float))
    plus, s = np.atleast_1d(plus), np.atleast_1d(s)
    codes = classify(win, plus, s)
    e1 = np.zeros(s.shape)
    for case in CASE_ORDER[:4]:
        sel = codes == _CASE_CODE[case]
        if np.any(sel):
            e1[sel] = _wall_value(case, well, ms, spec, s[sel])
    return e1, codes


def trajectory_e1(well: WellModel, ms: Microstate, spec: ImpulseSpec, tau0: float) -> TrajectoryE1:
    """E1 for a particle on the trajectory whose +x sheet epoch is ``tau0``.

    ``spec.gamma`` may be any time; it is reduced modulo the period and
    mapped to a sheet before the case is chosen from the analytic windows.
    """
    check_impulse(well, spec)
    require_monotone(ms)
    win = case_windows(well, ms, spec.epsilon)
    clock = TrajectoryClock(ms, well, tau0)
    _, plus, s = sheet_coordinates(clock, spec.gamma)
    code = int(classify(win, np.array([plus]), np.array([s]))[0])
    case = CASE_ORDER[code]
    if case is E1Case.INTERIOR_ZERO:
        e1 = 0.0
    else:
        e1 = float(_wall_value(case, well, ms, spec, s))
    return TrajectoryE1(e1, case, win.bounds(case), s)


def window_midpoint(well: WellModel, ms: Microstate, spec: ImpulseSpec, case_id) -> float:
    lo, hi = case_windows(well, ms, spec.epsilon).bounds(E1Case(case_id))
    return 0.5 * (lo + hi)


def gamma_for_case(well: WellModel, ms: Microstate, tau0: float, case_id, sheet_time: float) -> float:
    """Impulse time that puts the particle at ``sheet_time`` in the given case (cycle 0)."""
    case = E1Case(case_id)
    clock = TrajectoryClock(ms, well, tau0)
    tau_p, tau_m = clock.epochs(0)
    if case in (E1Case.LEFT_WALL_PLUS, E1Case.RIGHT_WALL_PLUS):
        return tau_p + sheet_time
    if case in (E1Case.LEFT_WALL_MINUS, E1Case.RIGHT_WALL_MINUS):
        return tau_m - sheet_time
    return tau_p + sheet_time

"""Interior eigenfunction pair, conjugate momentum and Hamilton's
characteristic function for one microstate of the ground state.

All functions accept scalars or numpy arrays for ``x``. Arrays come back
as arrays, scalars as floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import Microstate, WellModel


@dataclass(frozen=True)
class EigenPairContext:
    well: WellModel
    ms: Microstate

    @property
    def norm(self) -> float:
        """Common prefactor (2m / [hbar^2 k^2 (ab - c^2/4)])^(1/4)."""
        w = self.well
        return (2.0 * w.m / (w.hbar**2 * w.k**2 * self.ms.disc)) ** 0.25


def make_context(well: WellModel, ms: Microstate) -> EigenPairContext:
    return EigenPairContext(well, ms)


def _out(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


def _interior(ctx: EigenPairContext, x, *, closed: bool = True) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    q = ctx.well.q
    bad = np.abs(xa) > q if closed else np.abs(xa) >= q
    if np.any(bad) or np.any(~np.isfinite(xa)):
        where = xa[bad] if xa.ndim else xa
        raise DomainError(f"x outside the interior [-{q}, {q}]: {where!r}")
    return xa


def phi(ctx: EigenPairContext, x):
    xa = _interior(ctx, x)
    return _out(ctx.norm * np.cos(ctx.well.k * xa))


def theta(ctx: EigenPairContext, x):
    xa = _interior(ctx, x)
    return _out(ctx.norm * np.sin(ctx.well.k * xa))


def _pair_with_derivatives(ctx: EigenPairContext, xa: np.ndarray):
    n, k = ctx.norm, ctx.well.k
    cs, sn = np.cos(k * xa), np.sin(k * xa)
    # phi, phi', phi''  and  theta, theta', theta''
    return (n * cs, -n * k * sn, -n * k * k * cs), (n * sn, n * k * cs, -n * k * k * sn)


def wronskian(ctx: EigenPairContext, x):
    """phi * theta' - phi' * theta."""
    xa = _interior(ctx, x)
    (p, dp, _), (t, dt, _) = _pair_with_derivatives(ctx, xa)
    return _out(p * dt - dp * t)


def wronskian_squared_target(ctx: EigenPairContext) -> float:
    w = ctx.well
    return 2.0 * w.m / (w.hbar**2 * ctx.ms.disc)


def _quadratic_form(ctx: EigenPairContext, xa: np.ndarray):
    """Q = a phi^2 + b theta^2 + c phi theta and its first two x-derivatives."""
    a, b, c = ctx.ms.as_tuple()
    (p, dp, ddp), (t, dt, ddt) = _pair_with_derivatives(ctx, xa)
    Q = a * p * p + b * t * t + c * p * t
    dQ = 2.0 * a * p * dp + 2.0 * b * t * dt + c * (dp * t + p * dt)
    ddQ = (
        2.0 * a * (dp * dp + p * ddp)
        + 2.0 * b * (dt * dt + t * ddt)
        + c * (ddp * t + 2.0 * dp * dt + p * ddt)
    )
    return Q, dQ, ddQ


def denominator(ctx: EigenPairContext, x):
    """a phi^2 + b theta^2 + c phi theta (positive for a valid microstate)."""
    xa = _interior(ctx, x)
    return _out(_quadratic_form(ctx, xa)[0])


def conjugate_momentum(ctx: EigenPairContext, x, sign: int = +1):
    """dW/dx = +-(2m)^(1/2) / (a phi^2 + b theta^2 + c phi theta)."""
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    xa = _interior(ctx, x)
    Q = _quadratic_form(ctx, xa)[0]
    return _out(sign * math.sqrt(2.0 * ctx.well.m) / Q)


def hamilton_W(ctx: EigenPairContext, x):
    """Hamilton's characteristic function with the integration constant set to 0.

    The ground state has no interior node of phi, so the principal arctan
    branch covers (-q, q). At x = +-q the ratio theta/phi has a pole and the
    principal-branch limit +-hbar*pi/2 is returned.
    """
    xa = _interior(ctx, x)
    a, b, c = ctx.ms.as_tuple()
    hbar, q = ctx.well.hbar, ctx.well.q
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.tan(ctx.well.k * xa)
        val = hbar * np.arctan((b * ratio + c / 2.0) / math.sqrt(ctx.ms.disc))
    val = np.where(np.abs(xa) == q, np.sign(xa) * hbar * math.pi / 2.0, val)
    return _out(val)


def reconstruct_psi(ctx: EigenPairContext, x):
    """Rebuild the wave function from the microstate.

    sqrt(a phi^2 + b theta^2 + c phi theta) / sqrt(a - c^2/(4b)) * cos(W/hbar),
    which equals phi for every valid microstate.
    """
    xa = _interior(ctx, x)
    a, b, c = ctx.ms.as_tuple()
    Q = _quadratic_form(ctx, xa)[0]
    W = np.asarray(hamilton_W(ctx, xa))
    return _out(np.sqrt(Q) / math.sqrt(a - c * c / (4.0 * b)) * np.cos(W / ctx.well.hbar))


def schwarzian(ctx: EigenPairContext, x):
    """Schwarzian derivative <W; x> from closed-form derivatives of Q.

    With W' proportional to 1/Q this reduces to Q'^2/(2Q^2) - Q''/Q.
    """
    xa = _interior(ctx, x, closed=False)
    Q, dQ, ddQ = _quadratic_form(ctx, xa)
    s2m = math.sqrt(2.0 * ctx.well.m)
    W1 = s2m / Q
    W2 = -s2m * dQ / Q**2
    W3 = s2m * (2.0 * dQ**2 / Q**3 - ddQ / Q**2)
    return _out(W3 / W1 - 1.5 * (W2 / W1) ** 2)


def qshje_residual(ctx: EigenPairContext, x):
    """(W')^2/(2m) + V - E + (hbar^2/4m) <W; x>, with V = 0 inside the well."""
    xa = _interior(ctx, x, closed=False)
    w = ctx.well
    Q = _quadratic_form(ctx, xa)[0]
    W1 = math.sqrt(2.0 * w.m) / Q
    S = np.asarray(schwarzian(ctx, xa))
    return _out(W1**2 / (2.0 * w.m) - w.E0 + w.hbar**2 / (4.0 * w.m) * S)

"""Well geometry, ground-state quantization and microstate coefficients."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .errors import ValidationError


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValidationError(name, f"must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class WellModel:
    """Infinitely deep square well of half-width ``q`` (walls at x = +-q)."""

    hbar: float = 1.0
    m: float = 1.0
    q: float = 1.0
    k: float = field(init=False, repr=False)
    E0: float = field(init=False, repr=False)
    J: float = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("hbar", "m", "q"):
            object.__setattr__(self, name, _require_positive(name, getattr(self, name)))
        k = math.pi / (2.0 * self.q)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "E0", self.hbar**2 * math.pi**2 / (8.0 * self.m * self.q**2))
        object.__setattr__(self, "J", 4.0 * self.q * self.hbar * k)

    @property
    def speed(self) -> float:
        """Classical speed hbar*k/m of the a=b, c=0 microstate."""
        return self.hbar * self.k / self.m


def make_well(hbar: float = 1.0, m: float = 1.0, q: float = 1.0) -> WellModel:
    return WellModel(hbar, m, q)


@dataclass(frozen=True)
class Microstate:
    """Coefficients (a, b, c) selecting one trajectory of the ground state.

    Requires a > 0, b > 0 and ab - c^2/4 > 0 so that
    a*phi^2 + b*theta^2 + c*phi*theta stays positive.
    """

    a: float
    b: float
    c: float = 0.0

    def __post_init__(self):
        a, b, c = float(self.a), float(self.b), float(self.c)
        if not all(math.isfinite(v) for v in (a, b, c)):
            raise ValidationError("microstate", f"non-finite coefficient in {(a, b, c)!r}")
        if a <= 0.0:
            raise ValidationError("a", f"must be > 0, got {a!r}")
        if b <= 0.0:
            raise ValidationError("b", f"must be > 0, got {b!r}")
        if a * b - c * c / 4.0 <= 0.0:
            raise ValidationError(
                "ab - c^2/4", f"must be > 0, got {a * b - c * c / 4.0!r} for (a, b, c) = {(a, b, c)!r}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def disc(self) -> float:
        """ab - c^2/4."""
        return self.a * self.b - self.c * self.c / 4.0

    @property
    def G(self) -> float:
        return self.b / math.sqrt(self.disc)

    @property
    def ermakov(self) -> float:
        """Ermakov invariant 1/(a - c^2/(4b))."""
        return self.b / self.disc

    def scaled(self, lam: float) -> Microstate:
        return Microstate(lam * self.a, lam * self.b, lam * self.c)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


def make_microstate(a: float, b: float, c: float = 0.0) -> Microstate:
    return Microstate(a, b, c)


@dataclass(frozen=True)
class ImpulseSpec:
    """Impulse of strength F acting at time gamma on bands of width epsilon.

    ``T_weight`` is the integrated measure of the delta function in time.
    """

    F: float = 1.0
    epsilon: float = 0.1
    gamma: float = 0.0
    T_weight: float = 1.0

    def __post_init__(self):
        for name in ("F", "gamma"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(name, f"must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "epsilon", _require_positive("epsilon", self.epsilon))
        object.__setattr__(self, "T_weight", _require_positive("T_weight", self.T_weight))


class WideBandWarning(UserWarning):
    """Impulse band is not small compared with the well."""


def check_impulse(well: WellModel, spec: ImpulseSpec) -> None:
    """Reject epsilon >= q; warn when epsilon > q/10."""
    if spec.epsilon >= well.q:
        raise ValidationError("epsilon", f"must be < q = {well.q!r}, got {spec.epsilon!r}")
    if spec.epsilon > well.q / 10.0:
        warnings.warn(
            f"epsilon = {spec.epsilon} exceeds q/10; band truncation error grows as epsilon^3",
            WideBandWarning,
            stacklevel=3,
        )

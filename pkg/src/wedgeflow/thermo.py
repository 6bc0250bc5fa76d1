"""Ideal polytropic gas closures for full Euler and potential flow.

Full Euler uses ``p = kappa * rho**gamma * exp(S / cv)`` and
``c = sqrt(gamma p / rho)``.  The potential-flow closure is the scaled
isentropic law ``p = rho**gamma / gamma``, ``c**2 = rho**(gamma - 1)``,
``h = (rho**(gamma - 1) - 1) / (gamma - 1)``, which fixes ``c = 1`` at
``rho = 1``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ValidationError, VacuumError

SONIC_TOL = 1e-10


@dataclass(frozen=True)
class GasModel:
    gamma: float = 1.4
    R: float = 1.0
    cv: float = 2.5
    kappa: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValidationError(f"gamma must exceed 1, got {self.gamma}")
        if not (self.R > 0 and self.cv > 0 and self.kappa > 0):
            raise ValidationError("R, cv and kappa must be positive")
        if abs(self.gamma - (1.0 + self.R / self.cv)) > 1e-12 * self.gamma:
            raise ValidationError(
                f"gamma={self.gamma} inconsistent with 1 + R/cv = {1 + self.R / self.cv}"
            )

    @classmethod
    def from_gamma(cls, gamma=1.4, R=1.0, kappa=1.0) -> "GasModel":
        """Nondimensional gas with ``cv = R / (gamma - 1)``."""
        if not gamma > 1.0:
            raise ValidationError(f"gamma must exceed 1, got {gamma}")
        return cls(gamma=float(gamma), R=float(R), cv=R / (gamma - 1.0), kappa=float(kappa))


AIR = GasModel.from_gamma(1.4)


@dataclass(frozen=True)
class EulerPrimitive:
    """Primitive state (u1, u2, p, rho) of the steady Euler system."""

    u1: float
    u2: float
    p: float
    rho: float

    def __post_init__(self):
        if not (self.rho > 0 and self.p > 0):
            raise ValidationError(f"state needs rho > 0 and p > 0, got p={self.p}, rho={self.rho}")
        if not all(math.isfinite(v) for v in (self.u1, self.u2, self.p, self.rho)):
            raise ValidationError("state components must be finite")

    @property
    def speed(self) -> float:
        return math.hypot(self.u1, self.u2)

    @property
    def angle(self) -> float:
        """Flow direction, radians from the x1 axis."""
        return math.atan2(self.u2, self.u1)

    def rotated(self, angle: float) -> "EulerPrimitive":
        """Rotate the velocity counterclockwise by ``angle``."""
        c, s = math.cos(angle), math.sin(angle)
        return EulerPrimitive(c * self.u1 - s * self.u2, s * self.u1 + c * self.u2, self.p, self.rho)

    def mirrored(self) -> "EulerPrimitive":
        """Reflect across the x1 axis (x2 -> -x2)."""
        return EulerPrimitive(self.u1, -self.u2, self.p, self.rho)

    def as_tuple(self):
        return (self.u1, self.u2, self.p, self.rho)


def state_from_mach(mach, gas=AIR, p=1.0, rho=1.0, angle=0.0) -> EulerPrimitive:
    """Uniform state with Mach number ``mach`` and flow direction ``angle``."""
    q = mach * math.sqrt(gas.gamma * p / rho)
    return EulerPrimitive(q * math.cos(angle), q * math.sin(angle), p, rho)


def sound_speed(s: EulerPrimitive, g: GasModel = AIR) -> float:
    return math.sqrt(g.gamma * s.p / s.rho)


def mach_number(s: EulerPrimitive, g: GasModel = AIR) -> float:
    return s.speed / sound_speed(s, g)


def specific_entropy(s: EulerPrimitive, g: GasModel = AIR) -> float:
    return g.cv * math.log(s.p / (g.kappa * s.rho ** g.gamma))


def pressure_from_entropy(rho, S, g: GasModel = AIR):
    return g.kappa * rho ** g.gamma * math.exp(S / g.cv)


def internal_energy(s: EulerPrimitive, g: GasModel = AIR) -> float:
    return s.p / ((g.gamma - 1.0) * s.rho)


def temperature(s: EulerPrimitive, g: GasModel = AIR) -> float:
    return s.p / (g.R * s.rho)


def total_energy(s: EulerPrimitive, g: GasModel = AIR) -> float:
    return 0.5 * (s.u1 ** 2 + s.u2 ** 2) + internal_energy(s, g)


def total_enthalpy(s: EulerPrimitive, g: GasModel = AIR) -> float:
    return total_energy(s, g) + s.p / s.rho


# -- potential-flow closure -------------------------------------------------

def potential_h(rho, g: GasModel = AIR):
    """Enthalpy head h(rho) of the scaled isentropic closure."""
    gm1 = g.gamma - 1.0
    return (rho ** gm1 - 1.0) / gm1


def potential_c2(rho, g: GasModel = AIR):
    return rho ** (g.gamma - 1.0)


def potential_p(rho, g: GasModel = AIR):
    return rho ** g.gamma / g.gamma


def rho_from_head(q, g: GasModel = AIR):
    """Invert ``h(rho) = q``.

    Works elementwise on arrays.  Raises VacuumError when
    ``1 + (gamma - 1) q <= 0`` anywhere.
    """
    gm1 = g.gamma - 1.0
    base = 1.0 + gm1 * q
    if hasattr(base, "shape") and getattr(base, "shape", ()) != ():
        if not (base > 0).all():
            raise VacuumError("head below vacuum bound -1/(gamma-1)")
    elif not base > 0:
        raise VacuumError(f"head {q} below vacuum bound {-1.0 / gm1}")
    return base ** (1.0 / gm1)


# -- regime classification --------------------------------------------------

class Regime(enum.Enum):
    SUBSONIC = "Subsonic"
    SONIC = "Sonic"
    SUPERSONIC = "Supersonic"


@dataclass(frozen=True)
class FlowRegime:
    tag: Regime
    margin: float


def classify_regime(speed: float, c: float, tol: float = SONIC_TOL) -> FlowRegime:
    """Compare a speed against the local sound speed; ``margin = (|u| - c)/c``."""
    margin = (abs(speed) - c) / c
    if abs(margin) < tol:
        tag = Regime.SONIC
    elif margin > 0:
        tag = Regime.SUPERSONIC
    else:
        tag = Regime.SUBSONIC
    return FlowRegime(tag, margin)


def regime_of(s: EulerPrimitive, g: GasModel = AIR) -> FlowRegime:
    return classify_regime(s.speed, sound_speed(s, g))

"""Rankine-Hugoniot solver and shock polar for a horizontal supersonic stream.

Both the full Euler polar and the steady potential-flow polar are built
here.  The shock angle ``beta`` (measured from the upstream flow) is the
canonical parameter; the front slope ``tan(beta)`` is derived so the normal
shock (slope = inf) needs no special casing.

Conventions: the shock line through the origin has tangent
``t = (cos b, sin b)`` and downstream-pointing normal ``n = (sin b, -cos b)``;
the flow is deflected counterclockwise, as onto the upper face of a wedge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BetaOutOfRange, NoRoot, NotSupersonic, ValidationError
from .roots import bracketed_root, golden_max
from .thermo import (
    AIR,
    EulerPrimitive,
    FlowRegime,
    GasModel,
    classify_regime,
    potential_c2,
    potential_h,
    potential_p,
    rho_from_head,
    sound_speed,
    total_enthalpy,
)

DEGENERATE_TOL = 1e-9
HORIZONTAL_TOL = 1e-12


# -- data types ---------------------------------------------------------------

@dataclass(frozen=True)
class ObliqueShock:
    beta: float
    upstream: EulerPrimitive
    downstream: EulerPrimitive
    deflection: float

    @property
    def slope(self) -> float:
        return math.tan(self.beta) if self.beta < 0.5 * math.pi else math.inf


@dataclass(frozen=True)
class WedgeSolutionPair:
    weak: object
    strong: object
    theta_w: float
    degenerate_at_detachment: bool = False


@dataclass(frozen=True)
class Detached:
    """Returned (not raised) when the wedge angle exceeds detachment."""

    theta_w: float
    theta_d: float

    name = "Detached"


@dataclass(frozen=True)
class CriticalAngles:
    theta_d: float
    theta_s: float
    beta_d: float
    beta_s: float
    u_detach: float


@dataclass(frozen=True)
class PotentialState:
    """Velocity and density of steady potential flow (scaled closure)."""

    u1: float
    u2: float
    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValidationError(f"density must be positive, got {self.rho}")

    @property
    def speed(self) -> float:
        return math.hypot(self.u1, self.u2)

    def c(self, g: GasModel = AIR) -> float:
        return math.sqrt(potential_c2(self.rho, g))

    def p(self, g: GasModel = AIR) -> float:
        return potential_p(self.rho, g)

    def bernoulli(self, g: GasModel = AIR) -> float:
        return 0.5 * (self.u1 ** 2 + self.u2 ** 2) + potential_h(self.rho, g)


@dataclass(frozen=True)
class PotentialShock:
    beta: float
    upstream: PotentialState
    downstream: PotentialState
    deflection: float


@dataclass(frozen=True)
class PolarSample:
    beta: float
    u1: float
    u2: float
    p: float
    rho: float
    mach_downstream: float
    deflection: float
    regime: FlowRegime


@dataclass
class PolarCurve:
    samples: list
    points: dict = field(default_factory=dict)

    CSV_COLUMNS = ("beta_rad", "u1", "u2", "p", "rho", "mach_downstream", "deflection_rad")

    def rows(self):
        for s in self.samples:
            yield (s.beta, s.u1, s.u2, s.p, s.rho, s.mach_downstream, s.deflection)


# -- helpers -----------------------------------------------------------------

def rotate_state(s: EulerPrimitive, angle: float) -> EulerPrimitive:
    """Rotate a state's velocity counterclockwise by ``angle`` radians."""
    return s.rotated(angle)


def _require_horizontal_supersonic(up, c0):
    q = math.hypot(up.u1, up.u2)
    if abs(up.u2) > HORIZONTAL_TOL * max(q, 1.0) or up.u1 <= 0:
        raise ValidationError("upstream state must be horizontal with u1 > 0; rotate into this frame first")
    if up.u1 <= c0:
        raise NotSupersonic(f"upstream Mach {up.u1 / c0} <= 1")
    return up.u1


def mach_angle_of(mach: float) -> float:
    return math.asin(1.0 / mach)


def _split_velocity(ut, un, beta):
    """Velocity with tangential ``ut`` and downstream-normal ``un`` components."""
    sb, cb = math.sin(beta), math.cos(beta)
    return ut * cb + un * sb, ut * sb - un * cb


# -- full Euler ----------------------------------------------------------------

def _fluxes(s: EulerPrimitive, g: GasModel):
    H = total_enthalpy(s, g)
    m1, m2 = s.rho * s.u1, s.rho * s.u2
    F1 = (m1, m1 * s.u1 + s.p, m1 * s.u2, m1 * H)
    F2 = (m2, m2 * s.u1, m2 * s.u2 + s.p, m2 * H)
    return F1, F2


def rh_residual(up: EulerPrimitive, down: EulerPrimitive, slope: float, g: GasModel = AIR):
    """Scaled residuals of the four steady Rankine-Hugoniot conditions.

    ``slope`` is the front slope dx2/dx1 (``inf`` for a vertical front).
    Each component ``slope [F1] - [F2]`` is multiplied by ``cos(beta)`` to
    stay finite and divided by the matching upstream flux magnitude.
    """
    beta = math.atan(slope)
    sb, cb = math.sin(beta), math.cos(beta)
    F1u, F2u = _fluxes(up, g)
    F1d, F2d = _fluxes(down, g)
    q = up.speed
    H = total_enthalpy(up, g)
    scales = (up.rho * q, up.rho * q * q + up.p, up.rho * q * q + up.p, up.rho * q * H)
    res = []
    for k in range(4):
        jump1 = F1d[k] - F1u[k]
        jump2 = F2d[k] - F2u[k]
        res.append((sb * jump1 - cb * jump2) / scales[k])
    return np.array(res)


def _normal_shock_ratios(mn2, gamma):
    """(rho ratio, p ratio) across a shock with upstream normal Mach^2 ``mn2``."""
    rho_ratio = (gamma + 1.0) * mn2 / ((gamma - 1.0) * mn2 + 2.0)
    p_ratio = 1.0 + 2.0 * gamma * (mn2 - 1.0) / (gamma + 1.0)
    return rho_ratio, p_ratio


def deflection_angle(mach: float, beta: float, gamma: float) -> float:
    """Flow turning behind an oblique shock at angle ``beta``."""
    mn2 = (mach * math.sin(beta)) ** 2
    if mn2 <= 1.0:
        return 0.0
    rho_ratio, _ = _normal_shock_ratios(mn2, gamma)
    ut = math.cos(beta)
    un = math.sin(beta) / rho_ratio
    return beta - math.atan2(un, ut)


def downstream_from_beta(up: EulerPrimitive, beta: float, g: GasModel = AIR) -> ObliqueShock:
    c0 = sound_speed(up, g)
    q0 = _require_horizontal_supersonic(up, c0)
    mach = q0 / c0
    mu = mach_angle_of(mach)
    if not (mu - 1e-14 <= beta <= 0.5 * math.pi + 1e-14):
        raise BetaOutOfRange(f"beta={beta} outside [{mu}, pi/2]")
    beta = min(max(beta, mu), 0.5 * math.pi)
    mn2 = (mach * math.sin(beta)) ** 2
    if mn2 <= 1.0:
        return ObliqueShock(beta, up, up, 0.0)
    rho_ratio, p_ratio = _normal_shock_ratios(mn2, g.gamma)
    ut = q0 * math.cos(beta)
    un = q0 * math.sin(beta) / rho_ratio
    u1, u2 = _split_velocity(ut, un, beta)
    down = EulerPrimitive(u1, u2, up.p * p_ratio, up.rho * rho_ratio)
    return ObliqueShock(beta, up, down, math.atan2(u2, u1))


def _euler_polar_funcs(up, g):
    c0 = sound_speed(up, g)
    q0 = _require_horizontal_supersonic(up, c0)
    mach = q0 / c0
    mu = mach_angle_of(mach)

    def deflect(beta):
        return deflection_angle(mach, beta, g.gamma)

    def sonic_margin(beta):
        d = downstream_from_beta(up, beta, g).downstream
        return d.speed - sound_speed(d, g)

    def shock(beta):
        return downstream_from_beta(up, beta, g)

    return mu, deflect, sonic_margin, shock


def _critical(mu, deflect, sonic_margin, to_u1):
    top = 0.5 * math.pi
    beta_d, theta_d = golden_max(deflect, mu, top)
    beta_s = bracketed_root(sonic_margin, mu, top, ftol=1e-9)
    theta_s = deflect(beta_s)
    if not theta_s < theta_d:
        raise NoRoot(f"sonic angle {theta_s} not below detachment angle {theta_d}")
    return CriticalAngles(theta_d, theta_s, beta_d, beta_s, to_u1(beta_d))


def _wedge(mu, deflect, shock, theta_w, crit, ftol=1e-12):
    if theta_w < 0:
        raise ValidationError("theta_w must be non-negative")
    if theta_w == 0.0:
        return WedgeSolutionPair(shock(mu), shock(0.5 * math.pi), 0.0)
    if abs(theta_w - crit.theta_d) < DEGENERATE_TOL:
        s = shock(crit.beta_d)
        return WedgeSolutionPair(s, s, theta_w, degenerate_at_detachment=True)
    if theta_w > crit.theta_d:
        return Detached(theta_w, crit.theta_d)

    def f(beta):
        return deflect(beta) - theta_w

    fd = crit.theta_d - theta_w
    weak = bracketed_root(f, mu, crit.beta_d, fa=-theta_w, fb=fd, ftol=ftol)
    strong = bracketed_root(f, crit.beta_d, 0.5 * math.pi, fa=fd, fb=-theta_w, ftol=ftol)
    return WedgeSolutionPair(shock(weak), shock(strong), theta_w)


def critical_angles(up: EulerPrimitive, g: GasModel = AIR) -> CriticalAngles:
    mu, deflect, sonic_margin, shock = _euler_polar_funcs(up, g)
    return _critical(mu, deflect, sonic_margin, lambda b: shock(b).downstream.u1)


def wedge_solutions(up: EulerPrimitive, theta_w: float, g: GasModel = AIR, crit=None):
    """Weak and strong attached shocks for wedge angle ``theta_w``.

    Returns a WedgeSolutionPair, or a Detached value above detachment.
    """
    mu, deflect, sonic_margin, shock = _euler_polar_funcs(up, g)
    if crit is None:
        crit = _critical(mu, deflect, sonic_margin, lambda b: shock(b).downstream.u1)
    return _wedge(mu, deflect, shock, theta_w, crit)


def polar_curve(up: EulerPrimitive, n: int, g: GasModel = AIR) -> PolarCurve:
    """Sample the shock polar uniformly in beta from the Mach wave to the normal shock.

    ``points`` holds the annotated states: Q (Mach wave), S (sonic),
    T (detachment/tangency), H (normal shock).
    """
    if n < 2:
        raise ValidationError("polar_curve needs n >= 2")
    mu, deflect, sonic_margin, shock = _euler_polar_funcs(up, g)

    def sample(beta):
        sh = shock(beta)
        d = sh.downstream
        c = sound_speed(d, g)
        return PolarSample(beta, d.u1, d.u2, d.p, d.rho, d.speed / c, sh.deflection,
                           classify_regime(d.speed, c))

    betas = np.linspace(mu, 0.5 * math.pi, n)
    samples = [sample(float(b)) for b in betas]
    crit = critical_angles(up, g)
    points = {"Q": samples[0], "S": sample(crit.beta_s), "T": sample(crit.beta_d), "H": samples[-1]}
    return PolarCurve(samples, points)


# -- steady potential flow -----------------------------------------------------------

def potential_rh_residual(up: PotentialState, down: PotentialState, beta: float, g: GasModel = AIR):
    """(mass flux, tangential velocity, Bernoulli) jumps across a front at ``beta``.

    Scaled by rho0*|u0|, |u0| and |u0|^2 respectively.
    """
    sb, cb = math.sin(beta), math.cos(beta)
    q = up.speed
    mass = (sb * (down.rho * down.u1 - up.rho * up.u1) - cb * (down.rho * down.u2 - up.rho * up.u2))
    tang = cb * (down.u1 - up.u1) + sb * (down.u2 - up.u2)
    bern = down.bernoulli(g) - up.bernoulli(g)
    return np.array([mass / (up.rho * q), tang / q, bern / (q * q)])


def _potential_normal_root(B, ut, un, rho0, g):
    """Compressive downstream normal velocity for mass flux ``rho0 * un``."""
    gm1 = g.gamma - 1.0
    head_t = B - 0.5 * ut * ut
    base = 1.0 + gm1 * head_t
    if not base > 0:
        raise NoRoot("tangential velocity alone exhausts the Bernoulli head")
    w_star = math.sqrt(2.0 * base / (g.gamma + 1.0))
    m0 = rho0 * un

    def f(w):
        return rho_from_head(head_t - 0.5 * w * w, g) * w - m0

    f_star = f(w_star)
    if un <= w_star or f_star <= 1e-15 * m0:
        if f_star < -1e-12 * m0:
            raise NoRoot("no compressive root: normal mass flux exceeds the critical flux")
        return un
    return bracketed_root(f, 0.0, w_star, fa=-m0, fb=f_star, ftol=1e-12 * max(m0, 1.0))


def potential_downstream_from_beta(up: PotentialState, beta: float, g: GasModel = AIR) -> PotentialShock:
    q0 = _require_horizontal_supersonic(up, up.c(g))
    mu = mach_angle_of(q0 / up.c(g))
    if not (mu - 1e-14 <= beta <= 0.5 * math.pi + 1e-14):
        raise BetaOutOfRange(f"beta={beta} outside [{mu}, pi/2]")
    beta = min(max(beta, mu), 0.5 * math.pi)
    B = up.bernoulli(g)
    ut = q0 * math.cos(beta)
    un = q0 * math.sin(beta)
    w = _potential_normal_root(B, ut, un, up.rho, g)
    if w >= un:
        return PotentialShock(beta, up, up, 0.0)
    rho = up.rho * un / w
    u1, u2 = _split_velocity(ut, w, beta)
    down = PotentialState(u1, u2, rho)
    return PotentialShock(beta, up, down, math.atan2(u2, u1))


def _potential_polar_funcs(up, g):
    c0 = up.c(g)
    q0 = _require_horizontal_supersonic(up, c0)
    mu = mach_angle_of(q0 / c0)

    def shock(beta):
        return potential_downstream_from_beta(up, beta, g)

    def deflect(beta):
        return shock(beta).deflection

    def sonic_margin(beta):
        d = shock(beta).downstream
        return d.speed - d.c(g)

    return mu, deflect, sonic_margin, shock


def potential_critical_angles(up: PotentialState, g: GasModel = AIR) -> CriticalAngles:
    mu, deflect, sonic_margin, shock = _potential_polar_funcs(up, g)
    return _critical(mu, deflect, sonic_margin, lambda b: shock(b).downstream.u1)


def potential_wedge_solutions(up: PotentialState, theta_w: float, g: GasModel = AIR, crit=None):
    """Potential-flow analogue of :func:`wedge_solutions`.

    Near the Mach angle the normal-velocity root sits beside the sonic
    point of the mass flux (a near double root), so the computed deflection
    carries roundoff of order 1e-10 there; the angle residual tolerance is
    set accordingly.
    """
    mu, deflect, sonic_margin, shock = _potential_polar_funcs(up, g)
    if crit is None:
        crit = _critical(mu, deflect, sonic_margin, lambda b: shock(b).downstream.u1)
    return _wedge(mu, deflect, shock, theta_w, crit, ftol=1e-10)

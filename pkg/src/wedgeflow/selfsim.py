"""Constant-state skeleton of the self-similar Prandtl-Meyer configuration.

Self-similar potential flow past a wedge is described by a pseudo-potential
``phi(xi)`` on ``Lambda = {xi2 > 0} minus {xi2 <= xi1 tan(theta_w), xi1 >= 0}``,
with density

    rho = (B0 - (gamma - 1)(|D phi|^2 / 2 + phi))^(1/(gamma - 1)),
    B0  = (gamma - 1) B + 1,   B = u10^2/2 + h(rho0).

For an affine-quadratic potential ``phi = -|xi|^2/2 + v.xi + k`` the
combination ``|D phi|^2/2 + phi`` equals ``|v|^2/2 + k`` everywhere, so
every such state has constant density.  The skeleton assembles the three
known constant states: the incoming flow (0), the weak state behind the
attached straight shock S0 (1), and the state behind the normal shock S1
that is parallel to the wedge wall (2).  The curved shock joining S0 to S1
and the flow under it are not computed; points there evaluate to
:class:`InUnknownRegion`.

Frame: the incoming velocity is ``(u10, 0)`` and the wedge wall is the ray
at angle ``theta_w`` from the origin.  ``t`` is the unit wall tangent and
``n`` the unit normal pointing into the flow.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DetachedError, NoRoot, OutOfDomain, ValidationError, VacuumError
from .polar import Detached, PotentialState, potential_critical_angles, potential_wedge_solutions
from .thermo import AIR, FlowRegime, GasModel, Regime, classify_regime, potential_h

GEOM_TOL = 1e-12


@dataclass(frozen=True)
class PseudoPotentialAffine:
    """``phi(xi) = -|xi|^2/2 + v.xi + k``."""

    v: tuple
    k: float = 0.0

    def value(self, xi):
        xi = np.asarray(xi, dtype=float)
        v = np.asarray(self.v)
        return -0.5 * np.sum(xi * xi, axis=-1) + xi @ v + self.k

    def grad(self, xi):
        return np.asarray(self.v) - np.asarray(xi, dtype=float)

    @property
    def head(self) -> float:
        """``|D phi|^2/2 + phi``, which is the same at every point."""
        return 0.5 * (self.v[0] ** 2 + self.v[1] ** 2) + self.k


def bernoulli_b0(u10: float, rho0: float, g: GasModel = AIR) -> float:
    B = 0.5 * u10 * u10 + potential_h(rho0, g)
    return (g.gamma - 1.0) * B + 1.0


def pseudo_c2(phi: PseudoPotentialAffine, g: GasModel, B0: float) -> float:
    base = B0 - (g.gamma - 1.0) * phi.head
    if not base > 0:
        raise VacuumError(f"B0 - (gamma-1) head = {base} <= 0")
    return base


def pseudo_density(phi: PseudoPotentialAffine, g: GasModel, B0: float) -> float:
    return pseudo_c2(phi, g, B0) ** (1.0 / (g.gamma - 1.0))


def density_field(phi: PseudoPotentialAffine, xi, g: GasModel, B0: float):
    """Density evaluated pointwise from ``|D phi|^2`` and ``phi`` (no shortcut)."""
    d = phi.grad(xi)
    base = B0 - (g.gamma - 1.0) * (0.5 * np.sum(d * d, axis=-1) + phi.value(xi))
    if np.any(base <= 0):
        raise VacuumError("vacuum in density field")
    return base ** (1.0 / (g.gamma - 1.0))


def is_elliptic_at(phi: PseudoPotentialAffine, xi, g: GasModel, B0: float) -> FlowRegime:
    """Subsonic tag means elliptic: ``|v - xi| < c``."""
    c = math.sqrt(pseudo_c2(phi, g, B0))
    d = phi.grad(xi)
    return classify_regime(float(math.hypot(d[0], d[1])), c)


# -- normal shock parallel to the wall --------------------------------------------------

@dataclass(frozen=True)
class NormalShock:
    """State 2 and the line ``S1 = {xi . n = s1}``."""

    u2: tuple
    k2: float
    s1: float
    rho2: float
    residuals: tuple
    iterations: int


def _wall_frame(theta_w):
    t = np.array([math.cos(theta_w), math.sin(theta_w)])
    n = np.array([-math.sin(theta_w), math.cos(theta_w)])
    return t, n


def solve_normal_shock(g: GasModel, u10: float, rho0: float, theta_w: float,
                       tol: float = 1e-13, maxiter: int = 50) -> NormalShock:
    """Reflected normal shock from the wall-normal part of the incoming flow.

    Unknowns ``(rho2, k2, s1)`` with ``u2 = u10 cos(theta_w) t``:

    * ``[phi] = 0`` on S1:           ``k2 + u10 sin(theta_w) s1 = 0``
    * mass flux across S1:          ``rho2 s1 - rho0 (s1 + u10 sin(theta_w)) = 0``
    * density law for ``phi2``:     ``rho2^(g-1) - B0 + (g-1)(|u2|^2/2 + k2) = 0``

    Newton from the acoustic guess ``s1 = c0``.  Raises NoRoot when it
    does not converge.
    """
    if not (u10 > 0 and rho0 > 0):
        raise ValidationError("u10 and rho0 must be positive")
    if not 0.0 <= theta_w < 0.5 * math.pi:
        raise ValidationError("theta_w must lie in [0, pi/2)")
    gm1 = g.gamma - 1.0
    B0 = bernoulli_b0(u10, rho0, g)
    t, _ = _wall_frame(theta_w)
    q2 = u10 * math.cos(theta_w)
    w = u10 * math.sin(theta_w)
    c0 = rho0 ** (0.5 * gm1)

    def F(x):
        r2, k2, s1 = x
        return np.array([
            k2 + w * s1,
            r2 * s1 - rho0 * (s1 + w),
            r2 ** gm1 - B0 + gm1 * (0.5 * q2 * q2 + k2),
        ])

    def J(x):
        r2, k2, s1 = x
        return np.array([
            [0.0, 1.0, w],
            [s1, 0.0, r2 - rho0],
            [gm1 * r2 ** (gm1 - 1.0), gm1, 0.0],
        ])

    x = np.array([rho0, -w * c0, c0])
    scale = np.array([max(w * c0, 1e-300) + c0, rho0 * c0, c0 * c0])
    for it in range(1, maxiter + 1):
        r = F(x)
        if np.all(np.abs(r) <= tol * scale):
            break
        try:
            dx = np.linalg.solve(J(x), -r)
        except np.linalg.LinAlgError as exc:
            raise NoRoot(f"singular Jacobian at {x}") from exc
        lam = 1.0
        while x[0] + lam * dx[0] <= 0 or x[2] + lam * dx[2] <= 0:
            lam *= 0.5
            if lam < 1e-10:
                raise NoRoot("Newton step leaves rho2 > 0, s1 > 0")
        x = x + lam * dx
    else:
        raise NoRoot(f"normal-shock Newton did not converge: residual {F(x)}")
    r2, k2, s1 = (float(v) for v in x)
    res = F(x)
    if w > 0 and not r2 > rho0:
        raise NoRoot("converged to a non-compressive root")
    u2 = tuple(float(v) for v in q2 * t)
    return NormalShock(u2, k2, s1, r2, tuple(float(v) for v in res), it)


# -- skeleton --------------------------------------------------------------------------

class Branch(enum.Enum):
    SUPERSONIC_VERTEX = "SupersonicVertex"
    SUBSONIC_VERTEX = "SubsonicVertex"


@dataclass(frozen=True)
class Circle:
    center: tuple
    radius: float


@dataclass(frozen=True)
class SelfSimilarSkeleton:
    gas: GasModel
    u0: tuple
    rho0: float
    B0: float
    theta_w: float
    phi0: PseudoPotentialAffine
    phi1: PseudoPotentialAffine
    phi2: PseudoPotentialAffine
    rho1: float
    rho2: float
    beta: float
    s1_position: float
    e_s0: tuple
    e_s1: tuple
    normal: tuple
    sonic_circles: tuple
    branch: Branch
    theta_s: float
    theta_d: float
    points: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "gamma": self.gas.gamma,
            "u0": list(self.u0),
            "rho0": self.rho0,
            "B0": self.B0,
            "theta_w_rad": self.theta_w,
            "branch": self.branch.value,
            "theta_s_rad": self.theta_s,
            "theta_d_rad": self.theta_d,
            "states": {
                name: {"v": list(p.v), "k": p.k, "rho": r}
                for name, p, r in (("0", self.phi0, self.rho0), ("1", self.phi1, self.rho1),
                                   ("2", self.phi2, self.rho2))
            },
            "s0": {"angle_rad": self.beta, "direction": list(self.e_s0)},
            "s1": {"position": self.s1_position, "direction": list(self.e_s1), "normal": list(self.normal)},
            "sonic_circles": [{"center": list(c.center), "radius": c.radius} for c in self.sonic_circles],
            "points": {k: list(v) for k, v in self.points.items()},
        }


def build_skeleton(g: GasModel, u10: float, rho0: float, theta_w: float) -> SelfSimilarSkeleton:
    """Assemble states 0, 1, 2, the straight shocks and the sonic circles."""
    if not theta_w > 0:
        raise ValidationError("theta_w must be positive")
    up = PotentialState(u10, 0.0, rho0)
    crit = potential_critical_angles(up, g)
    if theta_w >= crit.theta_d:
        raise DetachedError(f"theta_w={theta_w} >= detachment angle {crit.theta_d}")
    sol = potential_wedge_solutions(up, theta_w, g, crit)
    if isinstance(sol, Detached):
        raise DetachedError(f"theta_w={theta_w} >= detachment angle {crit.theta_d}")
    weak = sol.weak
    gm1 = g.gamma - 1.0
    B0 = bernoulli_b0(u10, rho0, g)
    u1 = (weak.downstream.u1, weak.downstream.u2)
    phi0 = PseudoPotentialAffine((u10, 0.0), 0.0)
    phi1 = PseudoPotentialAffine(u1, 0.0)
    rho1 = (rho0 ** gm1 + 0.5 * gm1 * (u10 * u10 - (u1[0] ** 2 + u1[1] ** 2))) ** (1.0 / gm1)
    ns = solve_normal_shock(g, u10, rho0, theta_w)
    phi2 = PseudoPotentialAffine(ns.u2, ns.k2)
    t, n = _wall_frame(theta_w)
    e_s0 = (math.cos(weak.beta), math.sin(weak.beta))
    c0 = rho0 ** (0.5 * gm1)
    c1 = math.sqrt(pseudo_c2(phi1, g, B0))
    c2 = math.sqrt(pseudo_c2(phi2, g, B0))
    circles = (Circle((u10, 0.0), c0), Circle(u1, c1), Circle(ns.u2, c2))
    branch = Branch.SUPERSONIC_VERTEX if theta_w < crit.theta_s else Branch.SUBSONIC_VERTEX
    q1 = math.hypot(*u1)
    q2 = math.hypot(*ns.u2)
    points = {"O": (0.0, 0.0)}
    if branch is Branch.SUPERSONIC_VERTEX:
        e = np.array(e_s0)
        eu = float(e @ np.array(u1))
        disc = eu * eu - q1 * q1 + c1 * c1
        if disc >= 0:
            r = eu - math.sqrt(disc)
            points["P1"] = tuple(float(v) for v in r * e)
        points["P4"] = tuple(float(v) for v in (q1 - c1) * t)
    if ns.s1 < c2:
        p2 = np.array(ns.u2) + math.sqrt(c2 * c2 - ns.s1 ** 2) * t + ns.s1 * n
        points["P2"] = tuple(float(v) for v in p2)
    points["P3"] = tuple(float(v) for v in np.array(ns.u2) + c2 * t)
    return SelfSimilarSkeleton(
        gas=g, u0=(u10, 0.0), rho0=rho0, B0=B0, theta_w=theta_w,
        phi0=phi0, phi1=phi1, phi2=phi2, rho1=rho1, rho2=ns.rho2,
        beta=weak.beta, s1_position=ns.s1, e_s0=e_s0, e_s1=tuple(float(v) for v in t),
        normal=tuple(float(v) for v in n), sonic_circles=circles, branch=branch,
        theta_s=crit.theta_s, theta_d=crit.theta_d, points=points,
    )


# -- region evaluation --------------------------------------------------------------------

@dataclass(frozen=True)
class InUnknownRegion:
    """Returned for points under the (uncomputed) curved shock."""

    xi: tuple
    name = "InUnknownRegion"


@dataclass(frozen=True)
class PhiValue:
    value: float
    gradient: tuple
    region: str


def _scale(sk):
    return max(abs(sk.u0[0]), sk.sonic_circles[0].radius)


def in_state0(sk, xi) -> bool:
    """Above the S0 line or above the S1 line (the shock curve lies below both)."""
    xi = np.asarray(xi, dtype=float)
    tol = GEOM_TOL * _scale(sk)
    e = np.asarray(sk.e_s0)
    above_s0 = e[0] * xi[1] - e[1] * xi[0] > tol
    above_s1 = float(xi @ np.asarray(sk.normal)) > sk.s1_position + tol
    return bool(above_s0 or above_s1)


def in_omega1(sk, xi) -> bool:
    """Between the wall and S0, nearer to O than the state-1 sonic circle."""
    if sk.branch is not Branch.SUPERSONIC_VERTEX:
        return False
    xi = np.asarray(xi, dtype=float)
    tol = GEOM_TOL * _scale(sk)
    r = math.hypot(xi[0], xi[1])
    if r == 0.0:
        return True
    ang = math.atan2(xi[1], xi[0])
    if not (sk.theta_w - GEOM_TOL <= ang <= sk.beta + GEOM_TOL):
        return False
    e = xi / r
    u1 = np.asarray(sk.phi1.v)
    c1 = sk.sonic_circles[1].radius
    eu = float(e @ u1)
    disc = eu * eu - float(u1 @ u1) + c1 * c1
    if disc < 0:
        return True
    return r < eu - math.sqrt(disc) - tol


def in_omega2(sk, xi) -> bool:
    """Strip between the wall and S1, beyond the state-2 sonic circle."""
    xi = np.asarray(xi, dtype=float)
    tol = GEOM_TOL * _scale(sk)
    t, n = np.asarray(sk.e_s1), np.asarray(sk.normal)
    a, b = float(xi @ t), float(xi @ n)
    if not (-tol <= b < sk.s1_position - tol):
        return False
    c2 = sk.sonic_circles[2].radius
    q2 = float(np.asarray(sk.phi2.v) @ t)
    return a > q2 + math.sqrt(max(c2 * c2 - b * b, 0.0)) + tol


def in_domain(sk, xi) -> bool:
    xi = np.asarray(xi, dtype=float)
    if xi[1] < 0:
        return False
    if xi[0] >= 0 and xi[1] < xi[0] * math.tan(sk.theta_w) - GEOM_TOL * _scale(sk):
        return False
    return True


def phi_star_eval(sk: SelfSimilarSkeleton, xi):
    """Piecewise pseudo-potential on the known regions.

    Returns PhiValue or InUnknownRegion; raises OutOfDomain inside the wedge
    or below the symmetry axis.
    """
    xi = np.asarray(xi, dtype=float)
    if not in_domain(sk, xi):
        raise OutOfDomain(f"point {tuple(xi)} lies outside Lambda")
    for tag, test, phi in (("0", in_state0, sk.phi0), ("1", in_omega1, sk.phi1), ("2", in_omega2, sk.phi2)):
        if test(sk, xi):
            return PhiValue(float(phi.value(xi)), tuple(float(v) for v in phi.grad(xi)), tag)
    return InUnknownRegion(tuple(float(v) for v in xi))


# -- verification ----------------------------------------------------------------------

@dataclass
class SkeletonReport:
    rh_s0: float
    rh_s1: float
    jump_s0: float
    jump_s1: float
    rho1_law: float
    eq_residual: dict
    head_spread: float
    entropy_ok: bool
    ellipticity: dict
    monotonicity: dict
    branch_consistent: bool
    flags: dict

    @property
    def passed(self) -> bool:
        return all(self.flags.values())


def _mass_flux(phi, rho, xi, nu):
    return rho * (phi.grad(xi) @ nu)


def eq_residual(phi: PseudoPotentialAffine, xi, g: GasModel, B0: float, h: float = 0.25) -> float:
    """``div(rho D phi) + 2 rho`` by central differences, relative to rho.

    For a constant state the flux is linear in ``xi``, so central
    differences are exact for any ``h``; a wide step keeps roundoff small.
    """
    xi = np.asarray(xi, dtype=float)
    div = 0.0
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        pts = np.stack([xi + e, xi - e])
        flux = density_field(phi, pts, g, B0)[:, None] * phi.grad(pts)
        div += (flux[0, k] - flux[1, k]) / (2 * h)
    rho = float(density_field(phi, xi[None, :], g, B0)[0])
    return abs(div + 2.0 * rho) / rho


def verify_skeleton(sk: SelfSimilarSkeleton, nsamples: int = 16, tol_rh: float = 1e-10,
                    tol_eq: float = 1e-12) -> SkeletonReport:
    g, B0 = sk.gas, sk.B0
    gm1 = g.gamma - 1.0
    rho0 = pseudo_density(sk.phi0, g, B0)
    rho1 = pseudo_density(sk.phi1, g, B0)
    rho2 = pseudo_density(sk.phi2, g, B0)
    scale = _scale(sk)
    flux0 = rho0 * scale
    # S0: points along the line through O; normal pointing to the upstream side
    e0 = np.asarray(sk.e_s0)
    nu0 = np.array([-e0[1], e0[0]])
    L0 = max(float(np.linalg.norm(sk.points.get("P1", (scale, 0.0)))), scale)
    s = np.linspace(0.0, L0, nsamples)
    pts0 = s[:, None] * e0
    rh0 = max(abs(_mass_flux(sk.phi0, rho0, p, nu0) - _mass_flux(sk.phi1, rho1, p, nu0)) for p in pts0) / flux0
    j0 = max(abs(float(sk.phi0.value(p) - sk.phi1.value(p))) for p in pts0) / (scale * L0)
    # S1
    t, n = np.asarray(sk.e_s1), np.asarray(sk.normal)
    a = np.linspace(0.0, 4.0 * scale, nsamples) + float(np.asarray(sk.phi2.v) @ t)
    pts1 = a[:, None] * t + sk.s1_position * n
    rh1 = max(abs(_mass_flux(sk.phi0, rho0, p, n) - _mass_flux(sk.phi2, rho2, p, n)) for p in pts1) / flux0
    L1 = float(np.max(np.linalg.norm(pts1, axis=1)))
    j1 = max(abs(float(sk.phi0.value(p) - sk.phi2.value(p))) for p in pts1) / (scale * L1)
    # density law for state 1
    q1sq = sk.phi1.v[0] ** 2 + sk.phi1.v[1] ** 2
    law = (sk.rho0 ** gm1 + 0.5 * gm1 * (sk.u0[0] ** 2 - q1sq)) ** (1.0 / gm1)
    rho1_law = abs(sk.rho1 - law) / law
    # equation residual and spatial constancy of the head at sampled points
    rng = np.random.default_rng(0)
    samp = rng.uniform(-2.0 * scale, 2.0 * scale, size=(nsamples, 2))
    eqr, spread = {}, 0.0
    for tag, phi in (("0", sk.phi0), ("1", sk.phi1), ("2", sk.phi2)):
        eqr[tag] = max(eq_residual(phi, p, g, B0) for p in samp)
        d = phi.grad(samp)
        head = 0.5 * np.sum(d * d, axis=-1) + phi.value(samp)
        spread = max(spread, float(np.max(np.abs(head - phi.head))) / max(abs(phi.head), 1.0))
    entropy_ok = bool(rho1 > rho0 and rho2 > rho0)
    # type of each constant state at characteristic points
    ell = {
        "1@center": is_elliptic_at(sk.phi1, sk.phi1.v, g, B0).tag.value,
        "1@O": is_elliptic_at(sk.phi1, (0.0, 0.0), g, B0).tag.value,
        "2@center": is_elliptic_at(sk.phi2, sk.phi2.v, g, B0).tag.value,
        "2@S1": is_elliptic_at(sk.phi2, tuple(pts1[0]), g, B0).tag.value,
        "0@O": is_elliptic_at(sk.phi0, (0.0, 0.0), g, B0).tag.value,
    }
    expected_o = Regime.SUPERSONIC if sk.branch is Branch.SUPERSONIC_VERTEX else Regime.SUBSONIC
    branch_consistent = ell["1@O"] == expected_o.value
    mono = {
        "D(phi0-phi1).e_s0": float((np.asarray(sk.phi0.v) - np.asarray(sk.phi1.v)) @ e0),
        "D(phi0-phi2).e_s1": float((np.asarray(sk.phi0.v) - np.asarray(sk.phi2.v)) @ t),
    }
    flags = {
        "rh_s0": rh0 < tol_rh,
        "rh_s1": rh1 < tol_rh,
        "jump_s0": j0 < tol_rh,
        "jump_s1": j1 < tol_rh,
        "rho1_law": rho1_law < 1e-12,
        "equation": all(v < tol_eq for v in eqr.values()),
        "head_constant": spread < 1e-13,
        "entropy": entropy_ok,
        "s1_pseudo_subsonic": ell["2@S1"] == Regime.SUBSONIC.value,
        "branch": branch_consistent,
    }
    return SkeletonReport(rh0, rh1, j0, j1, rho1_law, eqr, spread, entropy_ok, ell, mono,
                          branch_consistent, flags)


def corrupt(sk: SelfSimilarSkeleton, dk2: float) -> SelfSimilarSkeleton:
    """Copy of ``sk`` with ``k2`` shifted (fault injection for tests)."""
    return replace(sk, phi2=PseudoPotentialAffine(sk.phi2.v, sk.phi2.k + dk2))


def geometry_rows(sk: SelfSimilarSkeleton, n: int = 64):
    """(curve, xi1, xi2) samples of S0, S1 and the sonic arcs for plotting."""
    rows = []
    L = 2.0 * _scale(sk)
    e0 = np.asarray(sk.e_s0)
    end = np.linalg.norm(sk.points["P1"]) if "P1" in sk.points else 0.25 * L
    for s in np.linspace(0.0, end, n):
        rows.append(("S0", *(s * e0)))
    t, n_ = np.asarray(sk.e_s1), np.asarray(sk.normal)
    a0 = float(np.asarray(sk.points.get("P2", sk.phi2.v)) @ t)
    for a in np.linspace(a0, a0 + L, n):
        p = a * t + sk.s1_position * n_
        rows.append(("S1", float(p[0]), float(p[1])))
    for name, circ in (("sonic0", sk.sonic_circles[0]), ("sonic1", sk.sonic_circles[1]), ("sonic2", sk.sonic_circles[2])):
        for ang in np.linspace(0.0, 2 * math.pi, n):
            x = circ.center[0] + circ.radius * math.cos(ang)
            y = circ.center[1] + circ.radius * math.sin(ang)
            rows.append((name, x, y))
    return [(c, float(x), float(y)) for c, x, y in rows]

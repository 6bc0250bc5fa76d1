"""Elementary waves of steady 2-D supersonic Euler flow marching in x1.

Family labels are fixed: the 1-family travels along the lower acoustic
characteristic (slope ``lambda-``), the 3-family along the upper one, and
the slip line (contact) along the streamline.  A 3-wave sees its upstream
state above it; a 1-wave sees its upstream state below it.

Everything below the public scalar API works on numpy arrays of states in
(speed q, flow angle th, p, rho) form, so the Glimm march can solve all
interface problems of one x1-slice in a single call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AxiallySubsonic, DetachedError, NoIntersection, VacuumError
from .thermo import AIR, EulerPrimitive, GasModel

NULL_TOL = 1e-12
P_TOL = 1e-13


@dataclass(frozen=True)
class CharSpeeds:
    lambda_minus: float
    lambda_0: float
    lambda_plus: float


def char_speeds(s: EulerPrimitive, g: GasModel = AIR) -> CharSpeeds:
    c2 = g.gamma * s.p / s.rho
    c = math.sqrt(c2)
    if not s.u1 > c:
        raise AxiallySubsonic(f"u1={s.u1} <= c={c}")
    den = s.u1 ** 2 - c2
    root = c * math.sqrt(s.u1 ** 2 + s.u2 ** 2 - c2)
    return CharSpeeds((s.u1 * s.u2 - root) / den, s.u2 / s.u1, (s.u1 * s.u2 + root) / den)


# -- array kernels -----------------------------------------------------------------

def prandtl_meyer(M, gamma):
    """Prandtl-Meyer function nu(M) for M >= 1."""
    a = math.sqrt((gamma + 1.0) / (gamma - 1.0))
    m2 = np.maximum(np.asarray(M, dtype=float) ** 2 - 1.0, 0.0)
    return a * np.arctan(np.sqrt(m2) / a) - np.arctan(np.sqrt(m2))


def nu_max(gamma):
    return 0.5 * math.pi * (math.sqrt((gamma + 1.0) / (gamma - 1.0)) - 1.0)


def detachment_beta(M, gamma):
    """Shock angle of maximum deflection (closed form)."""
    M2 = M * M
    gp = gamma + 1.0
    s2 = (gp * M2 / 4.0 - 1.0 + np.sqrt(gp * (1.0 + 0.5 * (gamma - 1.0) * M2 + gp * M2 * M2 / 16.0))) / (gamma * M2)
    return np.arcsin(np.sqrt(np.minimum(s2, 1.0)))


def _shock_pressure_ratio(M, beta, gamma):
    mn2 = (M * np.sin(beta)) ** 2
    return 1.0 + 2.0 * gamma * (mn2 - 1.0) / (gamma + 1.0)


def wave_turning(q, rho, p, p_star, gamma):
    """Turning and downstream state along a wave curve, elementwise.

    Returns (delta, q_star, rho_star, beta).  ``delta`` is positive on the
    shock branch (``p_star > p``) and negative on the simple-wave branch;
    the caller attaches the family sign.  ``beta`` is the shock angle
    relative to the upstream flow (nan on the simple-wave branch).
    """
    q, rho, p, p_star = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (q, rho, p, p_star)))
    c = np.sqrt(gamma * p / rho)
    M = q / c
    pr = p_star / p
    shock = pr > 1.0
    gm1 = gamma - 1.0
    # shock branch
    mn2 = 1.0 + (gamma + 1.0) / (2.0 * gamma) * (np.where(shock, pr, 1.0) - 1.0)
    sb = np.minimum(np.sqrt(mn2) / M, 1.0)
    beta = np.arcsin(sb)
    cb = np.sqrt(1.0 - sb * sb)
    r = (gamma + 1.0) * mn2 / (gm1 * mn2 + 2.0)
    d_shock = beta - np.arctan2(sb / r, cb)
    q_shock = q * np.sqrt(cb * cb + (sb / r) ** 2)
    rho_shock = rho * r
    # simple-wave branch
    prs = np.where(shock, 1.0, pr)
    X = (1.0 + 0.5 * gm1 * M * M) * prs ** (-gm1 / gamma)
    Ms = np.sqrt(np.maximum(2.0 * (X - 1.0) / gm1, 1.0))
    d_simple = prandtl_meyer(M, gamma) - prandtl_meyer(Ms, gamma)
    rho_simple = rho * prs ** (1.0 / gamma)
    q_simple = Ms * np.sqrt(gamma * p * prs / rho_simple)
    delta = np.where(shock, d_shock, d_simple)
    return (delta, np.where(shock, q_shock, q_simple), np.where(shock, rho_shock, rho_simple),
            np.where(shock, beta, np.nan))


def _to_qth(u1, u2):
    return np.hypot(u1, u2), np.arctan2(u2, u1)


def _check_axial(q, th, p, rho, gamma, what):
    bad = ~(q * np.cos(th) > np.sqrt(gamma * p / rho))
    if np.any(bad):
        idx = int(np.flatnonzero(bad)[0])
        raise AxiallySubsonic(f"{what} state {idx} is not axially supersonic", slice_index=None)


class Fans:
    """Solutions of N steady Riemann problems, stored as arrays.

    State tuples are (q, th, p, rho).  ``mb``/``ma`` are the middle states
    below/above the slip line.
    """

    def __init__(self, below, above, mb, ma, p_star, gamma):
        self.below, self.above, self.mb, self.ma = below, above, mb, ma
        self.p_star = p_star
        self.gamma = gamma
        g = gamma
        qb, thb, pb, rb = below
        qa, tha, pa, ra = above
        self.kind1 = np.where(p_star > pb * (1 + NULL_TOL), 1, np.where(p_star < pb * (1 - NULL_TOL), -1, 0))
        self.kind3 = np.where(p_star > pa * (1 + NULL_TOL), 1, np.where(p_star < pa * (1 - NULL_TOL), -1, 0))
        Mb = qb / np.sqrt(g * pb / rb)
        Ma = qa / np.sqrt(g * pa / ra)
        Mmb = mb[0] / np.sqrt(g * mb[2] / mb[3])
        Mma = ma[0] / np.sqrt(g * ma[2] / ma[3])
        self.M = (Mb, Ma, Mmb, Mma)
        # 1-wave: shock angle thb - beta, or fan [thb - mu_b, th* - mu_mb]
        beta1 = np.arcsin(np.minimum(np.sqrt(np.maximum(
            1.0 + (g + 1.0) / (2.0 * g) * (p_star / pb - 1.0), 1.0)) / Mb, 1.0))
        beta3 = np.arcsin(np.minimum(np.sqrt(np.maximum(
            1.0 + (g + 1.0) / (2.0 * g) * (p_star / pa - 1.0), 1.0)) / Ma, 1.0))
        mu = lambda m: np.arcsin(1.0 / m)
        lo1 = np.where(self.kind1 == 1, thb - beta1, thb - mu(Mb))
        hi1 = np.where(self.kind1 == 1, thb - beta1, mb[1] - mu(Mmb))
        lo3 = np.where(self.kind3 == 1, tha + beta3, ma[1] + mu(Mma))
        hi3 = np.where(self.kind3 == 1, tha + beta3, tha + mu(Ma))
        self.angles1 = (lo1, hi1)
        self.angles3 = (lo3, hi3)
        self.contact = mb[1]
        self.contact_null = (mb[3] == ma[3]) & (mb[0] == ma[0])

    def __len__(self):
        return len(self.p_star)

    def max_angle(self):
        """Largest wave angle present in each fan (for front interaction)."""
        return np.where(self.kind3 != 0, self.angles3[1],
                        np.where(self.contact_null, np.where(self.kind1 != 0, self.angles1[1], -np.inf),
                                 self.contact))

    def min_angle(self):
        return np.where(self.kind1 != 0, self.angles1[0],
                        np.where(self.contact_null, np.where(self.kind3 != 0, self.angles3[0], np.inf),
                                 self.contact))

    def sample(self, alpha, idx=None):
        """States (q, th, p, rho) at direction angle ``alpha`` in fans ``idx``."""
        if idx is None:
            idx = np.arange(len(self))
        alpha = np.asarray(alpha, dtype=float)
        g = self.gamma
        pick = lambda tup: tuple(a[idx] for a in tup)
        below, above, mb, ma = pick(self.below), pick(self.above), pick(self.mb), pick(self.ma)
        lo1, hi1 = self.angles1[0][idx], self.angles1[1][idx]
        lo3, hi3 = self.angles3[0][idx], self.angles3[1][idx]
        k1, k3 = self.kind1[idx], self.kind3[idx]
        contact = self.contact[idx]
        out = [np.array(a, dtype=float, copy=True) for a in above]
        # assign from the top region downward; later assignments win
        regions = [
            (alpha < lo3, ma),
            (alpha < contact, mb),
            (alpha < lo1, below),
        ]
        if np.any(k3 == 0):
            regions[0] = ((alpha < lo3) | (k3 == 0) & (alpha < hi3), ma)
        for mask, st in regions:
            for comp in range(4):
                out[comp] = np.where(mask, st[comp], out[comp])
        # the null-contact case: mb == ma so the contact test is harmless
        fan1 = (k1 == -1) & (alpha >= lo1) & (alpha < hi1)
        fan3 = (k3 == -1) & (alpha > lo3) & (alpha < hi3)
        if np.any(fan1):
            sel = np.flatnonzero(fan1)
            st = _fan_state(below, sel, alpha[sel] if alpha.ndim else alpha, family=1, gamma=g)
            for comp in range(4):
                out[comp][sel] = st[comp]
        if np.any(fan3):
            sel = np.flatnonzero(fan3)
            st = _fan_state(above, sel, alpha[sel] if alpha.ndim else alpha, family=3, gamma=g)
            for comp in range(4):
                out[comp][sel] = st[comp]
        return tuple(out)


def _fan_state(base, sel, alpha, family, gamma):
    """State inside a centred simple wave at characteristic angle ``alpha``."""
    q, th, p, rho = (a[sel] for a in base)
    c = np.sqrt(gamma * p / rho)
    M0 = q / c
    nu0 = prandtl_meyer(M0, gamma)
    # nu(M) - mu(M) is increasing in M
    if family == 1:
        target = nu0 + (alpha - th)
    else:
        target = nu0 + (th - alpha)
    lo = np.maximum(M0, 1.0)
    hi = np.full_like(lo, 1e3)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        val = prandtl_meyer(mid, gamma) - np.arcsin(1.0 / mid)
        up = val < target
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    M = 0.5 * (lo + hi)
    mu = np.arcsin(1.0 / M)
    ths = alpha + mu if family == 1 else alpha - mu
    gm1 = gamma - 1.0
    ratio = ((1.0 + 0.5 * gm1 * M0 * M0) / (1.0 + 0.5 * gm1 * M * M)) ** (gamma / gm1)
    ps = p * ratio
    rs = rho * ratio ** (1.0 / gamma)
    return M * np.sqrt(gamma * ps / rs), ths, ps, rs


def _residual(p_star, below, above, gamma):
    qb, thb, pb, rb = below
    qa, tha, pa, ra = above
    da = wave_turning(qa, ra, pa, p_star, gamma)[0]
    db = wave_turning(qb, rb, pb, p_star, gamma)[0]
    return da + db - (thb - tha)


def solve_riemann_arrays(below, above, gamma, check=True):
    """Vectorised steady Riemann solver; returns a Fans instance.

    ``below``/``above`` are (q, th, p, rho) arrays.  The middle pressure is
    found by safeguarded Newton on the single equation
    ``turn_3(p) + turn_1(p) = th_below - th_above``; the middle angle follows.
    """
    below = tuple(np.asarray(a, dtype=float) for a in below)
    above = tuple(np.asarray(a, dtype=float) for a in above)
    qb, thb, pb, rb = below
    qa, tha, pa, ra = above
    if check:
        _check_axial(*below, gamma, "below")
        _check_axial(*above, gamma, "above")
    Mb = qb / np.sqrt(gamma * pb / rb)
    Ma = qa / np.sqrt(gamma * pa / ra)
    same = (qb == qa) & (thb == tha) & (pb == pa) & (rb == ra)
    # bracket [0, detachment pressure of the weaker side]
    p_hi = np.minimum(pb * _shock_pressure_ratio(Mb, detachment_beta(Mb, gamma), gamma),
                      pa * _shock_pressure_ratio(Ma, detachment_beta(Ma, gamma), gamma))
    p_lo = np.zeros_like(p_hi)
    r_hi = _residual(p_hi, below, above, gamma)
    if np.any(r_hi < 0):
        raise NoIntersection("states too far apart: wave curves do not meet below detachment")
    r_vac = (prandtl_meyer(Ma, gamma) - nu_max(gamma)) + (prandtl_meyer(Mb, gamma) - nu_max(gamma)) - (thb - tha)
    if np.any(r_vac > 0):
        raise VacuumError("wave curves meet only at vacuum")
    # acoustic initial guess
    ka = np.sqrt(Ma * Ma - 1.0) / (gamma * pa * Ma * Ma)
    kb = np.sqrt(Mb * Mb - 1.0) / (gamma * pb * Mb * Mb)
    p = ((thb - tha) + (ka * pa + kb * pb)) / (ka + kb)
    p = np.where(same, pb, p)
    p = np.clip(p, 0.01 * np.minimum(pa, pb), 0.999 * p_hi)
    active = ~same
    for _ in range(60):
        if not np.any(active):
            break
        ia = np.flatnonzero(active)
        sub_b = tuple(a[ia] for a in below)
        sub_a = tuple(a[ia] for a in above)
        pi = p[ia]
        r = _residual(pi, sub_b, sub_a, gamma)
        lo, hi = p_lo[ia], p_hi[ia]
        lo = np.where(r < 0, np.maximum(lo, pi), lo)
        hi = np.where(r > 0, np.minimum(hi, pi), hi)
        p_lo[ia], p_hi[ia] = lo, hi
        h = 1e-7 * pi
        dr = (_residual(pi + h, sub_b, sub_a, gamma) - r) / h
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(dr > 0, r / dr, np.nan)
        pn = pi - step
        bad = ~np.isfinite(pn) | (pn <= lo) | (pn >= hi)
        pn = np.where(bad, 0.5 * (lo + hi), pn)
        done = (np.abs(r) < 1e-15) | (np.abs(pn - pi) < P_TOL * pi)
        p[ia] = np.where(np.abs(r) < 1e-15, pi, pn)
        active[ia[done]] = False
    # middle states
    da, qma, rma, _ = wave_turning(qa, ra, pa, p, gamma)
    db, qmb, rmb, _ = wave_turning(qb, rb, pb, p, gamma)
    th_a = tha + da
    th_b = thb - db
    # null-wave snapping keeps unperturbed regions exactly constant
    null1 = np.abs(p - pb) <= NULL_TOL * pb
    null3 = np.abs(p - pa) <= NULL_TOL * pa
    p = np.where(null1, pb, np.where(null3, pa, p))
    mb = [np.where(null1, qb, qmb), np.where(null1, thb, th_b), np.where(null1, pb, p), np.where(null1, rb, rmb)]
    ma = [np.where(null3, qa, qma), np.where(null3, tha, th_a), np.where(null3, pa, p), np.where(null3, ra, rma)]
    # both sides must share (p, th); take the angle from the non-null side
    th_star = np.where(null1, mb[1], np.where(null3, ma[1], 0.5 * (th_a + th_b)))
    mb[1] = np.where(null1, mb[1], th_star)
    ma[1] = np.where(null3, ma[1], th_star)
    null0 = (np.abs(ma[3] - mb[3]) <= NULL_TOL * mb[3]) & (np.abs(ma[0] - mb[0]) <= NULL_TOL * mb[0])
    keep_b = null0 & null1
    for comp in range(4):
        merged_b = np.where(null0 & ~null1 & null3, ma[comp], mb[comp])
        merged_a = np.where(keep_b | (null0 & ~null3 & ~null1), mb[comp], ma[comp])
        mb[comp], ma[comp] = merged_b, merged_a
    if check:
        _check_axial(*mb, gamma, "middle")
        _check_axial(*ma, gamma, "middle")
    return Fans(below, above, tuple(mb), tuple(ma), p, gamma)


def _prim_to_arrays(states):
    u1 = np.array([s.u1 for s in states])
    u2 = np.array([s.u2 for s in states])
    q, th = _to_qth(u1, u2)
    return q, th, np.array([s.p for s in states]), np.array([s.rho for s in states])


def _arrays_to_prim(t, i=0):
    q, th, p, rho = (float(np.asarray(a).reshape(-1)[i]) for a in t)
    return EulerPrimitive(q * math.cos(th), q * math.sin(th), p, rho)


# -- public scalar API -----------------------------------------------------------------

def wave_curve(side: str, s: EulerPrimitive, p_target: float, g: GasModel = AIR):
    """State reached from ``s`` across one acoustic wave at pressure ``p_target``.

    ``side='above'``: ``s`` lies above a 3-wave; the result is the state
    below it.  ``side='below'``: ``s`` lies below a 1-wave; the result is
    the state above it.  Returns (flow angle, EulerPrimitive).
    """
    if side not in ("above", "below"):
        raise ValueError("side must be 'above' or 'below'")
    if not p_target > 0:
        raise ValueError("p_target must be positive")
    char_speeds(s, g)
    q, th = s.speed, s.angle
    M = q / math.sqrt(g.gamma * s.p / s.rho)
    if p_target > s.p:
        p_max = s.p * float(_shock_pressure_ratio(M, detachment_beta(M, g.gamma), g.gamma))
        if p_target > p_max:
            raise DetachedError(f"p_target {p_target} beyond the detachment pressure {p_max}")
    else:
        gm1 = g.gamma - 1.0
        if prandtl_meyer(M, g.gamma) >= nu_max(g.gamma) or p_target <= 0.0:
            raise VacuumError("simple wave reaches vacuum")
    delta, qs, rs, _ = wave_turning(q, s.rho, s.p, p_target, g.gamma)
    sign = 1.0 if side == "above" else -1.0
    ths = th + sign * float(delta)
    out = EulerPrimitive(float(qs) * math.cos(ths), float(qs) * math.sin(ths), float(p_target), float(rs))
    return ths, out


@dataclass(frozen=True)
class Wave:
    family: int
    kind: str
    strength: float
    angles: tuple


class WaveFan:
    """Exact solution of one steady Riemann problem, sampled by slope."""

    def __init__(self, fans: Fans, g: GasModel):
        self._fans = fans
        self.gas = g
        f = fans
        kinds = {1: "shock", -1: "simple-wave", 0: "null"}
        pb, pa = f.below[2][0], f.above[2][0]
        p = f.p_star[0]
        self.waves = [
            Wave(1, kinds[int(f.kind1[0])], float(p / pb - 1.0),
                 (float(f.angles1[0][0]), float(f.angles1[1][0]))),
            Wave(2, "null" if f.contact_null[0] else "slip-line", float(f.ma[3][0] / f.mb[3][0] - 1.0),
                 (float(f.contact[0]), float(f.contact[0]))),
            Wave(3, kinds[int(f.kind3[0])], float(p / pa - 1.0),
                 (float(f.angles3[0][0]), float(f.angles3[1][0]))),
        ]
        self.middle_states = (_arrays_to_prim(f.mb), _arrays_to_prim(f.ma))
        self.p_star = float(p)
        self.theta_star = float(f.mb[1][0])

    def slopes(self):
        """(low, high) slope of each wave, in family order."""
        return [(math.tan(w.angles[0]), math.tan(w.angles[1])) for w in self.waves]

    def sample(self, slope: float) -> EulerPrimitive:
        st = self._fans.sample(np.array([math.atan(slope)]), np.array([0]))
        return _arrays_to_prim(st)


def steady_riemann(above: EulerPrimitive, below: EulerPrimitive, g: GasModel = AIR) -> WaveFan:
    fans = solve_riemann_arrays(_prim_to_arrays([below]), _prim_to_arrays([above]), g.gamma)
    return WaveFan(fans, g)


def solve_wall_arrays(state, wall_angle, gamma):
    """Wall below ``state``: find the 3-wave turning the flow to ``wall_angle``.

    Returns (p_wall, delta, kind, beta, wall state tuple).
    """
    q, th, p, rho = (np.asarray(a, dtype=float) for a in state)
    M = q / np.sqrt(gamma * p / rho)
    need = wall_angle - th
    b_d = detachment_beta(M, gamma)
    p_d = p * _shock_pressure_ratio(M, b_d, gamma)
    d_max = wave_turning(q, rho, p, p_d, gamma)[0]
    if np.any(need > d_max):
        raise DetachedError(f"wall turning {float(np.max(need))} exceeds detachment angle {float(np.max(d_max))}")
    if np.any(need < prandtl_meyer(M, gamma) - nu_max(gamma)):
        raise VacuumError("expansion at the wall reaches vacuum")
    lo = np.zeros_like(p)
    hi = p_d.copy()
    # bisection: robust and this is one solve per slice
    pw = np.where(need == 0, p, 0.5 * (lo + hi))
    for _ in range(200):
        r = wave_turning(q, rho, p, pw, gamma)[0] - need
        lo = np.where(r < 0, pw, lo)
        hi = np.where(r >= 0, pw, hi)
        nxt = 0.5 * (lo + hi)
        if np.all((hi - lo) < P_TOL * p):
            break
        pw = np.where(need == 0, p, nxt)
    pw = np.where(need == 0, p, pw)
    delta, qs, rs, beta = wave_turning(q, rho, p, pw, gamma)
    null = np.abs(pw - p) <= NULL_TOL * p
    wall = (np.where(null, q, qs), np.where(null, th, wall_angle), np.where(null, p, pw), np.where(null, rho, rs))
    return pw, delta, beta, wall


def boundary_riemann(s: EulerPrimitive, wall_slope: float, g: GasModel = AIR):
    """Slip-wall problem with the wall below ``s``.

    Returns (Wave, wall_state).  The wave is a 3-family shock when the wall
    turns into the flow, a simple wave when it turns away, null if aligned.
    """
    char_speeds(s, g)
    q, th = s.speed, s.angle
    wall_angle = math.atan(wall_slope)
    pw, delta, beta, wall = solve_wall_arrays((np.array([q]), np.array([th]), np.array([s.p]), np.array([s.rho])),
                                              np.array([wall_angle]), g.gamma)
    pw = float(pw[0])
    M = q / math.sqrt(g.gamma * s.p / s.rho)
    if abs(pw - s.p) <= NULL_TOL * s.p:
        wave = Wave(3, "null", 0.0, (th, th))
    elif pw > s.p:
        a = th + float(beta[0])
        wave = Wave(3, "shock", pw / s.p - 1.0, (a, a))
    else:
        ws = _arrays_to_prim(wall)
        Mw = ws.speed / math.sqrt(g.gamma * ws.p / ws.rho)
        wave = Wave(3, "simple-wave", pw / s.p - 1.0, (wall_angle + math.asin(1.0 / Mw), th + math.asin(1.0 / M)))
    state = _arrays_to_prim(wall)
    char_speeds(state, g)
    return wave, state

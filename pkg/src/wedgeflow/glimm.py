"""Random-choice (Glimm) marching in x1 for steady supersonic flow past a wedge.

The physical frame has a horizontal incoming flow.  The wedge surface is
``x2 = B(x1)`` with local angle ``theta_w + arctan b'(x1)``, so ``b`` is the
perturbation of the nominal straight wedge (``b(0) = 0``, ``b'(0+) = 0``).

Downstream of the leading shock the march runs in the wall offset
``y = x2 - B(x1)`` on a staggered grid with node spacing ``h = dx2``: at
step ``n`` the cell values sit at ``y = k h`` with ``k = n (mod 2)``, each
value covering ``[(k-1) h, (k+1) h]`` (the wall node ``k = 0`` covers a half
cell).  The leading shock is tracked as an explicit curve ``sigma(x1)``;
its slope comes from the 3-shock of the Riemann problem between the top
downstream cell and the incoming state.

Example
-------
>>> geom = straight_wedge(math.radians(10))
>>> data = make_cauchy_data("constant", 0.0, state_from_mach(2.0))
>>> field, front, diag = march(geom, data, MarchConfig(dx2=0.1, x1_max=5.0))
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (AxiallySubsonic, CflViolation, InsufficientData, NotSupersonic,
                     ValidationError, WedgeFlowError)
from .polar import critical_angles
from .steady_waves import (_fan_state, solve_riemann_arrays, solve_wall_arrays)
from .thermo import AIR, EulerPrimitive, GasModel, state_from_mach


# -- geometry ---------------------------------------------------------------------

@dataclass(frozen=True)
class WedgeGeometry:
    """Nominal wedge angle plus a piecewise-constant slope perturbation.

    ``x1_knots[i]`` is where ``b'`` switches to ``slopes[i]``; ``x1_knots[0]``
    must be 0 and ``slopes[0]`` must be 0.
    """

    theta_w: float
    x1_knots: tuple = (0.0,)
    slopes: tuple = (0.0,)

    def __post_init__(self):
        if len(self.x1_knots) != len(self.slopes) or not self.x1_knots:
            raise ValidationError("x1_knots and slopes must have equal nonzero length")
        if self.x1_knots[0] != 0.0 or self.slopes[0] != 0.0:
            raise ValidationError("b'(0+) must be 0 with the first knot at x1 = 0")
        if any(b <= a for a, b in zip(self.x1_knots, self.x1_knots[1:])):
            raise ValidationError("x1_knots must increase")
        if not 0.0 <= self.theta_w < 0.5 * math.pi:
            raise ValidationError("theta_w must lie in [0, pi/2)")

    def b_slope(self, x1):
        """Perturbation slope b'(x1) (right-continuous)."""
        i = np.searchsorted(np.asarray(self.x1_knots), x1, side="right") - 1
        return np.asarray(self.slopes)[np.maximum(i, 0)]

    def wall_angle(self, x1):
        return self.theta_w + np.arctan(self.b_slope(x1))

    def b(self, x1):
        """Perturbation height b(x1) (integral of b')."""
        knots = np.asarray(self.x1_knots + (np.inf,))
        s = np.asarray(self.slopes)
        x1 = np.asarray(x1, dtype=float)
        seg = np.clip(x1[..., None] - knots[None, :-1] if x1.ndim else x1 - knots[:-1], 0.0, None)
        seg = np.minimum(seg, np.diff(knots))
        return np.sum(seg * s, axis=-1)

    @property
    def tv_slope(self) -> float:
        return float(np.sum(np.abs(np.diff(self.slopes))))

    @property
    def slope_at_infinity(self) -> float:
        return float(self.slopes[-1])


def straight_wedge(theta_w: float) -> WedgeGeometry:
    return WedgeGeometry(theta_w)


# -- upstream data -----------------------------------------------------------------

COMPONENTS = ("u1", "u2", "p", "rho")


@dataclass(frozen=True)
class CauchyData:
    """Incoming state as a piecewise-linear function of x2 on ``x2 >= 0``.

    Repeated knots encode jumps; values are constant beyond the last knot.
    """

    x2: np.ndarray
    values: dict
    tv: dict
    kind: str = "constant"

    def at(self, x2):
        """Arrays (u1, u2, p, rho) at heights ``x2``.  A jump knot is taken
        from above (right-continuous)."""
        x2 = np.asarray(x2, dtype=float)
        k = self.x2
        n = len(k)
        # segment [k[i-1], k[i]) with k[i] the first knot strictly above x2;
        # zero-width (jump) segments are never selected
        i = np.searchsorted(k, x2, side="right")
        last = i >= n
        i = np.clip(i, 1, max(n - 1, 1))
        out = []
        for c in COMPONENTS:
            v = np.asarray(self.values[c], dtype=float)
            if n == 1:
                out.append(np.full(x2.shape, v[0]))
                continue
            x0, x1 = k[i - 1], k[i]
            w = np.clip((x2 - x0) / np.where(x1 > x0, x1 - x0, 1.0), 0.0, 1.0)
            val = v[i - 1] + w * (v[i] - v[i - 1])
            out.append(np.where(last, v[-1], val))
        return tuple(out)

    @property
    def is_constant(self) -> bool:
        return all(t == 0.0 for t in self.tv.values())

    @property
    def total_tv(self) -> float:
        return float(sum(self.tv.values()))

    def background(self) -> EulerPrimitive:
        return EulerPrimitive(*(float(self.values[c][-1]) for c in COMPONENTS))


def make_cauchy_data(kind: str, amplitude: float, background: EulerPrimitive, component: str = "p",
                     center: float = 5.0, width: float = 4.0, teeth: int = 4, g: GasModel = AIR) -> CauchyData:
    """Perturbation families for the incoming flow.

    ``step``: jump of ``amplitude`` at ``center``.  ``bump``: triangular hat
    of height ``amplitude`` on ``[center - width/2, center + width/2]``
    (TV = 2a).  ``sawtooth``: ``teeth`` hats over the same interval
    (TV = 2 a teeth).  Only ``component`` is perturbed.
    """
    if amplitude < 0:
        raise ValidationError("amplitude must be non-negative")
    if component not in COMPONENTS:
        raise ValidationError(f"component must be one of {COMPONENTS}")
    base = background.as_tuple()
    lo = center - 0.5 * width
    if lo < 0:
        raise ValidationError("perturbation must lie in x2 >= 0")
    if kind == "constant":
        knots = np.array([0.0])
        prof = np.array([0.0])
    elif kind == "step":
        knots = np.array([0.0, center, center])
        prof = np.array([0.0, 0.0, amplitude])
    elif kind == "bump":
        knots = np.array([0.0, lo, center, lo + width])
        prof = np.array([0.0, 0.0, amplitude, 0.0])
    elif kind == "sawtooth":
        knots = np.concatenate([[0.0], lo + width * np.arange(2 * teeth + 1) / (2 * teeth)])
        prof = np.concatenate([[0.0], np.tile([0.0, amplitude], teeth), [0.0]])
    else:
        raise ValidationError(f"unknown perturbation kind {kind!r}")
    values = {}
    tv = {}
    for c, b in zip(COMPONENTS, base):
        v = np.full(knots.shape, b, dtype=float)
        if c == component:
            v = v + prof
        values[c] = v
        tv[c] = float(np.sum(np.abs(np.diff(v))))
    u1, u2, p, rho = (values[c] for c in COMPONENTS)
    if np.any(p <= 0) or np.any(rho <= 0):
        raise ValidationError("perturbed pressure and density must stay positive")
    c_snd = np.sqrt(g.gamma * p / rho)
    if np.any(u1 <= c_snd):
        raise NotSupersonic("incoming samples must satisfy u1 > c")
    return CauchyData(knots, values, tv, kind)


# -- configuration and results ------------------------------------------------------

@dataclass(frozen=True)
class MarchConfig:
    dx2: float = 0.1
    x1_max: float = 10.0
    cfl: float = 0.8
    dx1: float | None = None
    seed: int = 0
    track_front: bool = True

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValidationError("cfl must lie in (0, 1)")
        if not self.dx2 > 0 or not self.x1_max > 0:
            raise ValidationError("dx2 and x1_max must be positive")
        if self.dx1 is not None and not self.dx1 > 0:
            raise ValidationError("dx1 must be positive")
        if not self.track_front:
            raise ValidationError("only the front-tracking march is implemented")


@dataclass
class TrackedFront:
    x1: np.ndarray
    sigma: np.ndarray
    sigma_slope: np.ndarray

    def rows(self):
        for a, b, c in zip(self.x1, self.sigma, self.sigma_slope):
            yield (float(a), float(b), float(c))


@dataclass
class Diagnostics:
    """Per-slice monitors; ``angle_mean`` is ``tan`` of the flow angle
    measured from the nominal wedge direction."""

    x1: np.ndarray
    tv_per_slice: np.ndarray
    tv_below: np.ndarray
    p_mean: np.ndarray
    angle_mean: np.ndarray
    slope: np.ndarray
    wall_defect: np.ndarray
    b_slope_inf: float
    dx2: float

    @property
    def slip_defect(self) -> float:
        w = self.wall_defect[np.isfinite(self.wall_defect)]
        return float(np.max(w)) if w.size else 0.0

    @property
    def max_tv(self) -> float:
        return float(np.max(self.tv_per_slice))


@dataclass
class MarchField:
    """Final downstream slice: node heights and states (arrays)."""

    x1: float
    x2: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    p: np.ndarray
    rho: np.ndarray


@dataclass(frozen=True)
class Asymptotics:
    s_inf: float
    p_inf: float
    angle_inf: float
    s_std: float
    p_std: float
    angle_std: float
    b_slope_inf: float


# -- helpers ------------------------------------------------------------------------

def van_der_corput(n: int, base: int = 2) -> float:
    x, denom = 0.0, 1.0
    while n:
        n, r = divmod(n, base)
        denom *= base
        x += r / denom
    return x


def _entropy(p, rho, g):
    return g.cv * np.log(p / (g.kappa * rho ** g.gamma))


def _tv(st, g):
    q, th, p, rho = st
    if len(p) < 2:
        return 0.0
    return float(np.sum(np.abs(np.diff(p))) + np.sum(np.abs(np.diff(th)))
                 + np.sum(np.abs(np.diff(_entropy(p, rho, g)))))


def _lam_bound(st, ref_slope, g):
    q, th, p, rho = st
    mu = np.arcsin(np.minimum(np.sqrt(g.gamma * p / rho) / q, 1.0))
    return float(np.max(np.maximum(np.abs(np.tan(th + mu) - ref_slope), np.abs(np.tan(th - mu) - ref_slope))))


def _take(st, idx):
    return tuple(a[idx] for a in st)


def _where(mask, a, b):
    return tuple(np.where(mask, x, y) for x, y in zip(a, b))


def _sample_wall(state, wall_angle, alpha, gamma):
    """Sample the slip-wall fan (wall below ``state``) at angles ``alpha``."""
    pw, delta, beta, wall = solve_wall_arrays(state, wall_angle, gamma)
    q, th, p, rho = state
    shock = pw > p
    Mw = wall[0] / np.sqrt(gamma * wall[2] / wall[3])
    M = q / np.sqrt(gamma * p / rho)
    lo = np.where(shock, th + np.nan_to_num(beta), wall_angle + np.arcsin(1.0 / Mw))
    hi = np.where(shock, th + np.nan_to_num(beta), th + np.arcsin(1.0 / M))
    null = pw == p
    out = _where((alpha < lo) & ~null, wall, state)
    fan = ~shock & ~null & (alpha >= lo) & (alpha < hi)
    if np.any(fan):
        sel = np.flatnonzero(fan)
        st = _fan_state(state, sel, alpha[sel], family=3, gamma=gamma)
        out = tuple(np.array(o, copy=True) for o in out)
        for comp in range(4):
            out[comp][sel] = st[comp]
    return out, wall


class _UpstreamMarch:
    """Glimm march of the incoming flow on ``0 <= x2 <= H`` (no wall)."""

    def __init__(self, data: CauchyData, top: float, h: float, g: GasModel):
        self.h = h
        self.g = g
        self.constant = data.is_constant
        if self.constant:
            u1, u2, p, rho = (np.array([v]) for v in data.background().as_tuple())
            self.const = (np.hypot(u1, u2), np.arctan2(u2, u1), p, rho)
            return
        self.kmax = int(math.ceil(top / h)) + 1
        self.parity = 0
        k = np.arange(0, self.kmax + 1, 2)
        u1, u2, p, rho = data.at(k * h)
        self.st = (np.hypot(u1, u2), np.arctan2(u2, u1), p, rho)

    def positions(self):
        return np.arange(self.parity, self.kmax + 1, 2) * self.h

    def state_at(self, x2):
        if self.constant:
            return self.const
        pos = self.positions()
        i = int(np.clip(np.round((x2 - pos[0]) / (2 * self.h)), 0, len(pos) - 1))
        return _take(self.st, np.array([i]))

    def tv_above(self, x2):
        if self.constant:
            return 0.0
        pos = self.positions()
        return _tv(_take(self.st, pos > x2), self.g)

    def lam(self):
        return 0.0 if self.constant else _lam_bound(self.st, 0.0, self.g)

    def step(self, theta, dx1):
        if self.constant:
            return
        h, g = self.h, self.g
        old = self.st
        n_old = len(old[0])
        newpar = 1 - self.parity
        m = np.arange(newpar, self.kmax + 1, 2)
        # old index of node m-1 and m+1, clamped for transmissive edges
        lo_i = np.clip((m - 1 - self.parity) // 2, 0, n_old - 1)
        hi_i = np.clip((m + 1 - self.parity) // 2, 0, n_old - 1)
        fans = solve_riemann_arrays(_take(old, lo_i), _take(old, hi_i), g.gamma)
        alpha = np.full(len(m), math.atan((2.0 * theta - 1.0) * h / dx1))
        self.st = fans.sample(alpha)
        self.parity = newpar


# -- the march ------------------------------------------------------------------------

def _check_geometry(geom: WedgeGeometry, upstream: EulerPrimitive, g: GasModel):
    crit = critical_angles(EulerPrimitive(upstream.speed, 0.0, upstream.p, upstream.rho), g)
    top = geom.theta_w + math.atan(max(geom.slopes))
    if not top < crit.theta_s:
        raise ValidationError(f"wall angle {top} must stay below the sonic angle {crit.theta_s}")


def march(geom: WedgeGeometry, data: CauchyData, cfg: MarchConfig, g: GasModel = AIR):
    """Run the tracked Glimm march to ``cfg.x1_max``.

    Returns (MarchField, TrackedFront, Diagnostics).  Raises AxiallySubsonic
    (with the slice index), DetachedError or VacuumError from the local
    Riemann solvers.
    """
    _check_geometry(geom, data.background(), g)
    h = cfg.dx2
    gam = g.gamma
    # initial wall state from the wedge tip
    up0 = data.at(np.array([0.0]))
    up0 = (np.hypot(up0[0], up0[1]), np.arctan2(up0[1], up0[0]), up0[2], up0[3])
    wa0 = np.array([float(geom.wall_angle(0.0))])
    _, _, beta0, wall0 = solve_wall_arrays(up0, wa0, gam)
    s0 = math.tan(float(up0[1][0] + beta0[0]))
    # upstream domain must cover the front plus the inflow cone from above
    m0 = float(up0[0][0] / np.sqrt(gam * up0[2][0] / up0[3][0]))
    top = cfg.x1_max * (1.5 * s0 + math.tan(math.asin(1.0 / m0))) + 4.0 * h
    upstream = _UpstreamMarch(data, top, h, g)

    st = tuple(np.asarray(a, dtype=float) for a in wall0)
    parity = 0
    lam = max(_lam_bound(st, math.tan(float(wa0[0])), g), upstream.lam(), abs(s0 - math.tan(float(wa0[0]))))
    dx1 = cfg.dx1 if cfg.dx1 is not None else cfg.cfl * h / lam
    nsteps = int(math.ceil(cfg.x1_max / dx1 - 1e-9))

    x1, B, sigma = 0.0, 0.0, 0.0
    xs = [0.0]
    sig = [0.0]
    slopes = []
    tv_all, tv_low, p_mean, a_mean, wall_def = [], [], [], [], []
    tv0_low = 0.0
    tv_all.append(tv0_low + upstream.tv_above(0.0))
    tv_low.append(tv0_low)
    p_mean.append(float(st[2][0]))
    a_mean.append(math.tan(float(st[1][0]) - geom.theta_w))
    wall_def.append(abs(float(st[1][0]) - float(wa0[0])))

    for n in range(nsteps):
        theta = van_der_corput(n + 1 + cfg.seed)
        wa = float(geom.wall_angle(x1 + 0.5 * dx1))
        B1 = B + dx1 * math.tan(wa)
        ref = math.tan(wa)
        lam_n = _lam_bound(st, ref, g)
        if lam_n * dx1 > h * (1.0 + 1e-12):
            raise CflViolation(f"slice {n}: wave speed {lam_n} violates dx1/dx2 = {dx1 / h}")
        try:
            # front Riemann problem: top downstream cell against the incoming flow
            ua = upstream.state_at(sigma)
            top_i = np.array([len(st[0]) - 1])
            ffan = solve_riemann_arrays(_take(st, top_i), ua, gam)
            if ffan.kind3[0] != 1:
                raise WedgeFlowError(f"slice {n}: leading wave is not a shock")
            s = math.tan(float(ffan.angles3[0][0]))
            sigma1 = sigma + dx1 * s
            yf1 = sigma1 - B1
            kmax_old = parity + 2 * (len(st[0]) - 1)
            newpar = 1 - parity
            m = np.arange(newpar, int(math.floor(yf1 / h)) + 2, 2)
            m = m[(m == 0) | ((m - 1) * h < yf1)]
            ystar = np.where(m == 0, theta * h, m * h + (2.0 * theta - 1.0) * h)
            x2star = B1 + ystar
            new = [np.zeros(len(m)) for _ in range(4)]
            # regular interfaces
            reg = (m > 0) & (m + 1 <= kmax_old)
            if np.any(reg):
                mi = m[reg]
                below = _take(st, (mi - 1 - parity) // 2)
                above = _take(st, (mi + 1 - parity) // 2)
                fans = solve_riemann_arrays(below, above, gam)
                alpha = np.arctan((x2star[reg] - B - mi * h) / dx1)
                smp = fans.sample(alpha)
                for c in range(4):
                    new[c][reg] = smp[c]
            # interface against the front
            fr = (m > 0) & (m + 1 > kmax_old)
            if np.any(fr):
                alpha = np.arctan((x2star[fr] - sigma) / dx1)
                smp = ffan.sample(alpha, np.zeros(int(fr.sum()), dtype=int))
                for c in range(4):
                    new[c][fr] = smp[c]
            # wall half cell
            wdef = np.nan
            if newpar == 0:
                alpha = np.array([math.atan((B1 + theta * h - B) / dx1)])
                smp, wst = _sample_wall(_take(st, np.array([0])), np.array([wa]), alpha, gam)
                for c in range(4):
                    new[c][0] = smp[c][0]
                wdef = abs(float(smp[1][0]) - wa)
            # cells sampled above the new front take the state just below the shock
            above_front = x2star > sigma1
            if np.any(above_front):
                for c in range(4):
                    new[c][above_front] = ffan.ma[c][0]
            new = tuple(new)
            bad = ~(new[0] * np.cos(new[1]) > np.sqrt(gam * new[2] / new[3]))
            if np.any(bad):
                raise AxiallySubsonic("downstream state lost axial supersonicity", slice_index=n)
            upstream.step(theta, dx1)
        except AxiallySubsonic as exc:
            raise AxiallySubsonic(f"slice {n}: {exc}", slice_index=n) from exc
        st = new
        parity = newpar
        x1 += dx1
        B = B1
        sigma = sigma1
        xs.append(x1)
        sig.append(sigma)
        slopes.append(s)
        if sigma <= B:
            raise WedgeFlowError(f"slice {n}: front fell onto the wall")
        # diagnostics, weighted by the part of each cell inside [0, yf]
        lo_e = np.maximum((m - 1) * h, 0.0)
        hi_e = np.minimum((m + 1) * h, yf1)
        w = np.maximum(hi_e - lo_e, 0.0)
        tv_b = _tv(st, g)
        tv_low.append(tv_b)
        tv_all.append(tv_b + upstream.tv_above(sigma))
        p_mean.append(float(np.sum(w * st[2]) / np.sum(w)))
        a_mean.append(float(np.sum(w * np.tan(st[1] - geom.theta_w)) / np.sum(w)))
        wall_def.append(wdef)

    slopes.append(slopes[-1] if slopes else s0)
    k = parity + 2 * np.arange(len(st[0]))
    q, th, p, rho = st
    fld = MarchField(x1, B + k * h, q * np.cos(th), q * np.sin(th), p.copy(), rho.copy())
    front = TrackedFront(np.array(xs), np.array(sig), np.array(slopes))
    diag = Diagnostics(np.array(xs), np.array(tv_all), np.array(tv_low), np.array(p_mean),
                       np.array(a_mean), np.array(slopes), np.array(wall_def),
                       geom.slope_at_infinity, h)
    return fld, front, diag


def asymptotics_estimate(d: Diagnostics, tail_fraction: float = 0.25) -> Asymptotics:
    """Tail averages of the front slope, mean pressure and flow angle."""
    if not 0.0 < tail_fraction < 1.0:
        raise ValidationError("tail_fraction must lie in (0, 1)")
    n = len(d.x1)
    k = int(math.ceil(tail_fraction * n))
    if k < 10:
        raise InsufficientData(f"only {k} tail slices")
    sl = slice(n - k, n)
    pick = lambda a: (float(np.mean(a[sl])), float(np.std(a[sl], ddof=1)))
    s, ss = pick(d.slope)
    p, ps = pick(d.p_mean)
    a, as_ = pick(d.angle_mean)
    return Asymptotics(s, p, a, ss, ps, as_, d.b_slope_inf)


def cells_for_downstream(theta_w: float, upstream: EulerPrimitive, x1_max: float, ncells: int,
                         g: GasModel = AIR) -> float:
    """``dx2`` such that ``ncells`` nodes span the unperturbed downstream
    region (wall to shock) at ``x1_max``."""
    from .polar import wedge_solutions
    sol = wedge_solutions(upstream, theta_w, g)
    width = x1_max * (math.tan(sol.weak.beta) - math.tan(theta_w))
    return width / ncells

"""Explicit finite volumes for unsteady potential flow onto a wedge.

Unknowns are the cell-centred density ``rho`` and velocity potential
``Phi`` on a wedge-aligned rectangle with the vertex at the origin and
the wall along one horizontal edge.  A step advances

    rho_t + div(rho grad Phi) = 0           (Rusanov interface flux)
    Phi_t + |grad Phi|^2/2 + h(rho) = B     (Bernoulli law)

The Bernoulli update is a Hamilton-Jacobi step; a centred gradient alone
is unstable under forward Euler, so it carries local Lax-Friedrichs
dissipation with the same ``|u| + c`` scale as the density flux.

The free stream ``u10 (cos theta_w, -sin theta_w)`` (wall at the bottom)
is turned by the wall, and the long-time limit inside a fixed ball is the
steady weak oblique shock.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CflViolation, NonConvergence, NotSupersonic, ValidationError, VacuumError
from .polar import Detached, PotentialState, potential_wedge_solutions
from .thermo import AIR, GasModel, potential_h


@dataclass(frozen=True)
class Grid2D:
    nx: int
    ny: int
    hx: float
    hy: float

    def __post_init__(self):
        if self.nx < 16 or self.ny < 16:
            raise ValidationError("nx and ny must be at least 16")
        if not (self.hx > 0 and self.hy > 0):
            raise ValidationError("hx and hy must be positive")

    @classmethod
    def box(cls, nx: int, ny: int, lx: float = 2.0, ly: float = 1.0) -> "Grid2D":
        return cls(nx, ny, lx / nx, ly / ny)

    @property
    def lx(self):
        return self.nx * self.hx

    @property
    def ly(self):
        return self.ny * self.hy

    def xc(self):
        return (np.arange(self.nx) + 0.5) * self.hx

    def yc(self):
        return (np.arange(self.ny) + 0.5) * self.hy

    @property
    def cell_area(self):
        return self.hx * self.hy


@dataclass(frozen=True)
class Freestream:
    """Incoming flow; ``wall`` is the edge carrying the wedge surface."""

    u10: float
    rho0: float
    theta_w: float
    wall: str = "bottom"

    def __post_init__(self):
        if self.wall not in ("bottom", "top"):
            raise ValidationError("wall must be 'bottom' or 'top'")


@dataclass
class FieldState:
    rho: np.ndarray
    phi: np.ndarray
    t: float
    B: float
    steps: int = 0
    inflow: float = 0.0

    def mass(self, grid: Grid2D) -> float:
        return float(np.sum(self.rho)) * grid.cell_area

    def copy(self) -> "FieldState":
        return FieldState(self.rho.copy(), self.phi.copy(), self.t, self.B, self.steps, self.inflow)


def _dist(grid: Grid2D, fs: Freestream, with_ghosts: bool):
    """Wall distance of cell rows (optionally including the two ghost rows)."""
    j = np.arange(-1, grid.ny + 1) if with_ghosts else np.arange(grid.ny)
    d = (j + 0.5) * grid.hy
    return d if fs.wall == "bottom" else d[::-1]


def _free_phi(grid, fs, x, d):
    a = fs.u10 * math.cos(fs.theta_w)
    b = fs.u10 * math.sin(fs.theta_w)
    return a * x[:, None] - b * d[None, :]


def init_uniform(grid: Grid2D, g: GasModel, u10: float, rho0: float, theta_w: float,
                 wall: str = "bottom") -> tuple:
    """Uniform free stream, not yet turned by the wall.

    Returns (FieldState, Freestream).
    """
    c0 = math.sqrt(rho0 ** (g.gamma - 1.0))
    if not u10 > c0:
        raise NotSupersonic(f"u10={u10} must exceed c0={c0}")
    fs = Freestream(u10, rho0, theta_w, wall)
    phi = _free_phi(grid, fs, grid.xc(), _dist(grid, fs, False))
    rho = np.full((grid.nx, grid.ny), float(rho0))
    B = 0.5 * u10 * u10 + potential_h(rho0, g)
    return FieldState(rho, phi, 0.0, B), fs


def apply_bcs(state: FieldState, grid: Grid2D, g: GasModel, fs: Freestream):
    """Padded (nx+2, ny+2) copies of rho and Phi with ghost cells filled.

    Wall edge: even reflection of rho and Phi (zero normal derivative is
    the slip condition).  Left edge and the edge opposite the wall:
    free stream.  Right edge: zero gradient for rho, linear extrapolation
    of Phi (keeps the velocity).
    """
    nx, ny = grid.nx, grid.ny
    R = np.empty((nx + 2, ny + 2))
    P = np.empty((nx + 2, ny + 2))
    R[1:-1, 1:-1] = state.rho
    P[1:-1, 1:-1] = state.phi
    d = _dist(grid, fs, True)
    x_left = np.array([-0.5 * grid.hx])
    # right edge
    R[-1, 1:-1] = state.rho[-1]
    P[-1, 1:-1] = 2.0 * state.phi[-1] - state.phi[-2]
    # left edge: free stream
    R[0, :] = fs.rho0
    P[0, :] = _free_phi(grid, fs, x_left, d)[0]
    xall = (np.arange(-1, nx + 1) + 0.5) * grid.hx
    if fs.wall == "bottom":
        wall_g, wall_i, far_g = 0, 1, -1
    else:
        wall_g, wall_i, far_g = -1, -2, 0
    R[1:-1, wall_g] = R[1:-1, wall_i]
    P[1:-1, wall_g] = P[1:-1, wall_i]
    R[1:-1, far_g] = fs.rho0
    P[1:-1, far_g] = _free_phi(grid, fs, xall[1:-1], d[[far_g]])[:, 0]
    return R, P


def _fluxes(R, P, grid, g):
    gm1 = g.gamma - 1.0
    hx, hy = grid.hx, grid.hy
    # x faces: (nx+1, ny)
    RL, RR = R[:-1, 1:-1], R[1:, 1:-1]
    u = (P[1:, 1:-1] - P[:-1, 1:-1]) / hx
    rs = RL + RR
    a = np.abs(u) + (0.5 * rs) ** (0.5 * gm1)
    Fx = 0.5 * u * rs - 0.5 * a * (RR - RL)
    # y faces: (nx, ny+1)
    RB, RT = R[1:-1, :-1], R[1:-1, 1:]
    v = (P[1:-1, 1:] - P[1:-1, :-1]) / hy
    rs = RB + RT
    a = np.abs(v) + (0.5 * rs) ** (0.5 * gm1)
    Fy = 0.5 * v * rs - 0.5 * a * (RT - RB)
    return Fx, Fy, u, v


def max_speed(state: FieldState, grid: Grid2D, g: GasModel, fs: Freestream) -> float:
    """``max(|grad Phi| + c)`` including the boundary stencils."""
    R, P = apply_bcs(state, grid, g, fs)
    return _max_speed_padded(R, P, grid, g)


def step(state: FieldState, grid: Grid2D, g: GasModel, fs: Freestream, cfl: float = 0.45,
         dt: float | None = None) -> FieldState:
    """One explicit step; returns a new FieldState.

    ``dt`` defaults to ``cfl * min(hx, hy) / max(|grad Phi| + c)``.  A
    supplied ``dt`` above that bound with ``cfl = 0.5`` raises CflViolation.
    """
    if not 0.0 < cfl <= 0.5:
        raise ValidationError("cfl must lie in (0, 0.5]")
    gm1 = g.gamma - 1.0
    hx, hy = grid.hx, grid.hy
    R, P = apply_bcs(state, grid, g, fs)
    smax = _max_speed_padded(R, P, grid, g)
    dt_max = cfl * min(hx, hy) / smax
    if dt is None:
        dt = dt_max
    elif dt > 0.5 * min(hx, hy) / smax:
        raise CflViolation(f"dt={dt} above the stability bound {0.5 * min(hx, hy) / smax}")
    Fx, Fy, _, _ = _fluxes(R, P, grid, g)
    rho = state.rho - dt * ((Fx[1:] - Fx[:-1]) / hx + (Fy[:, 1:] - Fy[:, :-1]) / hy)
    if not np.all(rho > 0):
        raise VacuumError(f"non-positive density at t={state.t + dt}")
    inflow = dt * ((np.sum(Fx[0]) - np.sum(Fx[-1])) * hy + (np.sum(Fy[:, 0]) - np.sum(Fy[:, -1])) * hx)
    # Bernoulli step with Lax-Friedrichs dissipation
    Pc = P[1:-1, 1:-1]
    px_p = (P[2:, 1:-1] - Pc) / hx
    px_m = (Pc - P[:-2, 1:-1]) / hx
    py_p = (P[1:-1, 2:] - Pc) / hy
    py_m = (Pc - P[1:-1, :-2]) / hy
    ux = 0.5 * (px_p + px_m)
    uy = 0.5 * (py_p + py_m)
    c = rho ** (0.5 * gm1)
    ax = np.abs(ux) + c
    ay = np.abs(uy) + c
    ham = 0.5 * (ux * ux + uy * uy) + (rho ** gm1 - 1.0) / gm1
    diss = 0.5 * ax * (px_p - px_m) + 0.5 * ay * (py_p - py_m)
    phi = state.phi + dt * ((state.B - ham) + diss)
    return FieldState(rho, phi, state.t + dt, state.B, state.steps + 1, state.inflow + inflow)


def _max_speed_padded(R, P, grid, g):
    ux = (P[2:, 1:-1] - P[:-2, 1:-1]) / (2 * grid.hx)
    uy = (P[1:-1, 2:] - P[1:-1, :-2]) / (2 * grid.hy)
    c = R[1:-1, 1:-1] ** (0.5 * (g.gamma - 1.0))
    return float(np.max(np.sqrt(ux * ux + uy * uy) + c))


def wall_normal_velocity(state: FieldState, grid: Grid2D, fs: Freestream) -> float:
    """Mean |d Phi / d n| on the first face row off the wall."""
    if fs.wall == "bottom":
        v = (state.phi[:, 1] - state.phi[:, 0]) / grid.hy
    else:
        v = (state.phi[:, -1] - state.phi[:, -2]) / grid.hy
    return float(np.mean(np.abs(v)))


# -- the steady weak-shock field and diagnostics ------------------------------------

@dataclass(frozen=True)
class WeakShockField:
    """Steady two-state field in the wall-aligned frame (wall at the bottom)."""

    angle: float          # shock angle from the wall
    beta: float           # shock angle in the physical frame
    beta_strong: float
    v0: tuple
    v1: tuple
    rho0: float
    rho1: float

    def evaluate(self, x, y):
        below = y < np.tan(self.angle) * x
        vx = np.where(below, self.v1[0], self.v0[0])
        vy = np.where(below, self.v1[1], self.v0[1])
        rho = np.where(below, self.rho1, self.rho0)
        return vx, vy, rho


def shock_field(g: GasModel, u10: float, rho0: float, theta_w: float, branch: str = "weak") -> WeakShockField:
    """Steady two-state field of the ``weak`` or ``strong`` attached shock."""
    if branch not in ("weak", "strong"):
        raise ValidationError("branch must be 'weak' or 'strong'")
    sol = potential_wedge_solutions(PotentialState(u10, 0.0, rho0), theta_w, g)
    if isinstance(sol, Detached):
        raise ValidationError("theta_w beyond the potential-flow detachment angle")
    sh = sol.weak if branch == "weak" else sol.strong
    q1 = sh.downstream.speed
    return WeakShockField(sh.beta - theta_w, sh.beta, sol.strong.beta,
                          (u10 * math.cos(theta_w), -u10 * math.sin(theta_w)), (q1, 0.0),
                          rho0, sh.downstream.rho)


def weak_shock_field(g: GasModel, u10: float, rho0: float, theta_w: float) -> WeakShockField:
    return shock_field(g, u10, rho0, theta_w, "weak")


def init_shock_state(grid: Grid2D, g: GasModel, u10: float, rho0: float, theta_w: float,
                     branch: str = "strong", wall: str = "bottom") -> tuple:
    """Start from the exact steady field of one shock branch.

    Used to watch whether the scheme keeps or leaves the strong shock; the
    potential is continuous across the shock line because the tangential
    velocity is.  Returns (FieldState, Freestream).
    """
    state, fs = init_uniform(grid, g, u10, rho0, theta_w, wall)
    if not theta_w > 0:
        raise ValidationError("theta_w must be positive for a shock start")
    ref = shock_field(g, u10, rho0, theta_w, branch)
    X, Y = np.meshgrid(grid.xc(), _dist(grid, fs, False), indexing="ij")
    below = Y < math.tan(ref.angle) * X
    state.rho = np.where(below, ref.rho1, ref.rho0)
    state.phi = np.where(below, ref.v1[0] * X, ref.v0[0] * X + ref.v0[1] * Y)
    return state, fs


def _to_bottom(a, fs):
    return a if fs.wall == "bottom" else a[:, ::-1]


def _cell_velocity(phi, grid):
    """Centred cell velocities with one-sided differences on the edges."""
    return np.gradient(phi, grid.hx, grid.hy)


@dataclass(frozen=True)
class ShockFit:
    angle: float              # physical-frame shock angle (radians)
    angle_wall: float         # angle from the wall
    rms: float
    npoints: int
    downstream_sample: tuple  # (rho, |u|)


def fit_shock(state: FieldState, grid: Grid2D, g: GasModel, fs: Freestream,
              vertex_cells: float = 5.0, edge_cells: int = 10, threshold: float = 0.1,
              band: int = 6):
    """Least-squares line through the vertex along the shock.

    Shock cells are the per-column peaks of |d rho/dy| that exceed
    ``threshold`` times the largest jump inside the fit window.  Inside each such column the
    shock height is where rho crosses the mean of the densities ``band``
    cells below and above the peak (linear interpolation), which is less
    biased by the one-sided smearing than the peak itself.  Columns within
    ``vertex_cells`` cells of the vertex and peaks within ``edge_cells`` of
    the far or outflow edge are dropped.  Returns None when no column
    shows a jump (uniform flow).
    """
    rho = _to_bottom(state.rho, fs)
    phi = _to_bottom(state.phi, fs)
    hx, hy = grid.hx, grid.hy
    dr = np.abs(np.diff(rho, axis=1)) / hy          # (nx, ny-1) at y faces
    nxw = int(np.searchsorted(grid.xc(), grid.lx - edge_cells * hx))
    window = dr[:nxw, :grid.ny - 1 - edge_cells]
    # the peak is taken inside the fit window: the free-stream far edge
    # meets the downstream state in a boundary layer that is not the shock
    peak = float(np.max(window)) if window.size else 0.0
    if peak * hy <= 1e-9 * fs.rho0:
        return None
    xs, ys = [], []
    yc = grid.yc()
    r_ex = vertex_cells * max(hx, hy)
    for i, x in enumerate(grid.xc()):
        if x > grid.lx - edge_cells * hx:
            break
        col = dr[i]
        j = int(np.argmax(col))
        if col[j] < threshold * peak or j < band or j >= grid.ny - 1 - max(edge_cells, band):
            continue
        r = rho[i]
        lo, hi = j - band + 1, j + band
        level = 0.5 * (r[lo] + r[hi])
        seg = r[lo:hi + 1] - level
        cross = np.flatnonzero(np.sign(seg[:-1]) != np.sign(seg[1:]))
        if cross.size == 0:
            continue
        k = lo + int(cross[np.argmin(np.abs(cross + lo - j))])
        y = yc[k] + (r[k] - level) / (r[k] - r[k + 1]) * hy
        if math.hypot(x, y) < r_ex:
            continue
        xs.append(x)
        ys.append(y)
    if len(xs) < 3:
        return None
    xs, ys = np.array(xs), np.array(ys)
    m = float(np.sum(xs * ys) / np.sum(xs * xs))
    rms = float(np.sqrt(np.mean((ys - m * xs) ** 2)))
    ang = math.atan(m)
    # downstream sample: well below the line, away from vertex and edges
    X, Y = np.meshgrid(grid.xc(), grid.yc(), indexing="ij")
    ux, uy = _cell_velocity(phi, grid)
    mask = (Y < m * X - 10 * hy) & (X > 0.1 * grid.lx) & (X < grid.lx - edge_cells * hx) & (Y > 2 * hy)
    if np.any(mask):
        sample = (float(np.mean(rho[mask])), float(np.mean(np.hypot(ux, uy)[mask])))
    else:
        sample = (float("nan"), float("nan"))
    return ShockFit(ang + fs.theta_w, ang, rms, len(xs), sample)


def l1_defect(state: FieldState, grid: Grid2D, fs: Freestream, ref: WeakShockField, radius: float = 0.8) -> float:
    """L1 distance of (grad Phi, rho) to the steady weak-shock field on B_R."""
    rho = _to_bottom(state.rho, fs)
    phi = _to_bottom(state.phi, fs)
    X, Y = np.meshgrid(grid.xc(), grid.yc(), indexing="ij")
    ux, uy = _cell_velocity(phi, grid)
    if fs.wall == "top":
        uy = -uy
    vx, vy, r = ref.evaluate(X, Y)
    inside = X * X + Y * Y < radius * radius
    err = np.abs(ux - vx) + np.abs(uy - vy) + np.abs(rho - r)
    return float(np.sum(err[inside])) * grid.cell_area


def selfsim_defect(rho_t: np.ndarray, rho_2t: np.ndarray, grid: Grid2D) -> float:
    """L1 mismatch between rho(t, x) and rho(2t, 2x) on the lower-left quarter.

    Each cell of the half-size region at time t is compared with the
    average of the 2x2 block of the later field covering its image.
    """
    nx2, ny2 = grid.nx // 2, grid.ny // 2
    coarse = 0.25 * (rho_2t[0:2 * nx2:2, 0:2 * ny2:2] + rho_2t[1:2 * nx2:2, 0:2 * ny2:2]
                     + rho_2t[0:2 * nx2:2, 1:2 * ny2:2] + rho_2t[1:2 * nx2:2, 1:2 * ny2:2])
    return float(np.sum(np.abs(rho_t[:nx2, :ny2] - coarse))) * grid.cell_area


@dataclass
class ConvergenceReport:
    times: list = field(default_factory=list)
    residual_series: list = field(default_factory=list)
    l1_series: list = field(default_factory=list)
    selfsim_times: list = field(default_factory=list)
    selfsim_series: list = field(default_factory=list)
    mass_error: float = 0.0
    max_step_mass_error: float = 0.0
    converged: bool = False
    steps: int = 0

    def rows(self):
        ss = dict(zip(self.selfsim_times, self.selfsim_series))
        for t, r, l in zip(self.times, self.residual_series, self.l1_series):
            yield (t, r, l, ss.get(t, float("nan")))


def run_to_steady(grid: Grid2D, g: GasModel, u10: float, rho0: float, theta_w: float,
                  cfl: float = 0.45, t_max: float = 8.0, check_every: int = 50,
                  wall: str = "bottom", tol: float = 1e-8, selfsim_t0: float = 0.25,
                  radius: float = 0.8, raise_on_nonconvergence: bool = True, observer=None,
                  init: str = "uniform"):
    """March from the uniform free stream until the density residual drops
    below ``tol`` or ``t_max`` is reached.

    Snapshots at ``selfsim_t0 * 2**k`` feed the self-similarity defect.
    ``observer(state)``, if given, is called after every step.
    ``init="strong"`` starts from the strong-shock field instead of the
    uniform stream (an exploratory run; the diagnostics still compare with
    the weak shock).
    Returns (FieldState, ShockFit or None, ConvergenceReport).  Raises
    NonConvergence, carrying all three, when ``t_max`` is hit first.
    """
    if init == "uniform":
        state, fs = init_uniform(grid, g, u10, rho0, theta_w, wall)
    elif init == "strong":
        state, fs = init_shock_state(grid, g, u10, rho0, theta_w, "strong", wall)
    else:
        raise ValidationError("init must be 'uniform' or 'strong'")
    ref = weak_shock_field(g, u10, rho0, theta_w) if theta_w > 0 else None
    rep = ConvergenceReport()
    m0 = state.mass(grid)
    snap_t = selfsim_t0
    prev_snap = None
    while True:
        mass_before = state.mass(grid)
        infl = state.inflow
        prev = state.rho
        t_before = state.t
        dt_cap = None
        if state.t < snap_t:
            # land exactly on the snapshot times
            R, P = apply_bcs(state, grid, g, fs)
            dt_full = cfl * min(grid.hx, grid.hy) / _max_speed_padded(R, P, grid, g)
            if state.t + dt_full > snap_t:
                dt_cap = snap_t - state.t
        if state.t + (dt_cap or 0.0) > t_max:
            dt_cap = t_max - state.t
        state = step(state, grid, g, fs, cfl, dt=dt_cap) if dt_cap else step(state, grid, g, fs, cfl)
        if observer is not None:
            observer(state)
        dm = state.mass(grid) - mass_before - (state.inflow - infl)
        rep.max_step_mass_error = max(rep.max_step_mass_error, abs(dm) / m0)
        if abs(state.t - snap_t) <= 1e-12 * snap_t:
            if prev_snap is not None:
                rep.selfsim_times.append(0.5 * snap_t)
                rep.selfsim_series.append(selfsim_defect(prev_snap, state.rho, grid))
            prev_snap = state.rho.copy()
            snap_t *= 2.0
        done_time = state.t >= t_max * (1 - 1e-12)
        if state.steps % check_every == 0 or done_time:
            res = float(np.sum(np.abs(state.rho - prev))) * grid.cell_area / (state.t - t_before)
            rep.times.append(state.t)
            rep.residual_series.append(res)
            rep.l1_series.append(l1_defect(state, grid, fs, ref, radius) if ref else 0.0)
            if res < tol:
                rep.converged = True
                break
        if done_time:
            break
    rep.steps = state.steps
    rep.mass_error = abs(state.mass(grid) - m0 - state.inflow) / m0
    fit = fit_shock(state, grid, g, fs)
    if not rep.converged and raise_on_nonconvergence:
        raise NonConvergence(f"t_max={t_max} reached with residual {rep.residual_series[-1]:.3e}",
                             state=state, fit=fit, report=rep)
    return state, fit, rep

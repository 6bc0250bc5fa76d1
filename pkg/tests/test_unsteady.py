import math

import numpy as np
import pytest

from oracles import FROZEN
from wedgeflow import (AIR, CflViolation, Grid2D, NonConvergence, NotSupersonic, ValidationError,
                       VacuumError, fit_shock, init_uniform, run_to_steady, step)
from wedgeflow.unsteady import (_fluxes, apply_bcs, init_shock_state, l1_defect, shock_field,
                                wall_normal_velocity, weak_shock_field)

TH = math.radians(10)
GRID = Grid2D.box(32, 16)
WEAK_BETA = math.radians(FROZEN["pot_weak_beta_10_deg"])


def test_init_is_free_stream():
    s, fs = init_uniform(GRID, AIR, 2.0, 1.0, TH)
    assert np.all(s.rho == 1.0)
    # the wall sees the full normal component of the incoming flow
    assert wall_normal_velocity(s, GRID, fs) == pytest.approx(2.0 * math.sin(TH), rel=1e-13)
    assert s.B == pytest.approx(0.5 * 4.0, abs=1e-15)


def test_aligned_wall_is_a_fixed_point():
    s, fs = init_uniform(GRID, AIR, 2.0, 1.0, 0.0)
    t = s
    for _ in range(20):
        t = step(t, GRID, AIR, fs)
    assert np.max(np.abs(t.rho - s.rho)) < 1e-14
    assert np.max(np.abs(t.phi - s.phi)) < 1e-14
    st, fit, rep = run_to_steady(GRID, AIR, 2.0, 1.0, 0.0, check_every=1)
    assert rep.converged and rep.residual_series[-1] < 1e-12
    assert fit is None


def test_first_step_only_touches_the_wall_row():
    s, fs = init_uniform(GRID, AIR, 2.0, 1.0, TH)
    s1 = step(s, GRID, AIR, fs)
    d = np.abs(s1.rho - s.rho) + np.abs(s1.phi - s.phi)
    changed = np.flatnonzero(d.max(axis=0) > 1e-13)
    assert list(changed) == [0]


def test_wall_normal_velocity_relaxes():
    s, fs = init_uniform(GRID, AIR, 2.0, 1.0, TH)
    w0 = wall_normal_velocity(s, GRID, fs)
    s = step(s, GRID, AIR, fs)
    w1 = wall_normal_velocity(s, GRID, fs)
    assert w1 < w0
    # regression value of this scheme on the 32x16 box
    assert w1 == pytest.approx(0.3155494288468248, rel=1e-10)


def test_ghost_cells():
    rng = np.random.default_rng(3)
    s, fs = init_uniform(GRID, AIR, 2.0, 1.0, TH)
    s.rho = 1.0 + 0.1 * rng.random(s.rho.shape)
    s.phi = s.phi + 0.01 * rng.random(s.phi.shape)
    R, P = apply_bcs(s, GRID, AIR, fs)
    np.testing.assert_array_equal(R[1:-1, 0], R[1:-1, 1])
    np.testing.assert_array_equal(P[1:-1, 0], P[1:-1, 1])
    assert np.all(R[0, :] == 1.0) and np.all(R[1:-1, -1] == 1.0)
    # free-stream ghosts carry the incoming velocity exactly
    assert np.allclose(np.diff(P[0, :]) / GRID.hy, -2.0 * math.sin(TH), rtol=1e-12)


def test_mass_telescopes_against_boundary_fluxes():
    s, fs = init_uniform(GRID, AIR, 2.0, 1.0, TH)
    m0 = s.mass(GRID)
    net = 0.0
    for _ in range(100):
        R, P = apply_bcs(s, GRID, AIR, fs)
        Fx, Fy, _, _ = _fluxes(R, P, GRID, AIR)
        t0, m_before = s.t, s.mass(GRID)
        s = step(s, GRID, AIR, fs)
        dt = s.t - t0
        flux = dt * (GRID.hy * (Fx[0].sum() - Fx[-1].sum()) + GRID.hx * (Fy[:, 0].sum() - Fy[:, -1].sum()))
        assert abs(s.mass(GRID) - m_before - flux) / m0 < 1e-12
        net += flux
    assert abs(s.mass(GRID) - m0 - net) / m0 < 1e-10
    assert abs(s.inflow - net) / m0 < 1e-12


def test_wall_flux_vanishes():
    s, fs = init_uniform(GRID, AIR, 2.0, 1.0, TH)
    for _ in range(10):
        s = step(s, GRID, AIR, fs)
    R, P = apply_bcs(s, GRID, AIR, fs)
    _, Fy, _, _ = _fluxes(R, P, GRID, AIR)
    assert np.all(Fy[:, 0] == 0.0)


def test_mirror_bitwise():
    sb, fb = init_uniform(GRID, AIR, 2.0, 1.0, TH, "bottom")
    st, ft = init_uniform(GRID, AIR, 2.0, 1.0, TH, "top")
    for _ in range(60):
        sb = step(sb, GRID, AIR, fb)
        st = step(st, GRID, AIR, ft)
    assert sb.t == st.t
    np.testing.assert_array_equal(sb.rho, st.rho[:, ::-1])
    np.testing.assert_array_equal(sb.phi, st.phi[:, ::-1])


def test_errors():
    with pytest.raises(NotSupersonic):
        init_uniform(GRID, AIR, 0.9, 1.0, TH)
    with pytest.raises(ValidationError):
        Grid2D.box(8, 8)
    s, fs = init_uniform(GRID, AIR, 2.0, 1.0, TH)
    with pytest.raises(ValidationError):
        step(s, GRID, AIR, fs, cfl=0.6)
    with pytest.raises(CflViolation):
        step(s, GRID, AIR, fs, dt=0.1)
    # a checkerboard potential drains a near-vacuum cell within one step
    bad = s.copy()
    bad.rho[5, 5] = 1e-4
    bad.phi[::2, ::2] += 3.0 * GRID.hx
    with pytest.raises(VacuumError):
        step(bad, GRID, AIR, fs, cfl=0.5)
    with pytest.raises(NonConvergence) as exc:
        run_to_steady(GRID, AIR, 2.0, 1.0, TH, t_max=0.05)
    assert exc.value.report.steps > 0


def test_fit_shock_uniform_is_none():
    s, fs = init_uniform(GRID, AIR, 2.0, 1.0, 0.0)
    assert fit_shock(s, GRID, AIR, fs) is None


def test_l1_defect_of_the_exact_field_is_small():
    grid = Grid2D.box(200, 100)
    ref = weak_shock_field(AIR, 2.0, 1.0, TH)
    assert ref.beta == pytest.approx(WEAK_BETA, abs=1e-10)
    s, fs = init_uniform(grid, AIR, 2.0, 1.0, TH)
    X, Y = np.meshgrid(grid.xc(), grid.yc(), indexing="ij")
    vx, vy, rho = ref.evaluate(X, Y)
    below = Y < math.tan(ref.angle) * X
    s.rho = rho
    s.phi = np.where(below, ref.v1[0] * X, ref.v0[0] * X + ref.v0[1] * Y)
    # tangential velocity is continuous, so v0.x and v1.x agree on the shock line
    # and only cells cut by it (or on the box edges) contribute
    assert l1_defect(s, grid, fs, ref) < 0.02


def test_refinement_is_monotone(unsteady_400):
    errs = []
    for n in (100, 200):
        _, fit, _ = run_to_steady(Grid2D.box(n, n // 2), AIR, 2.0, 1.0, TH)
        errs.append(abs(fit.angle - WEAK_BETA))
    errs.append(abs(unsteady_400[1].angle - WEAK_BETA))
    assert errs[0] > errs[1] > errs[2]


def test_strong_shock_start():
    s, fs = init_shock_state(GRID, AIR, 2.0, 1.0, TH, "strong")
    strong = shock_field(AIR, 2.0, 1.0, TH, "strong")
    assert strong.beta == pytest.approx(math.radians(FROZEN["pot_strong_beta_10_deg"]), abs=1e-10)
    assert set(np.unique(s.rho)) == {1.0, strong.rho1}
    with pytest.raises(ValidationError):
        init_shock_state(GRID, AIR, 2.0, 1.0, 0.0)
    with pytest.raises(ValidationError):
        run_to_steady(GRID, AIR, 2.0, 1.0, TH, init="sideways")


def test_strong_start_leaves_the_strong_shock():
    # exploratory: started on the exact strong shock, the coarse run drifts
    # to the weak one (observed, recorded here as a regression)
    grid = Grid2D.box(64, 32)
    _, fit, rep = run_to_steady(grid, AIR, 2.0, 1.0, TH, init="strong", t_max=4.0,
                                raise_on_nonconvergence=False)
    strong = math.radians(FROZEN["pot_strong_beta_10_deg"])
    assert abs(fit.angle - WEAK_BETA) < math.radians(1.5)
    assert abs(fit.angle - strong) > 10 * abs(fit.angle - WEAK_BETA)
    assert rep.l1_series[-1] < 0.05 * rep.l1_series[0]

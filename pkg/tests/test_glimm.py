import math

import numpy as np
import pytest

from wedgeflow import (AIR, AxiallySubsonic, CflViolation, InsufficientData, MarchConfig,
                       NotSupersonic, ValidationError, WedgeGeometry, asymptotics_estimate,
                       critical_angles, make_cauchy_data, march, state_from_mach, straight_wedge,
                       wedge_solutions)
from wedgeflow.glimm import van_der_corput

TH = math.radians(10)
BG = state_from_mach(2.0, AIR)
WEAK = wedge_solutions(BG, TH, AIR).weak
SMALL = MarchConfig(dx2=0.1, x1_max=8.0)


def test_van_der_corput():
    assert [van_der_corput(n) for n in range(1, 8)] == [0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875]
    seq = np.array([van_der_corput(n) for n in range(1, 1025)])
    assert abs(seq.mean() - 0.5) < 1e-3


@pytest.mark.parametrize("kind,amp,tv", [("constant", 0.3, 0.0), ("step", 0.01, 0.01),
                                         ("bump", 0.01, 0.02), ("sawtooth", 0.01, 0.08)])
def test_cauchy_tv(kind, amp, tv):
    d = make_cauchy_data(kind, amp, BG)
    assert d.tv["p"] == pytest.approx(tv, abs=1e-12)
    assert d.total_tv == pytest.approx(tv, abs=1e-12)
    assert d.is_constant == (tv == 0.0)


def test_cauchy_profile_values():
    d = make_cauchy_data("step", 0.01, BG, center=5.0)
    p = d.at(np.array([0.0, 4.999, 5.0, 9.0]))[2]
    assert list(p) == [1.0, 1.0, 1.01, 1.01]
    h = make_cauchy_data("bump", 0.01, BG, center=5.0, width=4.0)
    assert list(h.at(np.array([3.0, 4.0, 5.0, 6.0, 7.5]))[2]) == pytest.approx([1.0, 1.005, 1.01, 1.005, 1.0],
                                                                              rel=1e-15)
    c = make_cauchy_data("constant", 0.0, BG)
    assert all(np.all(v == b) for v, b in zip(c.at(np.linspace(0, 20, 7)), BG.as_tuple()))


def test_cauchy_rejects():
    with pytest.raises(NotSupersonic):
        make_cauchy_data("step", 0.05, state_from_mach(1.001, AIR))
    with pytest.raises(ValidationError):
        make_cauchy_data("step", -1.0, BG)
    with pytest.raises(ValidationError):
        make_cauchy_data("wiggle", 0.1, BG)


def test_wedge_geometry():
    geom = WedgeGeometry(TH, (0.0, 2.0, 5.0), (0.0, 0.01, -0.02))
    assert float(geom.b(1.0)) == 0.0
    assert float(geom.b(4.0)) == pytest.approx(0.02, rel=1e-14)
    assert float(geom.b(6.0)) == pytest.approx(0.03 - 0.02, rel=1e-12)
    assert geom.tv_slope == pytest.approx(0.04, rel=1e-14)
    assert float(geom.wall_angle(3.0)) == pytest.approx(TH + math.atan(0.01))
    with pytest.raises(ValidationError):
        WedgeGeometry(TH, (0.0,), (0.01,))
    with pytest.raises(ValidationError):
        WedgeGeometry(TH, (0.0, 1.0), (0.0,))


def test_config_validation():
    with pytest.raises(ValidationError):
        MarchConfig(cfl=1.0)
    with pytest.raises(ValidationError):
        MarchConfig(dx2=0.0)


def test_unperturbed_background_exact():
    data = make_cauchy_data("constant", 0.0, BG)
    fld, front, diag = march(straight_wedge(TH), data, SMALL, AIR)
    assert np.max(np.abs(front.sigma_slope - math.tan(WEAK.beta))) < 1e-12
    assert np.all(diag.tv_below == 0.0)
    assert np.max(np.abs(fld.p / WEAK.downstream.p - 1.0)) < 1e-12
    assert diag.slip_defect == 0.0
    assert front.sigma[0] == 0.0
    assert np.all(front.sigma[1:] > front.x1[1:] * math.tan(TH))


def test_consistency_under_refinement():
    # the unperturbed front is reproduced to roundoff at every resolution,
    # so the refinement factor is not measurable here
    data = make_cauchy_data("constant", 0.0, BG)
    for dx2 in (0.2, 0.1):
        _, front, _ = march(straight_wedge(TH), data, MarchConfig(dx2=dx2, x1_max=6.0), AIR)
        assert np.max(np.abs(front.sigma_slope - math.tan(WEAK.beta))) < 1e-12


def test_step_perturbation_small_run():
    data = make_cauchy_data("step", 0.01, BG, center=1.0, width=1.0)
    fld, front, diag = march(straight_wedge(TH), data, SMALL, AIR)
    assert np.all(np.isfinite(diag.tv_per_slice))
    assert diag.max_tv <= 8.0 * data.total_tv
    assert np.all(front.sigma[1:] > front.x1[1:] * math.tan(TH))
    assert diag.slip_defect < 10 * SMALL.dx2


def test_determinism_and_seed():
    data = make_cauchy_data("bump", 0.005, BG, center=1.5, width=2.0)
    r1 = march(straight_wedge(TH), data, SMALL, AIR)
    r2 = march(straight_wedge(TH), data, SMALL, AIR)
    assert np.array_equal(r1[1].sigma, r2[1].sigma)
    assert np.array_equal(r1[0].p, r2[0].p)
    assert np.array_equal(r1[2].tv_per_slice, r2[2].tv_per_slice)
    r3 = march(straight_wedge(TH), data, MarchConfig(dx2=0.1, x1_max=8.0, seed=7), AIR)
    assert not np.array_equal(r1[1].sigma, r3[1].sigma)


def test_wall_slope_returning_to_zero():
    geom = WedgeGeometry(TH, (0.0, 1.0, 3.0), (0.0, 0.01, 0.0))
    data = make_cauchy_data("constant", 0.0, BG)
    _, front, diag = march(geom, data, MarchConfig(dx2=0.1, x1_max=12.0), AIR)
    a = asymptotics_estimate(diag, 0.25)
    assert abs(a.angle_inf - 0.0) < 2 * 0.1
    assert a.b_slope_inf == 0.0
    B = front.x1 * math.tan(TH) + geom.b(front.x1)
    assert np.all(front.sigma[1:] > B[1:])


def test_asymptotics_errors():
    data = make_cauchy_data("constant", 0.0, BG)
    _, _, diag = march(straight_wedge(TH), data, MarchConfig(dx2=0.2, x1_max=1.0), AIR)
    with pytest.raises(InsufficientData):
        asymptotics_estimate(diag, 0.05)
    with pytest.raises(ValidationError):
        asymptotics_estimate(diag, 1.5)


def test_cfl_violation():
    data = make_cauchy_data("constant", 0.0, BG)
    with pytest.raises(CflViolation):
        march(straight_wedge(TH), data, MarchConfig(dx2=0.1, x1_max=1.0, dx1=1.0), AIR)


def test_axially_subsonic_reports_slice():
    bg = state_from_mach(1.8, AIR)
    th = 0.98 * critical_angles(bg, AIR).theta_s
    data = make_cauchy_data("constant", 0.0, bg)
    with pytest.raises(AxiallySubsonic) as exc:
        march(straight_wedge(th), data, MarchConfig(dx2=0.1, x1_max=2.0), AIR)
    assert exc.value.slice_index == 0


def test_wall_angle_beyond_sonic_rejected():
    geom = straight_wedge(math.radians(23))
    with pytest.raises((ValidationError, Exception)):
        march(geom, make_cauchy_data("constant", 0.0, BG), SMALL, AIR)

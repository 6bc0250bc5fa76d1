"""The frozen oracle values still follow from the oracle procedures."""
import math

import pytest

import oracles as o

F = o.FROZEN
R10 = math.radians(10)


def test_euler_angles_frozen():
    assert math.degrees(o.euler_theta_d(2, 1.4)[0]) == pytest.approx(F["euler_theta_d_deg"], abs=1e-9)
    assert math.degrees(o.euler_theta_s(2, 1.4)[0]) == pytest.approx(F["euler_theta_s_deg"], abs=1e-9)
    w, s = o.euler_wedge_betas(2, R10, 1.4)
    assert math.degrees(w) == pytest.approx(F["euler_weak_beta_10_deg"], abs=1e-10)
    assert math.degrees(s) == pytest.approx(F["euler_strong_beta_10_deg"], abs=1e-10)


def test_potential_angles_frozen():
    assert math.degrees(o.potential_theta_d(2, 1, 1.4)[0]) == pytest.approx(F["pot_theta_d_deg"], abs=1e-9)
    assert math.degrees(o.potential_theta_s(2, 1, 1.4)[0]) == pytest.approx(F["pot_theta_s_deg"], abs=1e-9)
    w, s = o.potential_wedge_betas(2, 1, R10, 1.4)
    assert math.degrees(w) == pytest.approx(F["pot_weak_beta_10_deg"], abs=1e-9)
    assert math.degrees(s) == pytest.approx(F["pot_strong_beta_10_deg"], abs=1e-9)


def test_selfsim_shock_frozen():
    s1, rho2, k2, _ = o.selfsim_normal_shock(2, 1, R10, 1.4)
    assert s1 == pytest.approx(F["ss_s1_10"], rel=1e-12)
    assert rho2 == pytest.approx(F["ss_rho2_10"], rel=1e-12)


def test_textbook_anchor_values():
    # standard tables: M=2 normal shock has p ratio 4.5 and density ratio 8/3
    rr, pr, mn2 = o.normal_shock_ratios(2.0, 1.4)
    assert rr == pytest.approx(8 / 3, rel=1e-14)
    assert pr == pytest.approx(4.5, rel=1e-14)
    assert mn2 == pytest.approx(0.5773502691896257, rel=1e-12)
    assert F["euler_theta_d_deg"] == pytest.approx(22.97, abs=0.01)
    assert F["euler_theta_s_deg"] == pytest.approx(22.71, abs=0.01)

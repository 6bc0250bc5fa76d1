import math

import numpy as np
import pytest

from wedgeflow import (AIR, AxiallySubsonic, DetachedError, EulerPrimitive, boundary_riemann,
                       char_speeds, downstream_from_beta, specific_entropy, state_from_mach,
                       steady_riemann, total_enthalpy, wave_curve, wedge_solutions)
from wedgeflow.steady_waves import solve_riemann_arrays, wave_turning

G = AIR.gamma
M2 = state_from_mach(2.0, AIR)


def test_char_speeds_mach2():
    s = EulerPrimitive(2.0, 0.0, 1.0, 1.4)  # c = 1
    cs = char_speeds(s, AIR)
    assert cs.lambda_plus == pytest.approx(1 / math.sqrt(3), rel=1e-14)
    assert cs.lambda_minus == pytest.approx(-1 / math.sqrt(3), rel=1e-14)
    assert cs.lambda_0 == 0.0


@pytest.mark.parametrize("delta", [1e-3, 0.05, -0.1])
def test_char_speeds_rotate_with_frame(delta):
    s = EulerPrimitive(2.0, 0.0, 1.0, 1.4)
    a, b = char_speeds(s, AIR), char_speeds(s.rotated(delta), AIR)
    for f in ("lambda_minus", "lambda_0", "lambda_plus"):
        assert math.atan(getattr(b, f)) - math.atan(getattr(a, f)) == pytest.approx(delta, abs=1e-12)


def test_char_speeds_match_mach_wave():
    mach_wave = downstream_from_beta(M2, math.asin(0.5), AIR)
    assert char_speeds(M2, AIR).lambda_plus == pytest.approx(mach_wave.slope, rel=1e-14)


def test_axially_subsonic():
    with pytest.raises(AxiallySubsonic):
        char_speeds(state_from_mach(2.0, AIR, angle=math.radians(70)), AIR)


def test_wave_curve_identity_and_shock_branch():
    th, s = wave_curve("above", M2, M2.p, AIR)
    assert th == 0.0 and s.p == M2.p and s.rho == pytest.approx(M2.rho, rel=1e-15)
    sh = downstream_from_beta(M2, math.radians(45), AIR)
    th, s = wave_curve("above", M2, sh.downstream.p, AIR)
    assert th == pytest.approx(sh.deflection, abs=1e-12)
    for a, b in zip(s.as_tuple(), sh.downstream.as_tuple()):
        assert a == pytest.approx(b, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("side,sign", [("above", 1.0), ("below", -1.0)])
def test_wave_curve_derivative(side, sign):
    M = 2.0
    p = M2.p
    h = 1e-7 * p
    plus = wave_curve(side, M2, p + h, AIR)[0]
    minus = wave_curve(side, M2, p - h, AIR)[0]
    exact = sign * math.sqrt(M * M - 1) / (G * p * M * M)
    assert (plus - minus) / (2 * h) == pytest.approx(exact, rel=1e-6)
    # one-sided slopes agree: the two branches join with matching derivative
    right = (plus - wave_curve(side, M2, p, AIR)[0]) / h
    left = (wave_curve(side, M2, p, AIR)[0] - minus) / h
    assert right == pytest.approx(left, rel=1e-5)


def test_simple_wave_invariants():
    S0, H0 = specific_entropy(M2, AIR), total_enthalpy(M2, AIR)
    for pt in np.linspace(0.2, 0.999, 25):
        _, s = wave_curve("above", M2, float(pt), AIR)
        assert specific_entropy(s, AIR) == pytest.approx(S0, abs=1e-10)
        assert total_enthalpy(s, AIR) == pytest.approx(H0, rel=1e-10)


def test_riemann_trivial_fan():
    fan = steady_riemann(M2, M2, AIR)
    assert all(w.kind == "null" for w in fan.waves)
    assert fan.p_star == M2.p and fan.theta_star == 0.0


def test_riemann_single_polar_shock():
    sh = wedge_solutions(M2, math.radians(10), AIR).weak
    fan = steady_riemann(M2, sh.downstream, AIR)
    kinds = [w.kind for w in fan.waves]
    assert kinds == ["null", "null", "shock"]
    assert fan.p_star == pytest.approx(sh.downstream.p, rel=1e-12)
    assert fan.theta_star == pytest.approx(math.radians(10), abs=1e-12)
    assert fan.waves[2].angles[0] == pytest.approx(sh.beta, abs=1e-10)


def test_riemann_mirror_bitwise():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = state_from_mach(2 + rng.uniform(-0.3, 0.3), AIR, rng.uniform(0.8, 1.2), rng.uniform(0.8, 1.2),
                            rng.uniform(-0.05, 0.05))
        b = state_from_mach(2 + rng.uniform(-0.3, 0.3), AIR, rng.uniform(0.8, 1.2), rng.uniform(0.8, 1.2),
                            rng.uniform(-0.05, 0.05))
        f = steady_riemann(a, b, AIR)
        m = steady_riemann(b.mirrored(), a.mirrored(), AIR)
        assert m.p_star == f.p_star
        assert m.theta_star == -f.theta_star
        assert [w.kind for w in m.waves] == [w.kind for w in reversed(f.waves)]


def _split_fans(n, seed):
    """Random Riemann data built outward from a known middle (p*, th*)."""
    rng = np.random.default_rng(seed)
    p_star = rng.uniform(0.6, 1.6, n)
    th_star = rng.uniform(-0.15, 0.15, n)
    # side states: pick (p, rho, Mach), then place the flow angle so the
    # wave to p_star lands exactly on th_star
    def side(sign):
        p = rng.uniform(0.7, 1.4, n)
        rho = rng.uniform(0.7, 1.4, n)
        M = rng.uniform(1.8, 3.0, n)
        q = M * np.sqrt(G * p / rho)
        delta = wave_turning(q, rho, p, p_star, G)[0]
        return q, th_star - sign * delta, p, rho
    return side(1.0), side(-1.0), p_star, th_star


def test_split_fan_recovery():
    above, below, p_star, th_star = _split_fans(1000, 11)
    fans = solve_riemann_arrays(below, above, G)
    assert np.max(np.abs(fans.p_star - p_star) / p_star) < 1e-9
    assert np.max(np.abs(fans.mb[1] - th_star)) < 1e-9
    assert np.max(np.abs(fans.ma[1] - th_star)) < 1e-9


def test_wave_slopes_ordered():
    above, below, _, _ = _split_fans(200, 5)
    fans = solve_riemann_arrays(below, above, G)
    lo1, hi1 = fans.angles1
    lo3, hi3 = fans.angles3
    assert np.all(lo1 <= hi1) and np.all(lo3 <= hi3)
    assert np.all(hi1 < fans.contact) and np.all(fans.contact < lo3)


def test_contact_only():
    b = state_from_mach(2.0, AIR, 1.0, 1.0, 0.03)
    a = state_from_mach(2.6, AIR, 1.0, 0.6, 0.03)
    fan = steady_riemann(a, b, AIR)
    assert [w.kind for w in fan.waves] == ["null", "slip-line", "null"]
    assert fan.p_star == 1.0 and fan.theta_star == pytest.approx(0.03, abs=1e-15)
    lo, hi = fan.middle_states
    assert lo.rho == b.rho and hi.rho == a.rho


def test_fan_sampling_between_waves():
    above, below, _, _ = _split_fans(1, 2)
    to_prim = lambda t: EulerPrimitive(t[0][0] * math.cos(t[1][0]), t[0][0] * math.sin(t[1][0]), t[2][0], t[3][0])
    fan = steady_riemann(to_prim(above), to_prim(below), AIR)
    (l1, h1), (c, _), (l3, h3) = fan.slopes()
    assert fan.sample(0.5 * (h1 + c)) == fan.middle_states[0]
    assert fan.sample(0.5 * (c + l3)) == fan.middle_states[1]
    # outer states pass through a (q, th) -> (u1, u2) round trip
    for got, want in ((fan.sample(h3 + 1.0), to_prim(above)), (fan.sample(l1 - 1.0), to_prim(below))):
        assert got.as_tuple() == pytest.approx(want.as_tuple(), rel=1e-14)


def test_boundary_riemann_cases():
    wave, st = boundary_riemann(M2, 0.0, AIR)
    assert wave.kind == "null" and st == M2
    sol = wedge_solutions(M2, math.radians(10), AIR).weak
    wave, st = boundary_riemann(M2, math.tan(math.radians(10)), AIR)
    assert wave.kind == "shock"
    assert wave.angles[0] == pytest.approx(sol.beta, abs=1e-10)
    assert st.p == pytest.approx(sol.downstream.p, rel=1e-12)
    assert st.angle == pytest.approx(math.radians(10), abs=1e-15)
    wave, st = boundary_riemann(M2, -math.tan(math.radians(5)), AIR)
    assert wave.kind == "simple-wave" and st.p < M2.p
    with pytest.raises(DetachedError):
        boundary_riemann(M2, math.tan(math.radians(25)), AIR)

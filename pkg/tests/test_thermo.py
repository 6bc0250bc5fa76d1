import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wedgeflow import (AIR, EulerPrimitive, GasModel, Regime, VacuumError, ValidationError,
                       classify_regime, potential_c2, potential_h, potential_p, rho_from_head,
                       sound_speed, specific_entropy, total_energy, total_enthalpy)
from wedgeflow.thermo import pressure_from_entropy

G53 = GasModel.from_gamma(5.0 / 3.0)


def test_gas_invariants():
    assert AIR.gamma == pytest.approx(1 + AIR.R / AIR.cv, rel=1e-12)
    with pytest.raises(ValidationError):
        GasModel.from_gamma(1.0)
    with pytest.raises(ValidationError):
        GasModel(gamma=1.4, R=1.0, cv=1.0)


def test_sound_speed_examples():
    assert sound_speed(EulerPrimitive(0, 0, 1.0, 1.4), AIR) == pytest.approx(1.0, rel=1e-15)
    assert sound_speed(EulerPrimitive(0, 0, 1.0, 1.0), AIR) == pytest.approx(math.sqrt(1.4))
    assert sound_speed(EulerPrimitive(0, 0, 2.0, 1.0), G53) == pytest.approx(math.sqrt(10 / 3))


def test_state_rejects_nonpositive():
    with pytest.raises(ValidationError):
        EulerPrimitive(1, 0, -1.0, 1.0)
    with pytest.raises(ValidationError):
        EulerPrimitive(1, 0, 1.0, 0.0)


def test_entropy_examples():
    rho = 1.7
    s = EulerPrimitive(0, 0, AIR.kappa * rho ** AIR.gamma, rho)
    assert specific_entropy(s, AIR) == pytest.approx(0.0, abs=1e-14)
    s2 = EulerPrimitive(0, 0, 2 * s.p, rho)
    assert specific_entropy(s2, AIR) - specific_entropy(s, AIR) == pytest.approx(AIR.cv * math.log(2))
    # post normal-shock state at M=2 carries more entropy
    up = EulerPrimitive(0, 0, 1.0, 1.0)
    down = EulerPrimitive(0, 0, 4.5, 8 / 3)
    assert specific_entropy(down, AIR) > specific_entropy(up, AIR)


@given(st.floats(1e-3, 1e3), st.floats(-5, 5))
def test_entropy_pressure_roundtrip(rho, S):
    p = pressure_from_entropy(rho, S, AIR)
    back = specific_entropy(EulerPrimitive(0, 0, p, rho), AIR)
    assert pressure_from_entropy(rho, back, AIR) == pytest.approx(p, rel=1e-12)


def test_energy_examples():
    s = EulerPrimitive(0, 0, 1.0, 1.0)
    assert total_energy(s, AIR) == pytest.approx(1 / 0.4)
    assert total_energy(EulerPrimitive(1, 0, 1, 1), AIR) == pytest.approx(3.0, rel=1e-15)
    assert total_enthalpy(EulerPrimitive(1, 0, 1, 1), AIR) == pytest.approx(4.0, rel=1e-15)


def test_potential_closure_examples():
    assert potential_h(1.0, AIR) == 0.0
    assert potential_h(2.0, AIR) == pytest.approx((2 ** 0.4 - 1) / 0.4, rel=1e-15)
    assert rho_from_head(0.0, AIR) == 1.0
    assert rho_from_head(potential_h(2.0, AIR), AIR) == pytest.approx(2.0, rel=1e-14)
    with pytest.raises(VacuumError):
        rho_from_head(-1 / (AIR.gamma - 1), AIR)


@settings(max_examples=200)
@given(st.floats(-3, 3), st.sampled_from([1.2, 1.4, 5 / 3]))
def test_head_roundtrip(log_rho, gamma):
    g = GasModel.from_gamma(gamma)
    rho = 10.0 ** log_rho
    assert rho_from_head(potential_h(rho, g), g) == pytest.approx(rho, rel=1e-12)


@pytest.mark.parametrize("rho", [1e-3, 0.3, 1.0, 7.0, 1e3])
def test_potential_fd_checks(rho):
    h = 1e-6 * rho
    dp = (potential_p(rho + h, AIR) - potential_p(rho - h, AIR)) / (2 * h)
    assert dp == pytest.approx(potential_c2(rho, AIR), rel=1e-6)
    dh = (potential_h(rho + h, AIR) - potential_h(rho - h, AIR)) / (2 * h)
    assert dh == pytest.approx(potential_c2(rho, AIR) / rho, rel=1e-6)


def test_regime_band_and_antisymmetry():
    assert classify_regime(1.0, 1.0).tag is Regime.SONIC
    assert classify_regime(1.0 + 5e-11, 1.0).tag is Regime.SONIC
    assert classify_regime(1.0 + 1e-8, 1.0).tag is Regime.SUPERSONIC
    for a, b in [(2.0, 1.0), (1.0 + 1e-9, 1.0), (0.3, 0.7)]:
        x, y = classify_regime(a, b).tag, classify_regime(b, a).tag
        assert {x, y} == {Regime.SUPERSONIC, Regime.SUBSONIC}

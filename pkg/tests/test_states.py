import math

import numpy as np
import pytest

from coulombsim.states import (GaussianState, StateLabel, apply_squeeze,
                               freefall_amplify, freefall_time_for_sigma,
                               minimum_uncertainty_state, quantum_ground_state,
                               sample, thermal_state, thermally_squeezed_state)
from coulombsim.units import CONSTANTS

from conftest import MASS, OMEGA, particle

HBAR = CONSTANTS.hbar


def test_thermal_room_temperature():
    s = thermal_state(particle(), 300.0)
    assert s.sigma_z == pytest.approx(1.4390877318634886e-07, rel=1e-12)
    assert s.sigma_p == pytest.approx(5.756350927453955e-19, rel=1e-12)
    assert s.mean_z == 0.0 and s.mean_p == 0.0
    assert s.label is StateLabel.THERMAL


def test_thermal_cooled_10mk():
    s = thermal_state(particle(), 0.01)
    assert s.sigma_z == pytest.approx(8.308576893788731e-10, rel=1e-12)


def test_thermal_zero_temperature_policy():
    with pytest.raises(ValueError, match="zero-temperature classical"):
        thermal_state(particle(), 0.0)
    floor = thermal_state(particle(), 0.0, quantum_floor=True)
    assert floor.label is StateLabel.QUANTUM_GROUND
    assert floor.sigma_z == quantum_ground_state(particle()).sigma_z


def test_thermal_sqrt_T_scaling():
    s1 = thermal_state(particle(), 100.0)
    s4 = thermal_state(particle(), 400.0)
    assert s4.sigma_z == pytest.approx(2 * s1.sigma_z, rel=1e-12)
    assert s4.sigma_p == pytest.approx(2 * s1.sigma_p, rel=1e-12)


def test_thermally_squeezed_identity_case():
    eq = thermal_state(particle(), 300.0)
    s = thermally_squeezed_state(particle(), 300.0, eq.sigma_z)
    assert s.sigma_z == pytest.approx(eq.sigma_z, rel=1e-12)
    assert s.sigma_p == pytest.approx(eq.sigma_p, rel=1e-12)


def test_thermally_squeezed_30nm_amplifies_momentum():
    eq = thermal_state(particle(), 300.0)
    s = thermally_squeezed_state(particle(), 300.0, 30e-9)
    assert s.sigma_z == 30e-9
    assert s.sigma_p / eq.sigma_p == pytest.approx(eq.sigma_z / 30e-9,
                                                   rel=1e-12)
    # ~4.8x amplification for the reference particle at room temperature
    assert s.sigma_p / eq.sigma_p == pytest.approx(4.797, rel=1e-3)


def test_thermally_squeezed_area_invariant():
    eq = thermal_state(particle(), 300.0)
    for target in (5e-9, 30e-9, 400e-9):
        s = thermally_squeezed_state(particle(), 300.0, target)
        assert s.sigma_z * s.sigma_p == pytest.approx(
            eq.sigma_z * eq.sigma_p, rel=1e-12)


def test_quantum_ground_state_reference():
    s = quantum_ground_state(particle())
    assert s.sigma_z == pytest.approx(3.6307227534610793e-12, rel=1e-12)
    assert s.sigma_z * s.sigma_p == pytest.approx(HBAR / 2, rel=1e-12)
    assert s.label is StateLabel.QUANTUM_GROUND


def test_quantum_ground_state_omega_scaling():
    s1 = quantum_ground_state(particle())
    s4 = quantum_ground_state(particle(omega=4 * OMEGA))
    assert s4.sigma_z == pytest.approx(s1.sigma_z / 2, rel=1e-12)


def test_minimum_uncertainty_state():
    s = minimum_uncertainty_state(1e-11)
    assert s.sigma_z == 1e-11
    assert s.sigma_z * s.sigma_p == pytest.approx(HBAR / 2, rel=1e-12)


def test_apply_squeeze_identity_and_group():
    s = quantum_ground_state(particle())
    assert apply_squeeze(s, 1.0) is s
    a, b = 1.15, 1.96
    left = apply_squeeze(apply_squeeze(s, a), b)
    right = apply_squeeze(s, a * b)
    assert left.sigma_z == pytest.approx(right.sigma_z, rel=1e-12)
    assert left.sigma_p == pytest.approx(right.sigma_p, rel=1e-12)
    assert left.label is StateLabel.QUANTUM_SQUEEZED


def test_apply_squeeze_preserves_uncertainty_product():
    s = quantum_ground_state(particle())
    for xi in (0.3, 1.5, 7.0):
        out = apply_squeeze(s, xi)
        assert out.uncertainty_product == pytest.approx(
            s.uncertainty_product, rel=1e-12)


def test_squeeze_thermal_label():
    s = apply_squeeze(thermal_state(particle(), 300.0), 2.0)
    assert s.label is StateLabel.THERMAL_SQUEEZED


def test_freefall_identity_and_growth():
    s = quantum_ground_state(particle())
    assert freefall_amplify(s, 0.0, MASS) is s
    out = freefall_amplify(s, 1e-3, MASS)
    expected = math.sqrt(s.sigma_z ** 2 + (s.sigma_p * 1e-3 / MASS) ** 2)
    assert out.sigma_z == pytest.approx(expected, rel=1e-12)
    assert out.sigma_p == s.sigma_p
    assert out.uncertainty_product >= s.uncertainty_product
    assert out.label is StateLabel.FREEFALL_AMPLIFIED


def test_freefall_long_time_asymptote():
    s = quantum_ground_state(particle())
    t = 10.0
    out = freefall_amplify(s, t, MASS)
    assert out.sigma_z == pytest.approx(s.sigma_p * t / MASS, rel=1e-6)


def test_freefall_inversion_hits_quoted_target():
    # amplify a 0.01 nm minimum-uncertainty state to the 0.08 nm input level
    s = minimum_uncertainty_state(0.01e-9)
    t_ff = freefall_time_for_sigma(s, 0.08e-9, MASS)
    out = freefall_amplify(s, t_ff, MASS)
    assert out.sigma_z == pytest.approx(0.08e-9, rel=1e-12)


def test_freefall_ballistic_means():
    s = GaussianState(1e-9, 2e-22, 1e-11, 1e-24, StateLabel.CUSTOM)
    out = freefall_amplify(s, 1e-3, MASS)
    assert out.mean_z == pytest.approx(1e-9 + 2e-22 * 1e-3 / MASS, rel=1e-12)
    assert out.mean_p == s.mean_p
    assert out.label is StateLabel.CUSTOM


def test_quantum_invariant_enforced():
    with pytest.raises(ValueError, match="hbar/2"):
        GaussianState(0.0, 0.0, 1e-12, 1e-24, StateLabel.QUANTUM_GROUND)
    with pytest.raises(ValueError):
        GaussianState(0.0, 0.0, -1e-12, 1e-24)
    # delta states are fine for non-quantum labels
    GaussianState(0.0, 0.0, 0.0, 0.0, StateLabel.CUSTOM)


def test_sample_moments(rng):
    s = GaussianState(2e-9, -1e-22, 5e-9, 3e-22, StateLabel.CUSTOM)
    n = 100_000
    draws = sample(s, n, rng)
    assert abs(draws[:, 0].mean() - s.mean_z) < 4 * s.sigma_z / math.sqrt(n)
    assert abs(draws[:, 1].mean() - s.mean_p) < 4 * s.sigma_p / math.sqrt(n)
    assert draws[:, 0].std(ddof=1) == pytest.approx(s.sigma_z, rel=0.05)
    assert draws[:, 1].std(ddof=1) == pytest.approx(s.sigma_p, rel=0.05)
    corr = np.corrcoef(draws[:, 0], draws[:, 1])[0, 1]
    assert abs(corr) < 4 / math.sqrt(n)


def test_sample_deterministic():
    s = thermal_state(particle(), 300.0)
    a = sample(s, 100, np.random.default_rng(42))
    b = sample(s, 100, np.random.default_rng(42))
    assert np.array_equal(a, b)

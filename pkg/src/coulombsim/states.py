"""Initial phase-space Gaussians: thermal, squeezed, ground-state, freefall.

Quantum regimes are simulated by drawing classical initial conditions from
the (Gaussian, positive) Wigner distribution of the pure state and evolving
each draw under the classical equations of motion; thermal noise is off
there and damping applied per configuration.  Position and momentum are
uncorrelated in every preparation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .units import CONSTANTS, ParticleParams, PhysicalConstants


class StateLabel(Enum):
    THERMAL = "thermal"
    THERMAL_SQUEEZED = "thermal_squeezed"
    QUANTUM_GROUND = "quantum_ground"
    QUANTUM_SQUEEZED = "quantum_squeezed"
    FREEFALL_AMPLIFIED = "freefall_amplified"
    CUSTOM = "custom"


_QUANTUM_LABELS = {StateLabel.QUANTUM_GROUND, StateLabel.QUANTUM_SQUEEZED,
                   StateLabel.FREEFALL_AMPLIFIED}

# Relative slack on the minimum-uncertainty check for quantum labels.
_UNCERTAINTY_RTOL = 1e-9


@dataclass(frozen=True)
class GaussianState:
    """Per-particle Gaussian over (z, p); sigmas may be zero (delta) except
    for quantum labels, which must satisfy sigma_z*sigma_p >= hbar/2."""

    mean_z: float
    mean_p: float
    sigma_z: float
    sigma_p: float
    label: StateLabel = StateLabel.CUSTOM

    def __post_init__(self):
        if self.sigma_z < 0 or self.sigma_p < 0:
            raise ValueError("sigmas must be >= 0")
        if self.label in _QUANTUM_LABELS:
            bound = 0.5 * CONSTANTS.hbar * (1.0 - _UNCERTAINTY_RTOL)
            if self.sigma_z * self.sigma_p < bound:
                raise ValueError(
                    "quantum state violates sigma_z*sigma_p >= hbar/2: "
                    f"{self.sigma_z * self.sigma_p:.3e}")

    @property
    def uncertainty_product(self) -> float:
        return self.sigma_z * self.sigma_p


def thermal_state(params: ParticleParams, temperature: float, *,
                  quantum_floor: bool = False,
                  constants: PhysicalConstants = CONSTANTS) -> GaussianState:
    """Oscillator equilibrium state: sigma_z^2 = kT/(m w^2), sigma_p^2 = m kT.

    temperature <= 0 falls back to the ground state when quantum_floor is
    set and is rejected otherwise (a zero-temperature classical state has
    no extent).
    """
    if temperature <= 0:
        if quantum_floor:
            return quantum_ground_state(params, constants=constants)
        raise ValueError("zero-temperature classical state has no extent; "
                         "set quantum_floor=True for the ground-state floor")
    kT = constants.boltzmann_kB * temperature
    return GaussianState(
        mean_z=0.0, mean_p=0.0,
        sigma_z=math.sqrt(kT / (params.mass * params.trap_omega ** 2)),
        sigma_p=math.sqrt(params.mass * kT),
        label=StateLabel.THERMAL)


def thermally_squeezed_state(params: ParticleParams, temperature: float,
                             target_sigma_z: float, *,
                             constants: PhysicalConstants = CONSTANTS
                             ) -> GaussianState:
    """Out-of-equilibrium thermal state with sigma_z pinned to a target.

    The phase-space area of the equilibrium state is preserved: sigma_p is
    scaled by (thermal sigma_z / target).
    """
    if target_sigma_z <= 0:
        raise ValueError("target_sigma_z must be positive")
    eq = thermal_state(params, temperature, constants=constants)
    ratio = eq.sigma_z / target_sigma_z
    return GaussianState(
        mean_z=0.0, mean_p=0.0,
        sigma_z=target_sigma_z,
        sigma_p=eq.sigma_p * ratio,
        label=StateLabel.THERMAL_SQUEEZED)


def quantum_ground_state(params: ParticleParams, *,
                         constants: PhysicalConstants = CONSTANTS
                         ) -> GaussianState:
    """Minimum-uncertainty ground state: sigma_z = sqrt(hbar/(2 m w))."""
    mw = params.mass * params.trap_omega
    return GaussianState(
        mean_z=0.0, mean_p=0.0,
        sigma_z=math.sqrt(constants.hbar / (2.0 * mw)),
        sigma_p=math.sqrt(constants.hbar * mw / 2.0),
        label=StateLabel.QUANTUM_GROUND)


def minimum_uncertainty_state(sigma_z: float, *,
                              constants: PhysicalConstants = CONSTANTS
                              ) -> GaussianState:
    """Pure Gaussian with the given sigma_z and sigma_p = hbar/(2 sigma_z).

    Used where a quoted position spread is taken as a config input instead
    of being derived from (m, w).
    """
    if sigma_z <= 0:
        raise ValueError("sigma_z must be positive")
    return GaussianState(
        mean_z=0.0, mean_p=0.0,
        sigma_z=sigma_z,
        sigma_p=0.5 * constants.hbar / sigma_z,
        label=StateLabel.QUANTUM_SQUEEZED)


def apply_squeeze(state: GaussianState, xi: float) -> GaussianState:
    """Scale sigma_z by xi and sigma_p by 1/xi (uncertainty product fixed)."""
    if xi <= 0:
        raise ValueError("squeeze factor must be positive")
    if xi == 1.0:
        return state
    if state.label in _QUANTUM_LABELS:
        label = StateLabel.QUANTUM_SQUEEZED
    elif state.label in (StateLabel.THERMAL, StateLabel.THERMAL_SQUEEZED):
        label = StateLabel.THERMAL_SQUEEZED
    else:
        label = state.label
    return replace(state, sigma_z=state.sigma_z * xi,
                   sigma_p=state.sigma_p / xi, label=label)


def freefall_amplify(state: GaussianState, t_ff: float,
                     mass: float) -> GaussianState:
    """Trap-free ballistic evolution for t_ff: position spread grows as
    sqrt(sigma_z^2 + (sigma_p t/m)^2), momentum spread is unchanged, means
    move ballistically."""
    if t_ff < 0:
        raise ValueError("t_ff must be >= 0")
    if t_ff == 0.0:
        return state
    sigma_z = math.sqrt(state.sigma_z ** 2 + (state.sigma_p * t_ff / mass) ** 2)
    label = (StateLabel.FREEFALL_AMPLIFIED
             if state.label in _QUANTUM_LABELS else state.label)
    return replace(state,
                   mean_z=state.mean_z + state.mean_p * t_ff / mass,
                   sigma_z=sigma_z,
                   label=label)


def freefall_time_for_sigma(state: GaussianState, target_sigma_z: float,
                            mass: float) -> float:
    """Invert the ballistic spread law for the t_ff reaching target_sigma_z."""
    if target_sigma_z < state.sigma_z:
        raise ValueError("freefall cannot shrink sigma_z")
    if state.sigma_p == 0:
        raise ValueError("sigma_p = 0 state never spreads")
    return mass * math.sqrt(target_sigma_z ** 2 - state.sigma_z ** 2) / state.sigma_p


def sample(state: GaussianState, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n independent (z, p) pairs; returns an (n, 2) array.

    The generator must be exclusively owned by the caller (one stream per
    trajectory; never share a stream across concurrent samplers).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    x = rng.standard_normal((n, 2))
    out = np.empty((n, 2))
    out[:, 0] = state.mean_z + state.sigma_z * x[:, 0]
    out[:, 1] = state.mean_p + state.sigma_p * x[:, 1]
    return out

"""Physical constants, parameter records, and nondimensionalization.

All simulation arithmetic runs in nondimensional units built from the pair
(L0 = trap separation d, T0 = 1/omega_2, M0 = m_2); SI values appear only at
the I/O boundary.  This keeps internal numbers O(1) instead of ~1e-23.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants used by the simulator. Never user-set."""

    boltzmann_kB: float = 1.380649e-23          # J/K
    hbar: float = 1.054571817e-34               # J s
    vacuum_permittivity_eps0: float = 8.8541878128e-12  # C^2/(J m)

    def __post_init__(self):
        if min(self.boltzmann_kB, self.hbar, self.vacuum_permittivity_eps0) <= 0:
            raise ValueError("physical constants must be strictly positive")


CONSTANTS = PhysicalConstants()


class ForceMode(Enum):
    """Interaction model between the two particles."""

    FULL_COULOMB = "full"
    HARMONIC_COUPLED = "harmonic"
    COMPENSATED_CUBIC = "cubic"


@dataclass(frozen=True)
class ParticleParams:
    """One particle: mass, angular trap frequency, damping and bath.

    charge is optional and only used to derive the coupling strength.
    """

    mass: float                      # kg
    trap_omega: float                # rad/s
    charge: float | None = None      # C
    damping_rate: float = 0.0        # 1/s (Gamma, drag term m*Gamma*zdot)
    bath_temperature: float = 0.0    # K

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.trap_omega <= 0:
            raise ValueError(f"trap_omega must be positive, got {self.trap_omega}")
        if self.damping_rate < 0:
            raise ValueError("damping_rate must be >= 0")
        if self.bath_temperature < 0:
            raise ValueError("bath_temperature must be >= 0")


@dataclass(frozen=True)
class CouplingParams:
    """Coulomb coupling strength, equilibrium separation, and force model.

    compensation_residual_eps = 0 means the constant and linear parts of the
    expanded interaction are fully removed in the cubic mode; eps > 0 adds
    back that fraction of the suppressed linear term.
    """

    kappa: float                     # N m^2
    separation_d: float              # m
    force_mode: ForceMode = ForceMode.COMPENSATED_CUBIC
    compensation_residual_eps: float = 0.0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        if self.separation_d <= 0:
            raise ValueError("separation_d must be positive")
        if not 0.0 <= self.compensation_residual_eps <= 1.0:
            raise ValueError("compensation_residual_eps must be in [0, 1]")


@dataclass(frozen=True)
class SystemConfig:
    """Both particles, their coupling, and integration controls.

    z_cutoff_frac / s_min_frac are in units of the separation d.  dt is the
    SI substep target; None selects min(1/omega_1, 1/omega_2)/200.
    """

    particle1: ParticleParams
    particle2: ParticleParams
    coupling: CouplingParams
    regime: str = "symmetric"
    dt: float | None = None
    z_cutoff_frac: float = 0.5
    s_min_frac: float = 0.01
    noise_on_1: bool = True
    noise_on_2: bool = True

    def __post_init__(self):
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive when given")
        if self.z_cutoff_frac <= 0:
            raise ValueError("z_cutoff_frac must be positive")
        if self.s_min_frac <= 0:
            raise ValueError("s_min_frac must be positive")


def charge_to_kappa(q1: float, q2: float,
                    constants: PhysicalConstants = CONSTANTS) -> float:
    """Coupling strength kappa = q1*q2/(4 pi eps0) in N m^2."""
    return q1 * q2 / (4.0 * math.pi * constants.vacuum_permittivity_eps0)


@dataclass(frozen=True)
class UnitScales:
    """Base scales of the nondimensionalization and derived quantities.

    cubic_coupling_g = 3 kappa/(m2 w2^2 d^3) is the dimensionless strength
    of the cubic interaction (diagnostic; ~1.28 for the reference system).
    """

    length_L0: float
    time_T0: float
    mass_M0: float
    cubic_coupling_g: float = 0.0

    def __post_init__(self):
        if min(self.length_L0, self.time_T0, self.mass_M0) <= 0:
            raise ValueError("unit scales must be positive")

    @property
    def momentum_scale(self) -> float:
        return self.mass_M0 * self.length_L0 / self.time_T0

    @property
    def energy_scale(self) -> float:
        return self.mass_M0 * (self.length_L0 / self.time_T0) ** 2

    @property
    def force_scale(self) -> float:
        return self.energy_scale / self.length_L0


def make_unit_scales(config: SystemConfig) -> UnitScales:
    """Build the nondimensionalization from a system config.

    L0 = separation d, T0 = 1/omega_2, M0 = m_2.
    """
    d = config.coupling.separation_d
    m2 = config.particle2.mass
    w2 = config.particle2.trap_omega
    g = 3.0 * config.coupling.kappa / (m2 * w2 ** 2 * d ** 3)
    return UnitScales(length_L0=d, time_T0=1.0 / w2, mass_M0=m2,
                      cubic_coupling_g=g)


# Conversion factors by dimension name; value = SI per internal unit.
_DIMENSIONS = {
    "length": lambda s: s.length_L0,
    "time": lambda s: s.time_T0,
    "mass": lambda s: s.mass_M0,
    "momentum": lambda s: s.momentum_scale,
    "energy": lambda s: s.energy_scale,
    "force": lambda s: s.force_scale,
}


def to_internal(value, dimension: str, scales: UnitScales):
    """Convert an SI quantity to internal units. Unknown dimension raises."""
    try:
        factor = _DIMENSIONS[dimension](scales)
    except KeyError:
        raise ValueError(
            f"unknown dimension {dimension!r}; expected one of "
            f"{sorted(_DIMENSIONS)}") from None
    return value / factor


def from_internal(value, dimension: str, scales: UnitScales):
    """Inverse of to_internal."""
    try:
        factor = _DIMENSIONS[dimension](scales)
    except KeyError:
        raise ValueError(
            f"unknown dimension {dimension!r}; expected one of "
            f"{sorted(_DIMENSIONS)}") from None
    return value * factor

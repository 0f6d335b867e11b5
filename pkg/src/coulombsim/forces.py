"""Deterministic forces for every interaction mode, plus mean-field potentials.

Conventions
-----------
All positions are displacements from the two equilibria, and the distance
between equilibria is d.  The instantaneous separation is s = d - (z1 - z2):
with u = z1 - z2 the interaction potential kappa/s expands to

    kappa/d + kappa u/d^2 + kappa u^2/d^3 + kappa u^3/d^4 + ...

so the cubic term is +kappa u^3/d^4 and the interaction force on particle 2
is F2 = +dV/du, i.e. +3 kappa u^2/d^4 in the compensated-cubic mode.  The
interaction is reciprocal in every mode: F1 = -F2 exactly.

In the full-Coulomb mode the dynamics subtract the constant kappa/d^2
(electrostatic tilt compensation) so that z1 = z2 = 0 remains the
equilibrium; the raw +-kappa/s^2 force is available separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .units import CouplingParams, ForceMode, ParticleParams, UnitScales


def cubic_interaction_force(coupling: CouplingParams, z1, z2):
    """Interaction forces (F1, F2) of the compensated-cubic mode, in N.

    F2 = +(3 kappa/d^4)(z1-z2)^2 plus, for compensation residual eps > 0,
    eps times the suppressed linear term (2 kappa/d^3)(z1-z2).  F1 = -F2.
    """
    kappa, d = coupling.kappa, coupling.separation_d
    u = z1 - z2
    f2 = 3.0 * kappa / d ** 4 * u * u
    if coupling.compensation_residual_eps != 0.0:
        f2 = f2 + coupling.compensation_residual_eps * (2.0 * kappa / d ** 3) * u
    return -f2, f2


def harmonic_interaction_force(coupling: CouplingParams, z1, z2):
    """Linearized interaction forces (F1, F2): F2 = (2 kappa/d^3)(z1-z2)."""
    kappa, d = coupling.kappa, coupling.separation_d
    u = z1 - z2
    f2 = 2.0 * kappa / d ** 3 * u
    return -f2, f2


def full_coulomb_interaction_force(coupling: CouplingParams, z1, z2):
    """Raw Coulomb interaction forces (F1, F2) at separation s = d-(z1-z2).

    F2 = +kappa/s^2, F1 = -kappa/s^2 (repulsive pair for kappa > 0).  The
    caller is responsible for the validity guard |s| >= s_min; the dynamics
    censor trajectories that violate it.
    """
    kappa, d = coupling.kappa, coupling.separation_d
    s = d - (z1 - z2)
    f2 = kappa / (s * s)
    return -f2, f2


def interaction_potential(coupling: CouplingParams, z1, z2):
    """Interaction potential (J) whose negative gradient is the mode force.

    Cubic:    kappa u^3/d^4 + eps kappa u^2/d^3
    Harmonic: kappa u^2/d^3
    Full:     kappa/(d-u) - kappa u/d^2   (tilt-compensated)
    """
    kappa, d = coupling.kappa, coupling.separation_d
    u = z1 - z2
    mode = coupling.force_mode
    if mode is ForceMode.COMPENSATED_CUBIC:
        v = kappa * u ** 3 / d ** 4
        if coupling.compensation_residual_eps != 0.0:
            v = v + coupling.compensation_residual_eps * kappa * u ** 2 / d ** 3
        return v
    if mode is ForceMode.HARMONIC_COUPLED:
        return kappa * u ** 2 / d ** 3
    return kappa / (d - u) - kappa * u / d ** 2


@dataclass(frozen=True)
class ForceField:
    """Total deterministic force field for the configured interaction mode.

    interaction_force returns the equilibrium-referenced interaction used by
    the dynamics (in full mode the constant kappa/d^2 is subtracted);
    total_force adds the trap terms -m_i w_i^2 z_i.
    """

    coupling: CouplingParams
    particle1: ParticleParams
    particle2: ParticleParams

    @property
    def mode(self) -> ForceMode:
        return self.coupling.force_mode

    def interaction_force(self, z1, z2):
        mode = self.coupling.force_mode
        if mode is ForceMode.COMPENSATED_CUBIC:
            return cubic_interaction_force(self.coupling, z1, z2)
        if mode is ForceMode.HARMONIC_COUPLED:
            return harmonic_interaction_force(self.coupling, z1, z2)
        f1, f2 = full_coulomb_interaction_force(self.coupling, z1, z2)
        tilt = self.coupling.kappa / self.coupling.separation_d ** 2
        return f1 + tilt, f2 - tilt

    def total_force(self, z1, z2):
        f1, f2 = self.interaction_force(z1, z2)
        p1, p2 = self.particle1, self.particle2
        return (f1 - p1.mass * p1.trap_omega ** 2 * z1,
                f2 - p2.mass * p2.trap_omega ** 2 * z2)

    def potential(self, z1, z2):
        """Total potential energy (J): traps + mode interaction potential."""
        p1, p2 = self.particle1, self.particle2
        return (0.5 * p1.mass * p1.trap_omega ** 2 * z1 ** 2
                + 0.5 * p2.mass * p2.trap_omega ** 2 * z2 ** 2
                + interaction_potential(self.coupling, z1, z2))


def effective_potential_z2(coupling: CouplingParams, particle2: ParticleParams,
                           z2, mean_z1):
    """Mean-field one-body potential of particle 2 (J).

    V2(z2) = -3 kappa <z1>^2 z2/d^4 + w2t z2^2 - kappa z2^3/d^4 with the
    curvature coefficient w2t = m2 w2^2/2 + 3 kappa <z1>/d^4.
    """
    kappa, d = coupling.kappa, coupling.separation_d
    w2t = 0.5 * particle2.mass * particle2.trap_omega ** 2 \
        + 3.0 * kappa * mean_z1 / d ** 4
    return (-3.0 * kappa * mean_z1 ** 2 * z2 / d ** 4
            + w2t * z2 ** 2 - kappa * z2 ** 3 / d ** 4)


def effective_potential_z1(coupling: CouplingParams, particle1: ParticleParams,
                           z1, mean_z2):
    """Mean-field one-body potential of particle 1 (J).

    V1(z1) = +3 kappa <z2>^2 z1/d^4 + w1t z1^2 + kappa z1^3/d^4 with
    w1t = m1 w1^2/2 - 3 kappa <z2>/d^4; w1t crosses zero at the critical
    displacement, turning the confinement into an inverted potential.
    """
    kappa, d = coupling.kappa, coupling.separation_d
    w1t = 0.5 * particle1.mass * particle1.trap_omega ** 2 \
        - 3.0 * kappa * mean_z2 / d ** 4
    return (3.0 * kappa * mean_z2 ** 2 * z1 / d ** 4
            + w1t * z1 ** 2 + kappa * z1 ** 3 / d ** 4)


def critical_displacement(coupling: CouplingParams,
                          particle1: ParticleParams) -> float:
    """Mean displacement <z2> at which particle 1's confinement inverts.

    Returns m1 w1^2 d^4/(6 kappa); infinite (no instability) for kappa = 0.
    """
    if coupling.kappa == 0.0:
        return math.inf
    return (particle1.mass * particle1.trap_omega ** 2
            * coupling.separation_d ** 4 / (6.0 * coupling.kappa))


def kernel_coefficients(coupling: CouplingParams, particle1: ParticleParams,
                        particle2: ParticleParams, scales: UnitScales) -> dict:
    """Nondimensional drift coefficients consumed by the stepping kernels.

    g3: quadratic interaction coefficient (cubic mode), lin_c: linear
    interaction coefficient (residual in cubic mode, full strength in
    harmonic mode), gf: full-Coulomb prefactor kappa/(m2 w2^2 d^3);
    k_i: trap stiffness, inv_m1: m2/m1 (velocity factor of particle 1).
    """
    g = scales.cubic_coupling_g
    m_ratio = particle1.mass / particle2.mass
    w_ratio = particle1.trap_omega / particle2.trap_omega
    mode = coupling.force_mode
    if mode is ForceMode.COMPENSATED_CUBIC:
        g3 = g
        lin_c = coupling.compensation_residual_eps * (2.0 / 3.0) * g
        gf = 0.0
    elif mode is ForceMode.HARMONIC_COUPLED:
        g3 = 0.0
        lin_c = (2.0 / 3.0) * g
        gf = 0.0
    else:
        g3 = 0.0
        lin_c = 0.0
        gf = g / 3.0
    return {
        "mode": {ForceMode.COMPENSATED_CUBIC: 0,
                 ForceMode.FULL_COULOMB: 1,
                 ForceMode.HARMONIC_COUPLED: 2}[mode],
        "g3": g3,
        "lin_c": lin_c,
        "gf": gf,
        "k1": m_ratio * w_ratio ** 2,
        "k2": 1.0,
        "inv_m1": 1.0 / m_ratio,
    }

"""Ensemble simulator for two harmonically trapped charged particles coupled
by the cubic (first nonlinear) term of their Coulomb interaction.

The measurable effect: position noise or quantum uncertainty in particle 1
rectifies through the quadratic interaction force into a coherent momentum
displacement of particle 2, with a signal-to-noise ratio bounded by 1/sqrt(2).
"""

__version__ = "0.1.0"

from .ensemble import (CensorPolicy, EnsembleConfig, MomentSeries,
                       TargetCrossing, run_ensemble, snr_series,
                       target_crossing)
from .forces import (ForceField, critical_displacement, cubic_interaction_force,
                     effective_potential_z1, effective_potential_z2,
                     full_coulomb_interaction_force)
from .integrator import (SCHEME_ID, KernelParams, NoiseSpec, PhasePoint,
                         TrajectoryRecord, available_backends, get_backend,
                         integrate, step)
from .oracles import (OracleInput, classical_freq_tuned, classical_mass_tuned,
                      heuristic_drift, quantum_freq_tuned, quantum_mass_tuned,
                      snr_quadratic_bound)
from .states import (GaussianState, StateLabel, apply_squeeze,
                     freefall_amplify, freefall_time_for_sigma,
                     minimum_uncertainty_state, quantum_ground_state, sample,
                     thermal_state, thermally_squeezed_state)
from .units import (CONSTANTS, CouplingParams, ForceMode, ParticleParams,
                    PhysicalConstants, SystemConfig, UnitScales,
                    charge_to_kappa, from_internal, make_unit_scales,
                    to_internal)

__all__ = [name for name in dir() if not name.startswith("_")]

import numpy as np
import pytest

from coulombsim.units import (CouplingParams, ForceMode, ParticleParams,
                              SystemConfig)

# Reference system used throughout: two 8e-17 kg particles in 5e4 rad/s
# traps, 3 um apart, kappa = 2.3e-24 N m^2.
KAPPA = 2.3e-24
D = 3e-6
MASS = 8e-17
OMEGA = 5e4
GAMMA = 1e-4


def particle(mass=MASS, omega=OMEGA, gamma=0.0, bath_T=0.0):
    return ParticleParams(mass=mass, trap_omega=omega, damping_rate=gamma,
                          bath_temperature=bath_T)


def coupling(kappa=KAPPA, d=D, mode=ForceMode.COMPENSATED_CUBIC, eps=0.0):
    return CouplingParams(kappa=kappa, separation_d=d, force_mode=mode,
                          compensation_residual_eps=eps)


def system(kappa=KAPPA, mode=ForceMode.COMPENSATED_CUBIC, m1=MASS,
           omega1=OMEGA, gamma1=0.0, gamma2=0.0, bath_T1=0.0, bath_T2=0.0,
           noise1=False, noise2=False, eps=0.0, **kwargs):
    return SystemConfig(
        particle1=particle(mass=m1, omega=omega1, gamma=gamma1,
                           bath_T=bath_T1),
        particle2=particle(gamma=gamma2, bath_T=bath_T2),
        coupling=coupling(kappa=kappa, mode=mode, eps=eps),
        noise_on_1=noise1, noise_on_2=noise2, **kwargs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

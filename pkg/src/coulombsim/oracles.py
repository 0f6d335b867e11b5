"""Closed-form short-transient predictions used as the verification spine.

All functions are pure.  Sign convention follows the Langevin equations of
the simulator: the noise-induced momentum drift of particle 2 is positive.
The tuned-regime moments assume the driving particle starts with vanishing
velocity and the transient is short against the back-action timescale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SQRT2_INV = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class OracleInput:
    """Parameters entering the moment formulas (SI units)."""

    kappa: float
    d: float
    m1: float
    m2: float
    omega1: float
    omega2: float
    sigma_z1: float
    sigma_z2: float = 0.0
    sigma_p2: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        for name in ("kappa", "d", "m1", "m2", "omega1", "omega2",
                     "sigma_z1", "sigma_z2", "sigma_p2", "t"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.d == 0:
            raise ValueError("d must be positive")


def heuristic_drift(kappa: float, d: float, z1_sq_mean: float,
                    z2_sq_mean: float = 0.0, z1_mean: float = 0.0,
                    z2_mean: float = 0.0, t: float = 0.0) -> float:
    """Noise-driven momentum displacement of particle 2 for uncorrelated
    initial states: 3 kappa (<z1^2> - 2 <z2><z1> + <z2^2>) t / d^4."""
    return (3.0 * kappa * (z1_sq_mean - 2.0 * z2_mean * z1_mean + z2_sq_mean)
            * t / d ** 4)


def classical_mass_tuned(o: OracleInput) -> tuple[float, float]:
    """Heavy-particle-1 limit: mean = 3 kappa t sigma^2/d^4, SNR = 1/sqrt(2).

    The SNR is the chi-square value of a squared zero-mean Gaussian and is
    independent of every input.
    """
    mean = 3.0 * o.kappa * o.t * o.sigma_z1 ** 2 / o.d ** 4
    return mean, _SQRT2_INV


def classical_freq_tuned(o: OracleInput) -> tuple[float, float]:
    """Stiff-trap limit (omega1 >> omega2), vanishing initial velocity:
    mean = (3 kappa/(4 d^4 w1)) [2 theta + sin 2 theta] sigma^2 with
    theta = w1 t; SNR = 1/sqrt(2)."""
    theta = o.omega1 * o.t
    mean = (3.0 * o.kappa / (4.0 * o.d ** 4 * o.omega1)
            * (2.0 * theta + math.sin(2.0 * theta)) * o.sigma_z1 ** 2)
    return mean, _SQRT2_INV


def quantum_mass_tuned(o: OracleInput) -> tuple[float, float]:
    """Mass-tuned short transient with particle-2 Wigner noise.

    mean as in the classical case; SNR carries the suppression bracket
    [1 + m2^2 w2^4 d^8 s_z2^2/(18 k^2 s_z1^4)
       + d^8 s_p2^2/(18 k^2 s_z1^4 t^2)]^(-1/2).
    At t = 0 the momentum-noise term diverges and the SNR is defined as 0.
    """
    mean = 3.0 * o.kappa * o.t * o.sigma_z1 ** 2 / o.d ** 4
    if o.t == 0.0 or o.sigma_z1 == 0.0 or o.kappa == 0.0:
        return mean, 0.0
    denom = 18.0 * o.kappa ** 2 * o.sigma_z1 ** 4
    bracket = (1.0
               + o.m2 ** 2 * o.omega2 ** 4 * o.d ** 8 * o.sigma_z2 ** 2 / denom
               + o.d ** 8 * o.sigma_p2 ** 2 / (denom * o.t ** 2))
    return mean, _SQRT2_INV / math.sqrt(bracket)


def quantum_freq_tuned(o: OracleInput) -> tuple[float, float]:
    """Frequency-tuned short transient with particle-2 Wigner noise.

    mean as in the classical case; SNR bracket
    [1 + (8 w2^2 d^8 s_p2^2 + 8 w1^2 d^8 t^2 s_z2^2)
         /(9 k^2 s_z1^4 [2 theta + sin 2 theta]^2)]^(-1/2).
    """
    theta = o.omega1 * o.t
    phase = 2.0 * theta + math.sin(2.0 * theta)
    mean = (3.0 * o.kappa / (4.0 * o.d ** 4 * o.omega1)
            * phase * o.sigma_z1 ** 2)
    if o.t == 0.0 or o.sigma_z1 == 0.0 or o.kappa == 0.0 or phase == 0.0:
        return mean, 0.0
    denom = 9.0 * o.kappa ** 2 * o.sigma_z1 ** 4 * phase ** 2
    bracket = (1.0
               + (8.0 * o.omega2 ** 2 * o.d ** 8 * o.sigma_p2 ** 2
                  + 8.0 * o.omega1 ** 2 * o.d ** 8 * o.t ** 2
                  * o.sigma_z2 ** 2) / denom)
    return mean, _SQRT2_INV / math.sqrt(bracket)


def snr_quadratic_bound(n_samples: int, rng: np.random.Generator) -> float:
    """Monte Carlo SNR of y = z^2 for z ~ N(0,1); converges to 1/sqrt(2)
    (<y> = sigma^2, Var y = 2 sigma^4)."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    y = rng.standard_normal(n_samples) ** 2
    return float(y.mean() / y.std(ddof=1))

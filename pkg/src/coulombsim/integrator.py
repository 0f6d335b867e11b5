"""Underdamped Langevin integration in nondimensional units.

One substep = classical RK4 on the deterministic drift followed by a single
additive Gaussian increment sqrt(2 m Gamma kB T) * sqrt(dt) * xi on each
momentum (Ito and Stratonovich coincide for additive noise).  Trajectories
that leave |z_i| <= z_cut * d, lose a finite value, or (full-Coulomb mode)
approach contact are censored: integration stops and the censor time is
flagged rather than clamped.

The batch kernel exists twice: a compiled Cython core and a pure-NumPy
fallback with identical arithmetic, selected at import (override with the
COULOMBSIM_BACKEND environment variable; values "cython" or "numpy").
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _core_py as _numpy_core
from .forces import kernel_coefficients
from .units import CONSTANTS, SystemConfig, UnitScales, make_unit_scales

try:
    from . import _core as _compiled_core
except ImportError:
    _compiled_core = None

SCHEME_ID = "rk4-additive"

# Hard stability/accuracy guard on the substep (dt * max trap frequency).
MAX_DT_OMEGA = 0.1
# Default substep policy: min(1/w1, 1/w2)/200.
DT_POLICY_DIVISOR = 200.0


def available_backends() -> list[str]:
    names = ["numpy"]
    if _compiled_core is not None:
        names.insert(0, "cython")
    return names


def get_backend(name: str | None = None):
    """Return the kernel module. Default: compiled if built, else NumPy."""
    if name is None:
        name = os.environ.get("COULOMBSIM_BACKEND")
    if name is None:
        return _compiled_core if _compiled_core is not None else _numpy_core
    if name == "cython":
        if _compiled_core is None:
            raise RuntimeError("compiled backend requested but not built")
        return _compiled_core
    if name == "numpy":
        return _numpy_core
    raise ValueError(f"unknown backend {name!r} (use 'cython' or 'numpy')")


@dataclass(frozen=True)
class PhasePoint:
    """One phase-space point (nondimensional units)."""

    z1: float
    p1: float
    z2: float
    p2: float
    t: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.p1, self.z2, self.p2])


@dataclass(frozen=True)
class NoiseSpec:
    """Nondimensional thermal-noise amplitudes per particle.

    amp_i = sqrt(2 m_i Gamma_i kB T_i) / (M0 L0 / T0^(3/2)); enabled flags
    zero the corresponding amplitude.  Quantum scenarios disable both.
    """

    amp1: float = 0.0
    amp2: float = 0.0
    enabled1: bool = True
    enabled2: bool = True

    def __post_init__(self):
        if self.amp1 < 0 or self.amp2 < 0:
            raise ValueError("noise amplitudes must be >= 0")

    @property
    def sigma1(self) -> float:
        return self.amp1 if self.enabled1 else 0.0

    @property
    def sigma2(self) -> float:
        return self.amp2 if self.enabled2 else 0.0

    @property
    def has_noise(self) -> bool:
        return self.sigma1 > 0.0 or self.sigma2 > 0.0

    @classmethod
    def from_system(cls, system: SystemConfig,
                    scales: UnitScales) -> "NoiseSpec":
        kB = CONSTANTS.boltzmann_kB
        denom = scales.momentum_scale / math.sqrt(scales.time_T0)

        def amp(p):
            return math.sqrt(2.0 * p.mass * p.damping_rate
                             * kB * p.bath_temperature) / denom

        return cls(amp1=amp(system.particle1), amp2=amp(system.particle2),
                   enabled1=system.noise_on_1, enabled2=system.noise_on_2)


@dataclass(frozen=True)
class KernelParams:
    """Nondimensional drift coefficients and guards for the kernels."""

    mode: int
    g3: float
    lin_c: float
    gf: float
    k1: float
    k2: float
    inv_m1: float
    c1: float
    c2: float
    z_cut: float
    s_min: float
    omega_max_nd: float

    @classmethod
    def from_system(cls, system: SystemConfig,
                    scales: UnitScales | None = None) -> "KernelParams":
        if scales is None:
            scales = make_unit_scales(system)
        coeff = kernel_coefficients(system.coupling, system.particle1,
                                    system.particle2, scales)
        omega_ratio = system.particle1.trap_omega / system.particle2.trap_omega
        return cls(
            mode=coeff["mode"], g3=coeff["g3"], lin_c=coeff["lin_c"],
            gf=coeff["gf"], k1=coeff["k1"], k2=coeff["k2"],
            inv_m1=coeff["inv_m1"],
            c1=system.particle1.damping_rate * scales.time_T0,
            c2=system.particle2.damping_rate * scales.time_T0,
            z_cut=system.z_cutoff_frac,
            s_min=system.s_min_frac,
            omega_max_nd=max(omega_ratio, 1.0),
        )


@dataclass(frozen=True)
class TrajectoryRecord:
    """One realization sampled at requested times (nondimensional).

    states[0] is the initial point; censored rows are NaN.  censored implies
    no samples at or after censor_time.
    """

    times: np.ndarray          # (T+1,), includes the initial time
    states: np.ndarray         # (T+1, 4)
    censored: bool
    censor_time: float | None


def default_dt_nd(kp: KernelParams) -> float:
    """Substep policy min(1/w1, 1/w2)/DIVISOR, in nondimensional time."""
    return (1.0 / kp.omega_max_nd) / DT_POLICY_DIVISOR


def plan_substeps(rel_times: np.ndarray, dt_target: float,
                  kp: KernelParams) -> tuple[np.ndarray, np.ndarray]:
    """Split each output interval into equal substeps not exceeding dt_target.

    rel_times must be strictly increasing and start above 0.  Raises if the
    resulting substep violates the dt * max(w) stability guard.
    """
    rel_times = np.asarray(rel_times, dtype=np.float64)
    if rel_times.ndim != 1 or rel_times.size == 0:
        raise ValueError("schedule must be a nonempty 1-d array")
    if rel_times[0] <= 0 or np.any(np.diff(rel_times) <= 0):
        raise ValueError("schedule must be strictly increasing and > start")
    if dt_target <= 0:
        raise ValueError("dt must be positive")
    deltas = np.diff(rel_times, prepend=0.0)
    substeps = np.maximum(1, np.ceil(deltas / dt_target - 1e-12)).astype(np.int64)
    dts = deltas / substeps
    if dts.max() * kp.omega_max_nd > MAX_DT_OMEGA * (1.0 + 1e-9):
        raise ValueError(
            f"substep dt*max(omega) = {dts.max() * kp.omega_max_nd:.3g} "
            f"exceeds the stability guard {MAX_DT_OMEGA}")
    return substeps, dts


_EMPTY_NOISE = np.zeros((0, 0, 2))


def run_batch(state0: np.ndarray, rel_times: np.ndarray, kp: KernelParams,
              noise_spec: NoiseSpec, noise: np.ndarray | None,
              dt_target: float | None = None, backend=None
              ) -> tuple[np.ndarray, np.ndarray]:
    """Low-level batch entry: returns (out (n,T,4) with NaN, censor_time (n,)).

    noise, when required, must be (n, total_substeps, 2) standard normals in
    per-trajectory stream order.
    """
    if backend is None:
        backend = get_backend()
    if dt_target is None:
        dt_target = default_dt_nd(kp)
    state0 = np.ascontiguousarray(state0, dtype=np.float64)
    rel_times = np.asarray(rel_times, dtype=np.float64)
    substeps, dts = plan_substeps(rel_times, dt_target, kp)
    n = state0.shape[0]
    out = np.full((n, rel_times.size, 4), np.nan)
    censor_time = np.full(n, np.nan)
    has_noise = noise_spec.has_noise
    if has_noise:
        if noise is None:
            raise ValueError("noise draws required but not provided")
        noise = np.ascontiguousarray(noise, dtype=np.float64)
        if noise.shape != (n, int(substeps.sum()), 2):
            raise ValueError("noise array has wrong shape")
    else:
        noise = _EMPTY_NOISE
    backend.integrate_batch(state0, rel_times, substeps, dts, noise,
                            has_noise, kp.mode, kp.g3, kp.lin_c, kp.gf,
                            kp.k1, kp.k2, kp.inv_m1, kp.c1, kp.c2,
                            noise_spec.sigma1, noise_spec.sigma2,
                            kp.z_cut, kp.s_min, out, censor_time)
    return out, censor_time


def total_substeps(rel_times: np.ndarray, dt_target: float,
                   kp: KernelParams) -> int:
    substeps, _ = plan_substeps(rel_times, dt_target, kp)
    return int(substeps.sum())


def step(point: PhasePoint, dt: float, kp: KernelParams,
         noise_spec: NoiseSpec, rng: np.random.Generator | None = None,
         backend=None) -> PhasePoint | None:
    """Advance one point by dt; returns None as the censoring signal.

    Deterministic given (point, dt, generator state).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    noise = None
    if noise_spec.has_noise:
        if rng is None:
            raise ValueError("rng required when noise is enabled")
        noise = rng.standard_normal((1, 1, 2))
    out, censor_time = run_batch(point.as_array()[None, :], np.array([dt]),
                                 kp, noise_spec, noise, dt_target=dt,
                                 backend=backend)
    if not math.isnan(censor_time[0]):
        return None
    z1, p1, z2, p2 = out[0, 0]
    return PhasePoint(z1, p1, z2, p2, point.t + dt)


def integrate(initial: PhasePoint, schedule: np.ndarray, kp: KernelParams,
              noise_spec: NoiseSpec, rng: np.random.Generator | None = None,
              dt_target: float | None = None, backend=None
              ) -> TrajectoryRecord:
    """Integrate one trajectory, sampling at exactly the scheduled times.

    schedule holds absolute nondimensional times above initial.t; an empty
    schedule returns a record holding only the initial point.
    """
    schedule = np.asarray(schedule, dtype=np.float64)
    if schedule.size == 0:
        return TrajectoryRecord(times=np.array([initial.t]),
                                states=initial.as_array()[None, :],
                                censored=False, censor_time=None)
    rel_times = schedule - initial.t
    if dt_target is None:
        dt_target = default_dt_nd(kp)
    noise = None
    if noise_spec.has_noise:
        if rng is None:
            raise ValueError("rng required when noise is enabled")
        noise = rng.standard_normal(
            (1, total_substeps(rel_times, dt_target, kp), 2))
    out, censor_time = run_batch(initial.as_array()[None, :], rel_times, kp,
                                 noise_spec, noise, dt_target=dt_target,
                                 backend=backend)
    times = np.concatenate(([initial.t], schedule))
    states = np.vstack((initial.as_array()[None, :], out[0]))
    censored = bool(not math.isnan(censor_time[0]))
    return TrajectoryRecord(
        times=times, states=states, censored=censored,
        censor_time=(initial.t + float(censor_time[0])) if censored else None)

"""Named scenario presets, flat config keys, and the sweep/oracle drivers.

Config resolution is total and order-independent from the caller's view:
defaults < preset < regime expansion < config file < --set overrides, with
the final resolved mapping echoed into every run manifest.  All keys are SI.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .ensemble import (CensorPolicy, EnsembleConfig, MomentSeries,
                       run_ensemble, target_crossing)
from .oracles import (OracleInput, classical_freq_tuned, classical_mass_tuned,
                      quantum_freq_tuned, quantum_mass_tuned)
from .states import (GaussianState, StateLabel, apply_squeeze,
                     freefall_amplify, freefall_time_for_sigma,
                     minimum_uncertainty_state, quantum_ground_state,
                     thermal_state, thermally_squeezed_state)
from .units import (CouplingParams, ForceMode, ParticleParams, SystemConfig,
                    charge_to_kappa)

TARGET_SNR = 1.0 / math.sqrt(2.0)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_optional_float(text: str):
    return None if text.strip().lower() == "none" else float(text)


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


_CHOICES = {
    "force_mode": ("cubic", "full", "harmonic"),
    "prep1": ("thermal", "thermal_squeezed", "ground", "ground_sigma", "delta"),
    "prep2": ("thermal", "thermal_squeezed", "ground", "ground_sigma", "delta"),
    "censor_policy": ("exclude_after", "drop"),
    "regime": ("symmetric", "mass_tuned", "freq_tuned"),
}

# key -> parser for --set strings; config files carry native JSON types.
KEY_PARSERS = {
    "m1": float, "m2": float, "omega1": float, "omega2": float,
    "kappa": float, "q1": _parse_optional_float, "q2": _parse_optional_float,
    "d": float, "force_mode": str, "eps": float,
    "gamma1": float, "gamma2": float, "bath_T1": float, "bath_T2": float,
    "noise1": _parse_bool, "noise2": _parse_bool,
    "prep1": str, "prep2": str, "prep1_T": float, "prep2_T": float,
    "prep1_sigma_z": float, "prep2_sigma_z": float,
    "prep1_xi": float, "prep2_xi": float,
    "prep1_freefall_sigma_z": _parse_optional_float,
    "prep2_freefall_sigma_z": _parse_optional_float,
    "mean_z1": float, "mean_p1": float, "mean_z2": float, "mean_p2": float,
    "t_max": float, "n_times": int, "dt": _parse_optional_float,
    "z_cutoff": float, "s_min": float,
    "n_traj": int, "seed": int, "censor_policy": str, "n_bootstrap": int,
    "chunk_size": lambda s: None if s.strip().lower() == "none" else int(s),
    "regime": str, "target_snr": float, "crossing_tol": float,
    "sweep_param": str, "sweep_grid": _parse_float_list,
    "dump_raw": int,
}

DEFAULTS = {
    "m1": 8e-17, "m2": 8e-17, "omega1": 5e4, "omega2": 5e4,
    "kappa": 2.3e-24, "q1": None, "q2": None, "d": 3e-6,
    "force_mode": "cubic", "eps": 0.0,
    "gamma1": 1e-4, "gamma2": 1e-4, "bath_T1": 300.0, "bath_T2": 300.0,
    "noise1": True, "noise2": True,
    "prep1": "thermal_squeezed", "prep1_T": 300.0, "prep1_sigma_z": 30e-9,
    "prep1_xi": 1.0, "prep1_freefall_sigma_z": None,
    "prep2": "thermal", "prep2_T": 0.01, "prep2_sigma_z": 1e-11,
    "prep2_xi": 1.0, "prep2_freefall_sigma_z": None,
    "mean_z1": 0.0, "mean_p1": 0.0, "mean_z2": 0.0, "mean_p2": 0.0,
    "t_max": 20e-6, "n_times": 100, "dt": None,
    "z_cutoff": 0.5, "s_min": 0.01,
    "n_traj": 10000, "seed": 1234,
    "censor_policy": "exclude_after", "n_bootstrap": 1000, "chunk_size": None,
    "regime": "symmetric", "target_snr": TARGET_SNR, "crossing_tol": 0.01,
    "sweep_param": None, "sweep_grid": None,
    "dump_raw": 0,
}

_QUANTUM_DELTA = {
    "gamma1": 0.0, "noise1": False, "noise2": False,
    "prep1": "ground_sigma", "prep1_sigma_z": 1e-11,
    "prep2": "ground_sigma", "prep2_sigma_z": 1e-11,
    "t_max": 5e-6,
}

PRESETS = {
    "fig1b-classical": {},
    "fig1b-quantum": dict(_QUANTUM_DELTA),
    "fig2-trajectories": {"n_times": 200, "dump_raw": 32},
    "fig3-classical-sweep": {
        "sweep_param": "prep1_sigma_z",
        "sweep_grid": [float(x) for x in np.geomspace(10e-9, 200e-9, 16)],
        "n_bootstrap": 0, "n_times": 60,
    },
    "fig3-quantum-sweep": {
        **_QUANTUM_DELTA,
        "sweep_param": "prep1_sigma_z",
        "sweep_grid": [float(x) for x in np.geomspace(0.01e-9, 0.1e-9, 16)],
        "n_bootstrap": 0, "n_times": 60,
    },
    "custom": {},
}

_REGIME_IMPLIED = {
    "symmetric": {},
    "mass_tuned": {"m1": 8e-16},
    "freq_tuned": {"omega1": 2.5e6},
}


class ConfigError(ValueError):
    """Invalid scenario name, key, or value."""


def _check_keys(overrides: dict, source: str):
    unknown = set(overrides) - set(KEY_PARSERS)
    if unknown:
        raise ConfigError(
            f"unknown config key(s) {sorted(unknown)} in {source}; "
            f"valid keys: {sorted(KEY_PARSERS)}")


def parse_set_overrides(pairs: list[str]) -> dict:
    """Parse --set KEY=VALUE strings into typed overrides."""
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {pair!r}")
        key = key.strip()
        if key not in KEY_PARSERS:
            raise ConfigError(
                f"unknown config key {key!r}; valid keys: "
                f"{sorted(KEY_PARSERS)}")
        try:
            out[key] = KEY_PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from exc
    return out


def resolve(scenario: str, file_overrides: dict | None = None,
            cli_overrides: dict | None = None) -> dict:
    """Merge defaults < preset < regime < file < --set into one mapping."""
    if scenario not in PRESETS:
        raise ConfigError(
            f"unknown scenario {scenario!r}; valid: {sorted(PRESETS)}")
    file_overrides = dict(file_overrides or {})
    cli_overrides = dict(cli_overrides or {})
    _check_keys(file_overrides, "config file")
    _check_keys(cli_overrides, "--set overrides")

    merged = dict(DEFAULTS)
    merged.update(PRESETS[scenario])
    regime = cli_overrides.get("regime",
                               file_overrides.get("regime", merged["regime"]))
    if regime not in _REGIME_IMPLIED:
        raise ConfigError(f"unknown regime {regime!r}; "
                          f"valid: {sorted(_REGIME_IMPLIED)}")
    merged.update(_REGIME_IMPLIED[regime])
    merged["regime"] = regime
    merged.update(file_overrides)
    merged.update(cli_overrides)

    for key, choices in _CHOICES.items():
        if merged[key] not in choices:
            raise ConfigError(
                f"bad value {merged[key]!r} for {key!r}; one of {choices}")
    merged["scenario"] = scenario
    return merged


def build_system(resolved: dict) -> SystemConfig:
    kappa = resolved["kappa"]
    if resolved["q1"] is not None and resolved["q2"] is not None:
        kappa = charge_to_kappa(resolved["q1"], resolved["q2"])
    coupling = CouplingParams(
        kappa=kappa, separation_d=resolved["d"],
        force_mode=ForceMode(resolved["force_mode"]),
        compensation_residual_eps=resolved["eps"])
    p1 = ParticleParams(mass=resolved["m1"], trap_omega=resolved["omega1"],
                        charge=resolved["q1"],
                        damping_rate=resolved["gamma1"],
                        bath_temperature=resolved["bath_T1"])
    p2 = ParticleParams(mass=resolved["m2"], trap_omega=resolved["omega2"],
                        charge=resolved["q2"],
                        damping_rate=resolved["gamma2"],
                        bath_temperature=resolved["bath_T2"])
    return SystemConfig(particle1=p1, particle2=p2, coupling=coupling,
                        regime=resolved["regime"], dt=resolved["dt"],
                        z_cutoff_frac=resolved["z_cutoff"],
                        s_min_frac=resolved["s_min"],
                        noise_on_1=resolved["noise1"],
                        noise_on_2=resolved["noise2"])


def _build_state(resolved: dict, system: SystemConfig, idx: int) -> GaussianState:
    params = system.particle1 if idx == 1 else system.particle2
    kind = resolved[f"prep{idx}"]
    if kind == "thermal":
        state = thermal_state(params, resolved[f"prep{idx}_T"])
    elif kind == "thermal_squeezed":
        state = thermally_squeezed_state(params, resolved[f"prep{idx}_T"],
                                         resolved[f"prep{idx}_sigma_z"])
    elif kind == "ground":
        state = quantum_ground_state(params)
    elif kind == "ground_sigma":
        state = minimum_uncertainty_state(resolved[f"prep{idx}_sigma_z"])
    else:
        state = GaussianState(0.0, 0.0, 0.0, 0.0, StateLabel.CUSTOM)

    xi = resolved[f"prep{idx}_xi"]
    if xi != 1.0:
        state = apply_squeeze(state, xi)
    ff_target = resolved[f"prep{idx}_freefall_sigma_z"]
    if ff_target is not None:
        t_ff = freefall_time_for_sigma(state, ff_target, params.mass)
        state = freefall_amplify(state, t_ff, params.mass)
    mean_z = resolved[f"mean_z{idx}"]
    mean_p = resolved[f"mean_p{idx}"]
    if mean_z != 0.0 or mean_p != 0.0:
        state = replace(state, mean_z=mean_z, mean_p=mean_p)
    return state


def build_states(resolved: dict,
                 system: SystemConfig) -> tuple[GaussianState, GaussianState]:
    return _build_state(resolved, system, 1), _build_state(resolved, system, 2)


def build_ensemble(resolved: dict) -> EnsembleConfig:
    n_times = resolved["n_times"]
    if n_times < 1:
        raise ConfigError("n_times must be >= 1")
    schedule = np.linspace(resolved["t_max"] / n_times, resolved["t_max"],
                           n_times)
    return EnsembleConfig(
        n_trajectories=resolved["n_traj"], master_seed=resolved["seed"],
        output_schedule=schedule,
        censor_policy=CensorPolicy(resolved["censor_policy"]),
        n_bootstrap=resolved["n_bootstrap"],
        chunk_size=resolved["chunk_size"])


def run_resolved(resolved: dict, n_workers: int | None = None) -> MomentSeries:
    """Build and run one ensemble from a resolved config mapping."""
    system = build_system(resolved)
    states = build_states(resolved, system)
    ens = build_ensemble(resolved)
    series = run_ensemble(system, states, ens, n_workers=n_workers,
                          keep_raw=resolved["dump_raw"])
    series.metadata["config"] = dict(resolved)
    return series


def run_sweep(resolved: dict, n_workers: int | None = None) -> list[dict]:
    """Run target_crossing over the sweep grid; per-point failures are
    recorded as rows and the sweep continues."""
    param = resolved["sweep_param"]
    grid = resolved["sweep_grid"]
    if not param:
        raise ConfigError("sweep requires sweep_param")
    if param not in KEY_PARSERS:
        raise ConfigError(f"unknown sweep parameter {param!r}")
    if not grid or sorted(grid) != list(grid) or len(set(grid)) != len(grid):
        raise ConfigError("sweep_grid must be nonempty and strictly increasing")
    rows = []
    for value in grid:
        point = dict(resolved)
        point[param] = value
        row = {"param": param, "value": value}
        try:
            series = run_resolved(point, n_workers=n_workers)
            crossing = target_crossing(series, resolved["target_snr"],
                                       resolved["crossing_tol"])
            row.update(crossed=crossing.crossed, t_star=crossing.t_star,
                       p_at=crossing.p_at, sigma_at=crossing.sigma_at,
                       snr_at=crossing.snr_at,
                       censored_fraction=series.censored_fraction,
                       status="ok")
        except (ConfigError, ValueError) as exc:
            row.update(crossed=False, t_star=math.nan, p_at=math.nan,
                       sigma_at=math.nan, snr_at=math.nan,
                       censored_fraction=math.nan, status=f"error: {exc}")
        rows.append(row)
    return rows


def oracle_for(resolved: dict):
    """Pick the closed-form oracle for a resolved config, or None.

    The parametrically symmetric regime has no closed form; the caller must
    surface that explicitly rather than omitting output.
    """
    quantum = resolved["prep1"] in ("ground", "ground_sigma")
    regime = resolved["regime"]
    if regime == "mass_tuned":
        return quantum_mass_tuned if quantum else classical_mass_tuned
    if regime == "freq_tuned":
        return quantum_freq_tuned if quantum else classical_freq_tuned
    return None


def oracle_table(resolved: dict, times) -> list[dict]:
    """Tabulate oracle mean/SNR at the requested times.

    For regimes without an oracle every row carries status "no_oracle".
    """
    oracle = oracle_for(resolved)
    system = build_system(resolved)
    state1, state2 = build_states(resolved, system)
    rows = []
    for t in times:
        if oracle is None:
            rows.append({"t": float(t), "mean_p2": math.nan,
                         "snr": math.nan, "status": "no_oracle"})
            continue
        o = OracleInput(
            kappa=system.coupling.kappa, d=system.coupling.separation_d,
            m1=system.particle1.mass, m2=system.particle2.mass,
            omega1=system.particle1.trap_omega,
            omega2=system.particle2.trap_omega,
            sigma_z1=state1.sigma_z, sigma_z2=state2.sigma_z,
            sigma_p2=state2.sigma_p, t=float(t))
        mean, snr = oracle(o)
        rows.append({"t": float(t), "mean_p2": mean, "snr": snr,
                     "status": "ok"})
    return rows

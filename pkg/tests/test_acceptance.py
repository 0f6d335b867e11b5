"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Every ensemble uses the fixed master seed 1234 unless the criterion itself
sweeps it.  Tolerances are pinned here, not tuned at runtime.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np

from coulombsim.ensemble import EnsembleConfig, run_ensemble, target_crossing
from coulombsim.forces import critical_displacement
from coulombsim.integrator import KernelParams, NoiseSpec, run_batch
from coulombsim.oracles import (OracleInput, classical_freq_tuned,
                                classical_mass_tuned, heuristic_drift,
                                quantum_freq_tuned, quantum_mass_tuned,
                                snr_quadratic_bound)
from coulombsim.scenarios import resolve, run_resolved, run_sweep
from coulombsim.states import GaussianState, StateLabel, quantum_ground_state
from coulombsim.units import CONSTANTS

from conftest import D, KAPPA, MASS, OMEGA, coupling, particle, system

SEED = 1234
SQRT2_INV = 1.0 / math.sqrt(2.0)
TARGET = SQRT2_INV


def report(num, label, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {num:02d} {label}: {status} {detail}")
    return ok


def delta_state(z=0.0, p=0.0):
    return GaussianState(z, p, 0.0, 0.0, StateLabel.CUSTOM)


def z_only_state(sigma):
    return GaussianState(0.0, 0.0, sigma, 0.0, StateLabel.CUSTOM)


def ensemble(n, schedule, n_bootstrap=500, seed=SEED):
    return EnsembleConfig(n_trajectories=n, master_seed=seed,
                          output_schedule=np.asarray(schedule),
                          n_bootstrap=n_bootstrap)


def test_criterion_01_chi_square_snr_bound():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    est = snr_quadratic_bound(1_000_000, rng)
    elapsed = time.perf_counter() - start
    ok = abs(est - 0.7071) <= 0.005 and elapsed < 10.0
    assert report(1, "chi-square SNR bound", ok,
                  f"(snr={est:.4f}, {elapsed:.2f}s)")


def test_criterion_02_null_test_no_coupling():
    resolved = resolve("fig1b-classical", None, {
        "kappa": 0.0, "n_traj": 10000, "n_times": 50, "n_bootstrap": 400,
        "seed": SEED})
    series = run_resolved(resolved)
    ratio = np.abs(series.mean[1:, 3]) / series.se_mean[1:, 3]
    ok = bool(np.all(ratio < 4.0))
    assert report(2, "kappa=0 null test", ok,
                  f"(max |mean|/se = {ratio.max():.2f} over "
                  f"{ratio.size} times)")


def test_criterion_03_mass_tuned_drift_matches_oracle():
    cfg = system(m1=8e-16, regime="mass_tuned")
    states = (z_only_state(30e-9), delta_state())
    times = np.linspace(0.25e-6, 2e-6, 8)
    series = run_ensemble(cfg, states, ensemble(10000, times))
    mean_ok, snr_ok = True, True
    worst_z, worst_snr = 0.0, 0.0
    for i, t in enumerate(series.times):
        if t == 0.0:
            continue
        o = OracleInput(kappa=KAPPA, d=D, m1=8e-16, m2=MASS, omega1=OMEGA,
                        omega2=OMEGA, sigma_z1=30e-9, t=t)
        mean_oracle, _ = classical_mass_tuned(o)
        z = abs(series.mean[i, 3] - mean_oracle) / series.se_mean[i, 3]
        worst_z = max(worst_z, z)
        mean_ok &= z <= 2.0
        if t >= 0.5e-6:
            dev = abs(series.snr_p2[i] - SQRT2_INV)
            worst_snr = max(worst_snr, dev)
            snr_ok &= dev <= 0.05
    ok = mean_ok and snr_ok
    assert report(3, "mass-tuned drift vs oracle", ok,
                  f"(worst |mean-oracle|/se = {worst_z:.2f}, "
                  f"worst |snr-1/sqrt2| = {worst_snr:.3f})")


def test_criterion_04_freq_tuned_drift_and_modulation():
    w1 = 2.5e6
    cfg = system(omega1=w1, regime="freq_tuned")
    states = (z_only_state(30e-9), delta_state())
    times = np.linspace(0.04e-6, 2e-6, 50)
    series = run_ensemble(cfg, states, ensemble(10000, times))

    worst_z = 0.0
    for i, t in enumerate(series.times):
        if t == 0.0:
            continue
        o = OracleInput(kappa=KAPPA, d=D, m1=MASS, m2=MASS, omega1=w1,
                        omega2=OMEGA, sigma_z1=30e-9, t=t)
        mean_oracle, _ = classical_freq_tuned(o)
        worst_z = max(worst_z,
                      abs(series.mean[i, 3] - mean_oracle)
                      / series.se_mean[i, 3])
    mean_ok = worst_z <= 2.0

    # the residual against a monotone (linear) fit must carry the sin(2 w1 t)
    # modulation with amplitude 3 kappa sigma^2/(4 d^4 w1) and period pi/w1
    t = series.times[1:]
    y = series.mean[1:, 3]
    basis = np.column_stack([t, np.sin(2 * w1 * t), np.cos(2 * w1 * t),
                             np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    amp_expected = 3 * KAPPA * (30e-9) ** 2 / (4 * D ** 4 * w1)
    fit_residual = y - basis @ coef
    amp_ok = abs(coef[1] / amp_expected - 1.0) <= 0.2
    phase_ok = abs(coef[2]) <= 0.2 * amp_expected
    visible_ok = abs(coef[1]) > 3.0 * fit_residual.std()
    ok = mean_ok and amp_ok and phase_ok and visible_ok
    assert report(4, "freq-tuned drift + sin(2wt) modulation", ok,
                  f"(worst z = {worst_z:.2f}, sin amp ratio = "
                  f"{coef[1] / amp_expected:.3f}, cos/amp = "
                  f"{coef[2] / amp_expected:.3f})")


def test_criterion_05_instability_threshold_bracket():
    displacements = np.array([0.6, 0.8, 1.0, 1.1, 1.2, 1.3, 1.4, 1.6]) * 1e-6
    fractions = []
    for dz in displacements:
        resolved = resolve("fig1b-classical", None, {
            "gamma1": 0.0, "gamma2": 0.0, "noise1": False, "noise2": False,
            "prep1": "ground_sigma", "prep1_sigma_z": 30e-9,
            "prep2": "delta", "mean_z2": float(dz),
            "n_traj": 256, "t_max": 150e-6, "n_times": 20,
            "n_bootstrap": 0, "z_cutoff": 1.0, "seed": SEED})
        series = run_resolved(resolved)
        fractions.append(series.censored_fraction)
    fractions = np.array(fractions)
    onset_idx = np.nonzero(fractions >= 0.5)[0]
    onset = displacements[onset_idx[0]] if onset_idx.size else math.inf
    z_crit = critical_displacement(coupling(), particle())
    ok = (0.8e-6 <= onset <= 1.6e-6
          and fractions[displacements <= 0.8e-6].max() < 0.1
          and fractions[displacements >= 1.4e-6].min() > 0.9
          and 1.0e-6 <= z_crit <= 1.3e-6)
    table = ", ".join(f"{d * 1e6:.1f}um:{f:.2f}"
                      for d, f in zip(displacements, fractions))
    assert report(5, "instability threshold bracket", ok,
                  f"(onset {onset * 1e6:.1f}um vs z_crit "
                  f"{z_crit * 1e6:.2f}um; {table})")


def test_criterion_06_quantum_snr_suppression_bracket():
    cfg = system(m1=8e-16, regime="mass_tuned")
    ground2 = quantum_ground_state(particle())
    sigma_z1 = 10e-9
    state1 = GaussianState(0.0, 0.0, sigma_z1,
                           0.5 * CONSTANTS.hbar / sigma_z1,
                           StateLabel.QUANTUM_SQUEEZED)
    times = np.array([0.5e-6, 1.0e-6, 1.5e-6, 2.0e-6])

    series = run_ensemble(cfg, (state1, ground2), ensemble(10000, times))
    worst = 0.0
    for i, t in enumerate(series.times):
        if t == 0.0:
            continue
        o = OracleInput(kappa=KAPPA, d=D, m1=8e-16, m2=MASS, omega1=OMEGA,
                        omega2=OMEGA, sigma_z1=sigma_z1,
                        sigma_z2=ground2.sigma_z, sigma_p2=ground2.sigma_p,
                        t=t)
        _, snr_oracle = quantum_mass_tuned(o)
        worst = max(worst, abs(series.snr_p2[i] - snr_oracle))
    bracket_ok = worst <= 0.05

    clean = run_ensemble(cfg, (state1, delta_state()),
                         ensemble(10000, times))
    worst_clean = np.abs(clean.snr_p2[1:] - SQRT2_INV).max()
    clean_ok = worst_clean <= 0.02
    ok = bracket_ok and clean_ok
    assert report(6, "quantum SNR suppression bracket", ok,
                  f"(worst |snr-bracket| = {worst:.3f}, noise-free "
                  f"|snr-1/sqrt2| = {worst_clean:.3f})")


def _sweep_min_crossing(regime):
    overrides = {"regime": regime, "seed": SEED}
    if regime == "freq_tuned":
        overrides["dt"] = 8e-9  # dt*w1 = 0.02, 5x under the guard
    resolved = resolve("fig3-classical-sweep", None, overrides)
    rows = run_sweep(resolved)
    assert all(r["status"] == "ok" for r in rows)
    return next((r["value"] for r in rows if r["crossed"]), math.inf)


def test_criterion_07a_sweep_crossing_order():
    mins = {regime: _sweep_min_crossing(regime)
            for regime in ("symmetric", "mass_tuned", "freq_tuned")}
    ok = (mins["symmetric"] < mins["mass_tuned"]
          and mins["symmetric"] < mins["freq_tuned"])
    pretty = {k: (f"{v * 1e9:.0f}nm" if math.isfinite(v) else "none")
              for k, v in mins.items()}
    assert report(7, "sweep ordering (a): symmetric crosses first", ok,
                  f"(min crossing sigma: {pretty})")


def _crossing_at_150nm(regime):
    overrides = {"regime": regime, "seed": SEED, "prep1_sigma_z": 150e-9,
                 "n_traj": 10000, "n_times": 200, "n_bootstrap": 0}
    if regime == "freq_tuned":
        overrides["dt"] = 8e-9
    resolved = resolve("fig1b-classical", None, overrides)
    series = run_resolved(resolved)
    return target_crossing(series, TARGET, 0.01)


def test_criterion_07b_output_ordering_at_150nm():
    sym = _crossing_at_150nm("symmetric")
    mass = _crossing_at_150nm("mass_tuned")
    freq = _crossing_at_150nm("freq_tuned")
    mass_ok = mass.p_at > sym.p_at
    freq_ok = freq.sigma_at < sym.sigma_at
    report(7, "output ordering (b) at 150nm", mass_ok and freq_ok,
           f"(mass p_at/sym p_at = {mass.p_at / sym.p_at:.3f} [> 1 required]"
           f", freq sigma_at/sym sigma_at = "
           f"{freq.sigma_at / sym.sigma_at:.3f} [< 1 required])")
    assert mass_ok, "mass-tuned p_at must exceed symmetric p_at at 150nm"
    # Known-red clause: the symmetric regime genuinely crosses the target
    # early at small output (both quadratures of its near-equilibrium state
    # drive the rectification), anchoring its sigma_at below the
    # frequency-tuned argmax value.  See the decisions ledger.
    assert freq_ok, \
        "frequency-tuned sigma_at must be below symmetric sigma_at at 150nm"


def test_criterion_08_oracle_identity_suite():
    start = time.perf_counter()
    o_small = OracleInput(kappa=KAPPA, d=D, m1=8e-16, m2=MASS, omega1=2.5e6,
                          omega2=OMEGA, sigma_z1=30e-9, t=1e-7 / 2.5e6)
    rel_theta = abs(classical_freq_tuned(o_small)[0]
                    / classical_mass_tuned(o_small)[0] - 1.0)

    o_clean = OracleInput(kappa=KAPPA, d=D, m1=8e-16, m2=MASS, omega1=OMEGA,
                          omega2=OMEGA, sigma_z1=30e-9, t=1e-6)
    dev_qm = abs(quantum_mass_tuned(o_clean)[1] - SQRT2_INV)
    o_freq = OracleInput(kappa=KAPPA, d=D, m1=MASS, m2=MASS, omega1=2.5e6,
                         omega2=OMEGA, sigma_z1=30e-9, t=1e-6)
    dev_qf = abs(quantum_freq_tuned(o_freq)[1] - SQRT2_INV)

    drift = heuristic_drift(KAPPA, D, (30e-9) ** 2, t=1e-6)
    dev_h = abs(drift / classical_mass_tuned(o_clean)[0] - 1.0)
    elapsed = time.perf_counter() - start
    ok = (rel_theta < 1e-12 and dev_qm < 1e-12 and dev_qf < 1e-12
          and dev_h < 1e-12 and elapsed < 1.0)
    assert report(8, "oracle identity suite", ok,
                  f"(max dev = {max(rel_theta, dev_qm, dev_qf, dev_h):.2e}, "
                  f"{elapsed * 1000:.0f}ms)")


def test_criterion_09_worker_count_byte_identity(tmp_path):
    args = [sys.executable, "-m", "coulombsim", "run",
            "--scenario", "fig1b-classical", "--seed", str(SEED),
            "--set", "n_traj=400", "--set", "n_times=12",
            "--set", "n_bootstrap=100", "--set", "chunk_size=32"]
    outputs = {}
    for workers in ("1", "8"):
        out = tmp_path / f"w{workers}"
        env = dict(os.environ, COULOMBSIM_WORKERS=workers)
        proc = subprocess.run(args + ["--out", str(out)], env=env,
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outputs[workers] = ((out / "series.csv").read_bytes(),
                            (out / "normalized.csv").read_bytes())
    ok = outputs["1"] == outputs["8"]
    assert report(9, "1 vs 8 workers byte-identical CSV", ok)


def test_criterion_10_integrator_validation():
    # (i) kappa = 0 equilibrium stays at equipartition within 2%
    gamma = 0.1 * OMEGA
    cfg = system(kappa=0.0, gamma1=gamma, gamma2=gamma, bath_T1=300.0,
                 bath_T2=300.0, noise1=True, noise2=True)
    from coulombsim.states import thermal_state

    eq = thermal_state(particle(), 300.0)
    times = np.array([4e-4, 6e-4, 8e-4])
    series = run_ensemble(cfg, (eq, eq),
                          ensemble(10000, times, n_bootstrap=0))
    var_z = (series.std[1:, 2] ** 2).mean()
    var_p = (series.std[1:, 3] ** 2).mean()
    dev_z = abs(var_z / eq.sigma_z ** 2 - 1.0)
    dev_p = abs(var_p / eq.sigma_p ** 2 - 1.0)
    ou_ok = dev_z < 0.02 and dev_p < 0.02

    # (ii) deterministic harmonic energy drift < 1e-6 per 1e5 steps
    kp = KernelParams.from_system(system(kappa=0.0))
    state0 = np.array([[0.02, 0.0, -0.015, 0.01]])
    out, censor = run_batch(state0, np.array([500.0]), kp,
                            NoiseSpec(0.0, 0.0), None, dt_target=0.005)
    assert math.isnan(censor[0])
    z1, p1, z2, p2 = out[0, 0]
    drift1 = abs((p1 ** 2 + z1 ** 2) / 0.02 ** 2 - 1.0)
    drift2 = abs((p2 ** 2 + z2 ** 2) / (0.015 ** 2 + 0.01 ** 2) - 1.0)
    energy_ok = max(drift1, drift2) < 1e-6
    ok = ou_ok and energy_ok
    assert report(10, "integrator validation", ok,
                  f"(var dev z = {dev_z:.4f}, p = {dev_p:.4f}; energy drift "
                  f"= {max(drift1, drift2):.2e}/1e5 steps)")

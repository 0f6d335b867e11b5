"""Command-line front end: run, sweep, oracle, validate.

Worker count is controlled only by the COULOMBSIM_WORKERS environment
variable (default 1); results are bit-identical for any worker count.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .oracles import (OracleInput, classical_freq_tuned, classical_mass_tuned,
                      heuristic_drift, quantum_mass_tuned,
                      snr_quadratic_bound)
from .output import (build_manifest, ensure_outdir, write_manifest,
                     write_normalized_csv, write_oracle_csv, write_raw_csv,
                     write_series_csv, write_series_json, write_sweep_csv,
                     write_sweep_json)
from .scenarios import (PRESETS, ConfigError, oracle_table,
                        parse_set_overrides, resolve, run_resolved, run_sweep)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORT = 3


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--scenario", default="custom",
                        choices=sorted(PRESETS),
                        help="named preset (default: custom)")
    parser.add_argument("--config", default=None,
                        help="JSON file with config key overrides")
    parser.add_argument("--set", dest="sets", action="append", default=[],
                        metavar="KEY=VALUE", help="override one config key")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--n-traj", type=int, default=None)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def _resolved_from_args(args) -> dict:
    file_overrides = {}
    if args.config:
        with open(args.config) as fh:
            file_overrides = json.load(fh)
        if not isinstance(file_overrides, dict):
            raise ConfigError("config file must hold a JSON object")
    cli_overrides = parse_set_overrides(args.sets)
    if args.seed is not None:
        cli_overrides["seed"] = args.seed
    if args.n_traj is not None:
        cli_overrides["n_traj"] = args.n_traj
    return resolve(args.scenario, file_overrides, cli_overrides)


def _cmd_run(args) -> int:
    resolved = _resolved_from_args(args)
    out = ensure_outdir(args.out)
    start = time.perf_counter()
    series = run_resolved(resolved)
    wall = time.perf_counter() - start
    manifest = build_manifest(resolved, series.metadata, wall, __version__)
    write_manifest(out / "manifest.json", manifest)
    if args.format == "csv":
        write_series_csv(out / "series.csv", series)
        write_normalized_csv(out / "normalized.csv", series)
    else:
        write_series_json(out / "series.json", series)
    if series.raw_trajectories is not None:
        write_raw_csv(out / "raw.csv", series)
    if series.truncated_at is not None:
        print(f"error: ensemble all-censored at output index "
              f"{series.truncated_at}; series truncated (see manifest)",
              file=sys.stderr)
        return EXIT_ABORT
    print(f"run: wrote {out} (n={resolved['n_traj']}, "
          f"censored={series.censored_fraction:.3g}, {wall:.2f}s)")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cli_overrides = parse_set_overrides(args.sets)
    if args.param:
        cli_overrides["sweep_param"] = args.param
    if args.grid:
        cli_overrides["sweep_grid"] = [float(x) for x in args.grid.split(",")]
    if args.seed is not None:
        cli_overrides["seed"] = args.seed
    if args.n_traj is not None:
        cli_overrides["n_traj"] = args.n_traj
    file_overrides = {}
    if args.config:
        with open(args.config) as fh:
            file_overrides = json.load(fh)
    resolved = resolve(args.scenario, file_overrides, cli_overrides)
    out = ensure_outdir(args.out)
    start = time.perf_counter()
    rows = run_sweep(resolved)
    wall = time.perf_counter() - start
    manifest = build_manifest(resolved, {"rows": len(rows)}, wall, __version__)
    write_manifest(out / "manifest.json", manifest)
    if args.format == "csv":
        write_sweep_csv(out / "sweep.csv", rows)
    else:
        write_sweep_json(out / "sweep.json", rows)
    failures = sum(1 for r in rows if r["status"] != "ok")
    print(f"sweep: wrote {out} ({len(rows)} points, {failures} failed, "
          f"{wall:.2f}s)")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    resolved = _resolved_from_args(args)
    if args.times:
        times = [float(x) for x in args.times.split(",")]
    else:
        times = np.linspace(0.0, resolved["t_max"], 21).tolist()
    rows = oracle_table(resolved, times)
    out = ensure_outdir(args.out)
    manifest = build_manifest(resolved, {"times": times}, 0.0, __version__)
    write_manifest(out / "manifest.json", manifest)
    write_oracle_csv(out / "oracle.csv", rows)
    if rows and rows[0]["status"] == "no_oracle":
        print("oracle: no closed form for the symmetric regime "
              "(rows carry status no_oracle)")
    else:
        print(f"oracle: wrote {out} ({len(rows)} rows)")
    return EXIT_OK


def _cmd_validate(args) -> int:
    failures = 0

    def check(name, ok, detail=""):
        nonlocal failures
        if ok:
            print(f"PASS: {name}")
        else:
            failures += 1
            print(f"FAIL: {name} {detail}")

    o_small = OracleInput(kappa=2.3e-24, d=3e-6, m1=8e-16, m2=8e-17,
                          omega1=2.5e6, omega2=5e4, sigma_z1=30e-9,
                          t=1e-7 / 2.5e6)
    m_freq, _ = classical_freq_tuned(o_small)
    m_mass, _ = classical_mass_tuned(o_small)
    check("oracle small-angle identity",
          abs(m_freq / m_mass - 1.0) < 1e-12,
          f"(rel dev {abs(m_freq / m_mass - 1.0):.2e})")

    o_clean = OracleInput(kappa=2.3e-24, d=3e-6, m1=8e-16, m2=8e-17,
                          omega1=5e4, omega2=5e4, sigma_z1=30e-9, t=1e-6)
    _, snr_q = quantum_mass_tuned(o_clean)
    check("quantum->classical limit",
          abs(snr_q - 1.0 / math.sqrt(2.0)) < 1e-12)

    drift = heuristic_drift(2.3e-24, 3e-6, (30e-9) ** 2, 0.0, 0.0, 0.0, 1e-6)
    mean5, _ = classical_mass_tuned(
        OracleInput(kappa=2.3e-24, d=3e-6, m1=8e-16, m2=8e-17, omega1=5e4,
                    omega2=5e4, sigma_z1=30e-9, t=1e-6))
    check("heuristic-drift reduction", abs(drift / mean5 - 1.0) < 1e-12)

    rng = np.random.default_rng(7)
    snr = snr_quadratic_bound(200_000, rng)
    check("chi-square SNR bound",
          abs(snr - 1.0 / math.sqrt(2.0)) < 0.01, f"(got {snr:.4f})")

    resolved = resolve("fig1b-classical", None, {
        "kappa": 0.0, "n_traj": 600, "n_times": 10, "n_bootstrap": 200,
        "seed": 77})
    series = run_resolved(resolved)
    with np.errstate(invalid="ignore"):
        ratio = np.abs(series.mean[1:, 3]) / series.se_mean[1:, 3]
    check("kappa=0 null test", bool(np.all(ratio < 5.0)),
          f"(max |mean|/se = {ratio.max():.2f})")

    resolved = resolve("fig1b-classical", None,
                       {"n_traj": 64, "n_times": 5, "n_bootstrap": 0,
                        "seed": 99})
    a = run_resolved(resolved)
    b = run_resolved(resolved)
    check("fixed-seed determinism",
          bool(np.array_equal(a.mean, b.mean)
               and np.array_equal(a.std, b.std, equal_nan=True)))

    print("validate:", "ok" if failures == 0 else f"{failures} failure(s)")
    return EXIT_OK if failures == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="coulombsim",
        description="Ensemble simulator for two trapped charged particles "
                    "coupled by the cubic Coulomb nonlinearity")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario ensemble")
    _add_common(run_p)

    sweep_p = sub.add_parser("sweep", help="sweep a parameter grid")
    _add_common(sweep_p)
    sweep_p.add_argument("--param", default=None,
                         help="swept config key (default from preset)")
    sweep_p.add_argument("--grid", default=None,
                         help="comma-separated grid values")

    oracle_p = sub.add_parser("oracle", help="tabulate analytic predictions")
    _add_common(oracle_p)
    oracle_p.add_argument("--times", default=None,
                          help="comma-separated times in seconds")

    val_p = sub.add_parser("validate", help="fast invariant smoke suite")
    val_p.set_defaults(command="validate")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        return _cmd_validate(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

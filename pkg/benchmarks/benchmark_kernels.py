"""Benchmark the compiled stepping kernel against the NumPy fallback.

Runs the same batch through both backends (verifying bit-identical output)
on two workloads: the reference symmetric ensemble (w1 = w2) and a
stiff-trap one (w1 = 50 w2, many more substeps per output).

    python benchmarks/benchmark_kernels.py [--n 2000]
"""

import argparse
import time

import numpy as np

from coulombsim.integrator import (KernelParams, NoiseSpec, available_backends,
                                   default_dt_nd, get_backend, plan_substeps,
                                   run_batch)
from coulombsim.units import (CouplingParams, ParticleParams, SystemConfig,
                              make_unit_scales)


def build_case(name, omega1, n):
    p1 = ParticleParams(mass=8e-17, trap_omega=omega1, damping_rate=1e-4,
                        bath_temperature=300.0)
    p2 = ParticleParams(mass=8e-17, trap_omega=5e4, damping_rate=1e-4,
                        bath_temperature=300.0)
    cfg = SystemConfig(particle1=p1, particle2=p2,
                       coupling=CouplingParams(kappa=2.3e-24,
                                               separation_d=3e-6))
    kp = KernelParams.from_system(cfg)
    ns = NoiseSpec.from_system(cfg, make_unit_scales(cfg))
    rng = np.random.default_rng(0)
    state0 = np.zeros((n, 4))
    state0[:, 0] = 0.01 * rng.standard_normal(n)
    times = np.linspace(0.05, 1.0, 20)
    substeps, _ = plan_substeps(times, default_dt_nd(kp), kp)
    total = int(substeps.sum())
    noise = rng.standard_normal((n, total, 2))
    return name, kp, ns, state0, times, noise, n * total


def run_case(case, backend_name):
    name, kp, ns, state0, times, noise, steps = case
    backend = get_backend(backend_name)
    start = time.perf_counter()
    out, censor = run_batch(state0, times, kp, ns, noise, backend=backend)
    elapsed = time.perf_counter() - start
    return out, censor, elapsed, steps


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2000,
                        help="trajectories per case (default 2000)")
    args = parser.parse_args()

    backends = available_backends()
    print(f"available backends: {backends}")
    if "cython" not in backends:
        print("compiled kernel not built; benchmarking numpy only")

    cases = [build_case("symmetric (w1=w2)", 5e4, args.n),
             build_case("stiff trap (w1=50 w2)", 2.5e6, max(args.n // 8, 64))]

    for case in cases:
        print(f"\n{case[0]}: {case[3].shape[0]} trajectories, "
              f"{case[6]} substeps total")
        results = {}
        for backend_name in backends:
            out, censor, elapsed, steps = run_case(case, backend_name)
            results[backend_name] = (out, censor, elapsed)
            print(f"  {backend_name:7s} {elapsed:8.3f} s   "
                  f"{steps / elapsed / 1e6:7.1f} M substeps/s")
        if len(results) == 2:
            same = (np.array_equal(results["cython"][0],
                                   results["numpy"][0], equal_nan=True)
                    and np.array_equal(results["cython"][1],
                                       results["numpy"][1], equal_nan=True))
            speedup = results["numpy"][2] / results["cython"][2]
            print(f"  bit-identical: {same}   speedup: {speedup:.1f}x")


if __name__ == "__main__":
    main()

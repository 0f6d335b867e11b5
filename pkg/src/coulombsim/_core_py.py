"""Pure-NumPy stepping kernel (fallback when the compiled core is absent).

Semantics are shared with the compiled kernel in _core.pyx: one RK4 drift
step per substep plus one additive Gaussian increment on the momenta, with
divergence censoring after every substep.  The arithmetic is written with
the same operation order as the C code (and the extension is compiled with
-ffp-contract=off), so both backends produce bit-identical trajectories.

State layout per trajectory: (z1, p1, z2, p2), all nondimensional.
Mode ids: 0 = compensated cubic, 1 = full Coulomb, 2 = harmonic coupling.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "numpy"


def _drift(mode, g3, lin_c, gf, k1, k2, inv_m1, c1, c2, z1, p1, z2, p2):
    u = z1 - z2
    if mode == 0:
        fint = g3 * u * u + lin_c * u
    elif mode == 1:
        s = 1.0 - u
        fint = gf / (s * s) - gf
    else:
        fint = lin_c * u
    return (p1 * inv_m1,
            -k1 * z1 - c1 * p1 - fint,
            p2,
            -k2 * z2 - c2 * p2 + fint)


def integrate_batch(state0, out_times, substeps, dts, noise, has_noise,
                    mode, g3, lin_c, gf, k1, k2, inv_m1, c1, c2, s1, s2,
                    z_cut, s_min, out, censor_time):
    """Advance a batch of trajectories, writing samples at out_times.

    out must be (n, T, 4) prefilled with NaN and censor_time (n,) prefilled
    with NaN; censored trajectories keep NaN entries from their censor time
    onward and get censor_time set to the (nondimensional) time at which the
    divergence guard fired.
    """
    n = state0.shape[0]
    n_times = out_times.shape[0]

    z1 = state0[:, 0].copy()
    p1 = state0[:, 1].copy()
    z2 = state0[:, 2].copy()
    p2 = state0[:, 3].copy()

    def invalid(z1, p1, z2, p2):
        bad = ((np.abs(z1) > z_cut) | (np.abs(z2) > z_cut)
               | ~np.isfinite(z1) | ~np.isfinite(p1)
               | ~np.isfinite(z2) | ~np.isfinite(p2))
        if mode == 1:
            bad |= (1.0 - (z1 - z2)) < s_min
        return bad

    alive = ~invalid(z1, p1, z2, p2)
    censor_time[~alive] = 0.0

    step_idx = 0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for j in range(n_times):
            m = int(substeps[j])
            dt = float(dts[j])
            hdt = 0.5 * dt
            dt6 = dt / 6.0
            sqdt = math.sqrt(dt)
            a1 = s1 * sqdt
            a2 = s2 * sqdt
            base = float(out_times[j - 1]) if j > 0 else 0.0
            for k in range(m):
                d0, d1, d2, d3 = _drift(mode, g3, lin_c, gf, k1, k2, inv_m1,
                                        c1, c2, z1, p1, z2, p2)
                e0, e1, e2, e3 = _drift(mode, g3, lin_c, gf, k1, k2, inv_m1,
                                        c1, c2,
                                        z1 + hdt * d0, p1 + hdt * d1,
                                        z2 + hdt * d2, p2 + hdt * d3)
                f0, f1, f2, f3 = _drift(mode, g3, lin_c, gf, k1, k2, inv_m1,
                                        c1, c2,
                                        z1 + hdt * e0, p1 + hdt * e1,
                                        z2 + hdt * e2, p2 + hdt * e3)
                g0, g1, g2, g3v = _drift(mode, g3, lin_c, gf, k1, k2, inv_m1,
                                         c1, c2,
                                         z1 + dt * f0, p1 + dt * f1,
                                         z2 + dt * f2, p2 + dt * f3)
                z1 = z1 + dt6 * (d0 + 2.0 * e0 + 2.0 * f0 + g0)
                p1 = p1 + dt6 * (d1 + 2.0 * e1 + 2.0 * f1 + g1)
                z2 = z2 + dt6 * (d2 + 2.0 * e2 + 2.0 * f2 + g2)
                p2 = p2 + dt6 * (d3 + 2.0 * e3 + 2.0 * f3 + g3v)
                if has_noise:
                    p1 = p1 + a1 * noise[:, step_idx, 0]
                    p2 = p2 + a2 * noise[:, step_idx, 1]
                step_idx += 1
                bad = invalid(z1, p1, z2, p2)
                newly = bad & alive
                if newly.any():
                    censor_time[newly] = base + (k + 1) * dt
                    alive &= ~bad
            if not alive.any():
                break
            out[alive, j, 0] = z1[alive]
            out[alive, j, 1] = p1[alive]
            out[alive, j, 2] = z2[alive]
            out[alive, j, 3] = p2[alive]
    return None

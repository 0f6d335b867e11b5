"""Compiled stepping kernel: RK4 drift + additive Gaussian momentum kicks.

Must stay semantically identical to _core_py.integrate_batch; the expression
structure mirrors the NumPy code and the module is compiled with
-ffp-contract=off so both backends produce bit-identical doubles.
"""

from libc.math cimport fabs, isfinite, sqrt
from libc.stdint cimport int64_t

BACKEND_NAME = "cython"


cdef inline double _fint(int mode, double g3, double lin_c, double gf,
                         double u) nogil:
    cdef double s
    if mode == 0:
        return g3 * u * u + lin_c * u
    elif mode == 1:
        s = 1.0 - u
        return gf / (s * s) - gf
    else:
        return lin_c * u


cdef inline bint _invalid(int mode, double z_cut, double s_min,
                          double z1, double p1, double z2, double p2) nogil:
    if fabs(z1) > z_cut or fabs(z2) > z_cut:
        return True
    if not (isfinite(z1) and isfinite(p1) and isfinite(z2) and isfinite(p2)):
        return True
    if mode == 1 and (1.0 - (z1 - z2)) < s_min:
        return True
    return False


def integrate_batch(double[:, ::1] state0, double[::1] out_times,
                    int64_t[::1] substeps, double[::1] dts,
                    double[:, :, ::1] noise, bint has_noise,
                    int mode, double g3, double lin_c, double gf,
                    double k1, double k2, double inv_m1,
                    double c1, double c2, double s1, double s2,
                    double z_cut, double s_min,
                    double[:, :, ::1] out, double[::1] censor_time):
    """Advance a batch of trajectories; see _core_py.integrate_batch."""
    cdef Py_ssize_t n = state0.shape[0]
    cdef Py_ssize_t n_times = out_times.shape[0]
    cdef Py_ssize_t i, j, k, m, step_idx
    cdef double z1, p1, z2, p2
    cdef double dt, hdt, dt6, sqdt, a1, a2, base, u, fint
    cdef double d0, d1, d2, d3, e0, e1, e2, e3
    cdef double f0, f1, f2, f3, g0, g1, g2, g3v
    cdef double y0, y1, y2, y3
    cdef bint alive

    with nogil:
        for i in range(n):
            z1 = state0[i, 0]
            p1 = state0[i, 1]
            z2 = state0[i, 2]
            p2 = state0[i, 3]
            if _invalid(mode, z_cut, s_min, z1, p1, z2, p2):
                censor_time[i] = 0.0
                continue
            alive = True
            step_idx = 0
            for j in range(n_times):
                m = substeps[j]
                dt = dts[j]
                hdt = 0.5 * dt
                dt6 = dt / 6.0
                sqdt = sqrt(dt)
                a1 = s1 * sqdt
                a2 = s2 * sqdt
                base = out_times[j - 1] if j > 0 else 0.0
                for k in range(m):
                    u = z1 - z2
                    fint = _fint(mode, g3, lin_c, gf, u)
                    d0 = p1 * inv_m1
                    d1 = -k1 * z1 - c1 * p1 - fint
                    d2 = p2
                    d3 = -k2 * z2 - c2 * p2 + fint

                    y0 = z1 + hdt * d0
                    y1 = p1 + hdt * d1
                    y2 = z2 + hdt * d2
                    y3 = p2 + hdt * d3
                    u = y0 - y2
                    fint = _fint(mode, g3, lin_c, gf, u)
                    e0 = y1 * inv_m1
                    e1 = -k1 * y0 - c1 * y1 - fint
                    e2 = y3
                    e3 = -k2 * y2 - c2 * y3 + fint

                    y0 = z1 + hdt * e0
                    y1 = p1 + hdt * e1
                    y2 = z2 + hdt * e2
                    y3 = p2 + hdt * e3
                    u = y0 - y2
                    fint = _fint(mode, g3, lin_c, gf, u)
                    f0 = y1 * inv_m1
                    f1 = -k1 * y0 - c1 * y1 - fint
                    f2 = y3
                    f3 = -k2 * y2 - c2 * y3 + fint

                    y0 = z1 + dt * f0
                    y1 = p1 + dt * f1
                    y2 = z2 + dt * f2
                    y3 = p2 + dt * f3
                    u = y0 - y2
                    fint = _fint(mode, g3, lin_c, gf, u)
                    g0 = y1 * inv_m1
                    g1 = -k1 * y0 - c1 * y1 - fint
                    g2 = y3
                    g3v = -k2 * y2 - c2 * y3 + fint

                    z1 = z1 + dt6 * (d0 + 2.0 * e0 + 2.0 * f0 + g0)
                    p1 = p1 + dt6 * (d1 + 2.0 * e1 + 2.0 * f1 + g1)
                    z2 = z2 + dt6 * (d2 + 2.0 * e2 + 2.0 * f2 + g2)
                    p2 = p2 + dt6 * (d3 + 2.0 * e3 + 2.0 * f3 + g3v)
                    if has_noise:
                        p1 = p1 + a1 * noise[i, step_idx, 0]
                        p2 = p2 + a2 * noise[i, step_idx, 1]
                    step_idx += 1
                    if _invalid(mode, z_cut, s_min, z1, p1, z2, p2):
                        censor_time[i] = base + (k + 1) * dt
                        alive = False
                        break
                if not alive:
                    break
                out[i, j, 0] = z1
                out[i, j, 1] = p1
                out[i, j, 2] = z2
                out[i, j, 3] = p2
    return None

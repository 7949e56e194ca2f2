# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. See ``_purekernels`` for the reference versions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, fmod, log, sqrt, INFINITY

cnp.import_array()


cdef inline void _rk4_jacobi(double K, double* J, double* P, double h, long nsteps) noexcept nogil:
    cdef double hh = 0.5 * h
    cdef double j = J[0]
    cdef double p = P[0]
    cdef double k1J, k1P, k2J, k2P, k3J, k3P, k4J, k4P
    cdef long i
    for i in range(nsteps):
        k1J = p
        k1P = -K * j
        k2J = p + hh * k1P
        k2P = -K * (j + hh * k1J)
        k3J = p + hh * k2P
        k3P = -K * (j + hh * k2J)
        k4J = p + h * k3P
        k4P = -K * (j + h * k3J)
        j = j + (h / 6.0) * (k1J + 2.0 * k2J + 2.0 * k3J + k4J)
        p = p + (h / 6.0) * (k1P + 2.0 * k2P + 2.0 * k3P + k4P)
    J[0] = j
    P[0] = p


def rk4_jacobi(double K, double J, double P, double h, long nsteps):
    with nogil:
        _rk4_jacobi(K, &J, &P, h, nsteps)
    return J, P


def rk4_jacobi_samples(double K, double J, double P, double h, long nsamples, long every):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] Js = np.empty(nsamples + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] Ps = np.empty(nsamples + 1)
    cdef long i
    Js[0] = J
    Ps[0] = P
    for i in range(1, nsamples + 1):
        _rk4_jacobi(K, &J, &P, h, every)
        Js[i] = J
        Ps[i] = P
    return Js, Ps


def benettin_jacobi(double K, double J, double P, double h, long nsteps, long renorm_every):
    cdef double log_sum = 0.0
    cdef double r
    cdef long done = 0
    cdef long n
    with nogil:
        while done < nsteps:
            n = renorm_every if nsteps - done >= renorm_every else nsteps - done
            _rk4_jacobi(K, &J, &P, h, n)
            done += n
            r = sqrt(J * J + P * P)
            log_sum += log(r)
            J = J / r
            P = P / r
    return log_sum, J, P


def logistic_log_sensitivity(double a, double x0, long n):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double x = x0
    cdef double s = 0.0
    cdef double d
    cdef long i, k
    cdef long hit = -1
    for i in range(n):
        d = 2.0 * a * x
        if d == 0.0:
            hit = i
            for k in range(i, n):
                out[k] = -INFINITY
            break
        s += log(fabs(d))
        out[i] = s
        x = 1.0 - a * x * x
    return out, hit


def logistic_iterate(double a, double x, long n):
    cdef long i
    with nogil:
        for i in range(n):
            x = 1.0 - a * x * x
    return x


def cat_map_iterate(double x, double y, long n):
    cdef double xn
    cdef long i
    with nogil:
        for i in range(n):
            xn = fmod(2.0 * x + y, 1.0)
            y = fmod(x + y, 1.0)
            x = xn
    return x, y


def map_spectrum_2x2(double[:, :, ::1] jac):
    cdef double u0 = 1.0, u1 = 0.0, w0 = 0.0, w1 = 1.0
    cdef double s1 = 0.0, s2 = 0.0
    cdef double a, b, c, d, p0, p1, r0, r1, n1, n2, proj
    cdef Py_ssize_t i
    cdef Py_ssize_t bad = -1
    with nogil:
        for i in range(jac.shape[0]):
            a = jac[i, 0, 0]
            b = jac[i, 0, 1]
            c = jac[i, 1, 0]
            d = jac[i, 1, 1]
            if fabs(a * d - b * c) < 1e-300:
                bad = i
                break
            p0 = a * u0 + b * u1
            p1 = c * u0 + d * u1
            r0 = a * w0 + b * w1
            r1 = c * w0 + d * w1
            n1 = sqrt(p0 * p0 + p1 * p1)
            u0 = p0 / n1
            u1 = p1 / n1
            proj = r0 * u0 + r1 * u1
            r0 = r0 - proj * u0
            r1 = r1 - proj * u1
            n2 = sqrt(r0 * r0 + r1 * r1)
            w0 = r0 / n2
            w1 = r1 / n2
            s1 += log(n1)
            s2 += log(n2)
    return s1, s2, bad


cdef inline double _bilinear(double K, const double* u, const double* v, Py_ssize_t m) noexcept nogil:
    # compensated dot product; same operation sequence as the Python fallback
    cdef double p = 0.0, e = 0.0
    cdef double a, b, prod, t, ah, al, bh, bl, perr, sm, z, serr
    cdef Py_ssize_t i
    for i in range(m):
        a = -u[i] if (i == 0 and K < 0.0) else u[i]
        b = v[i]
        prod = a * b
        t = 134217729.0 * a
        ah = t - (t - a)
        al = a - ah
        t = 134217729.0 * b
        bh = t - (t - b)
        bl = b - bh
        perr = ((ah * bh - prod) + ah * bl + al * bh) + al * bl
        sm = p + prod
        z = sm - p
        serr = (p - (sm - z)) + (prod - z)
        p = sm
        e = e + (serr + perr)
    return p + e


def bilinear_form(double K, u, v):
    cdef const double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    if uu.shape[0] != vv.shape[0] or uu.shape[0] == 0:
        raise ValueError("vectors must be non-empty and of equal length")
    return _bilinear(K, &uu[0], &vv[0], uu.shape[0])


def geodesic_rk4(double K, x_in, v_in, double h, long nsteps):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.array(x_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] va = np.array(v_in, dtype=np.float64)
    cdef Py_ssize_t m = xa.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] work = np.empty((14, m))
    cdef double* x = &xa[0]
    cdef double* v = &va[0]
    cdef double* k1x = &work[0, 0]
    cdef double* k1v = &work[1, 0]
    cdef double* k2x = &work[2, 0]
    cdef double* k2v = &work[3, 0]
    cdef double* k3x = &work[4, 0]
    cdef double* k3v = &work[5, 0]
    cdef double* k4x = &work[6, 0]
    cdef double* k4v = &work[7, 0]
    cdef double* x2 = &work[8, 0]
    cdef double* v2 = &work[9, 0]
    cdef double* x3 = &work[10, 0]
    cdef double* v3 = &work[11, 0]
    cdef double* x4 = &work[12, 0]
    cdef double* v4 = &work[13, 0]
    cdef double hh = 0.5 * h
    cdef double c, cg, a, b, nx, nv, speed2
    cdef long step
    cdef Py_ssize_t i
    with nogil:
        # speed is conserved along geodesics; keep it from the initial state
        speed2 = _bilinear(K, v, v, m)
        cg = -K * speed2
        for step in range(nsteps):
            for i in range(m):
                k1x[i] = v[i]
                k1v[i] = cg * x[i]
            for i in range(m):
                x2[i] = x[i] + hh * k1x[i]
                v2[i] = v[i] + hh * k1v[i]
            for i in range(m):
                k2x[i] = v2[i]
                k2v[i] = cg * x2[i]
            for i in range(m):
                x3[i] = x[i] + hh * k2x[i]
                v3[i] = v[i] + hh * k2v[i]
            for i in range(m):
                k3x[i] = v3[i]
                k3v[i] = cg * x3[i]
            for i in range(m):
                x4[i] = x[i] + h * k3x[i]
                v4[i] = v[i] + h * k3v[i]
            for i in range(m):
                k4x[i] = v4[i]
                k4v[i] = cg * x4[i]
            for i in range(m):
                x[i] = x[i] + (h / 6.0) * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i])
                v[i] = v[i] + (h / 6.0) * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i])
            # one Newton step per constraint along its Euclidean gradient
            if K != 0.0:
                nx = 0.0
                for i in range(m):
                    nx += x[i] * x[i]
                a = (1.0 / K - _bilinear(K, x, x, m)) / (2.0 * nx)
                for i in range(m):
                    x[i] = x[i] + a * ((-1.0 if (i == 0 and K < 0.0) else 1.0) * x[i])
                nx = 0.0
                for i in range(m):
                    nx += x[i] * x[i]
                c = _bilinear(K, x, v, m) / nx
                for i in range(m):
                    v[i] = v[i] - c * ((-1.0 if (i == 0 and K < 0.0) else 1.0) * x[i])
            nv = 0.0
            for i in range(m):
                nv += v[i] * v[i]
            b = (speed2 - _bilinear(K, v, v, m)) / (2.0 * nv)
            for i in range(m):
                v[i] = v[i] + b * ((-1.0 if (i == 0 and K < 0.0) else 1.0) * v[i])
    return xa, va

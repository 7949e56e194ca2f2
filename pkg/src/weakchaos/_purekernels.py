"""Pure-Python versions of the inner loops in ``_kernels.pyx``.

Every function here mirrors its compiled twin operation for operation so
that both backends produce the same floating-point results.
"""

import math

import numpy as np


def rk4_jacobi(K, J, P, h, nsteps):
    """Advance J'' = -K J by ``nsteps`` classical RK4 steps of size ``h``."""
    hh = 0.5 * h
    for _ in range(nsteps):
        k1J = P
        k1P = -K * J
        k2J = P + hh * k1P
        k2P = -K * (J + hh * k1J)
        k3J = P + hh * k2P
        k3P = -K * (J + hh * k2J)
        k4J = P + h * k3P
        k4P = -K * (J + h * k3J)
        J = J + (h / 6.0) * (k1J + 2.0 * k2J + 2.0 * k3J + k4J)
        P = P + (h / 6.0) * (k1P + 2.0 * k2P + 2.0 * k3P + k4P)
    return J, P


def rk4_jacobi_samples(K, J, P, h, nsamples, every):
    """Record (J, J') every ``every`` steps, ``nsamples`` times after t=0."""
    Js = np.empty(nsamples + 1)
    Ps = np.empty(nsamples + 1)
    Js[0] = J
    Ps[0] = P
    for i in range(1, nsamples + 1):
        J, P = rk4_jacobi(K, J, P, h, every)
        Js[i] = J
        Ps[i] = P
    return Js, Ps


def benettin_jacobi(K, J, P, h, nsteps, renorm_every):
    """Sum of log stretching factors of (J, J') with periodic renormalization.

    Returns ``(log_sum, J, P)`` where the final pair is normalized.
    """
    log_sum = 0.0
    done = 0
    while done < nsteps:
        n = renorm_every if nsteps - done >= renorm_every else nsteps - done
        J, P = rk4_jacobi(K, J, P, h, n)
        done += n
        r = math.sqrt(J * J + P * P)
        log_sum += math.log(r)
        J = J / r
        P = P / r
    return log_sum, J, P


def logistic_log_sensitivity(a, x0, n):
    """Running sum of ln|f'(x_i)| for f(x) = 1 - a x^2.

    Entry ``k`` holds the log of |prod_{i<=k} f'(x_i)|. Returns the array and
    the index of the first iterate sitting exactly on x = 0 (-1 if none);
    entries from that index on are -inf.
    """
    out = np.empty(n)
    x = x0
    s = 0.0
    hit = -1
    for i in range(n):
        d = 2.0 * a * x
        if d == 0.0:
            hit = i
            out[i:] = -math.inf
            break
        s += math.log(abs(d))
        out[i] = s
        x = 1.0 - a * x * x
    return out, hit


def logistic_iterate(a, x, n):
    for _ in range(n):
        x = 1.0 - a * x * x
    return x


def cat_map_iterate(x, y, n):
    for _ in range(n):
        xn = (2.0 * x + y) % 1.0
        y = (x + y) % 1.0
        x = xn
    return x, y


def map_spectrum_2x2(jac):
    """Gram-Schmidt tangent products over a stack of 2x2 Jacobians.

    Returns ``(sum_log_r11, sum_log_r22, bad_index)``; ``bad_index`` is the
    first step whose determinant magnitude is below 1e-300, else -1.
    """
    u0, u1 = 1.0, 0.0
    w0, w1 = 0.0, 1.0
    s1 = 0.0
    s2 = 0.0
    for i in range(jac.shape[0]):
        a = float(jac[i, 0, 0])
        b = float(jac[i, 0, 1])
        c = float(jac[i, 1, 0])
        d = float(jac[i, 1, 1])
        if abs(a * d - b * c) < 1e-300:
            return s1, s2, i
        p0 = a * u0 + b * u1
        p1 = c * u0 + d * u1
        r0 = a * w0 + b * w1
        r1 = c * w0 + d * w1
        n1 = math.sqrt(p0 * p0 + p1 * p1)
        u0 = p0 / n1
        u1 = p1 / n1
        proj = r0 * u0 + r1 * u1
        r0 = r0 - proj * u0
        r1 = r1 - proj * u1
        n2 = math.sqrt(r0 * r0 + r1 * r1)
        w0 = r0 / n2
        w1 = r1 / n2
        s1 += math.log(n1)
        s2 += math.log(n2)
    return s1, s2, -1


_SPLIT = 134217729.0  # 2**27 + 1


def _bilinear(K, u, v):
    """Compensated sum of s_i u_i v_i, with s_0 = -1 for K < 0 and +1 otherwise.

    Error-free products and sums keep the result accurate to a few ulps of
    the result itself, even when the terms are far larger (hyperboloid
    coordinates grow like cosh t).
    """
    p = 0.0
    e = 0.0
    for i in range(len(u)):
        a = -u[i] if (i == 0 and K < 0.0) else u[i]
        b = v[i]
        # two-product by Dekker splitting
        prod = a * b
        t = _SPLIT * a
        ah = t - (t - a)
        al = a - ah
        t = _SPLIT * b
        bh = t - (t - b)
        bl = b - bh
        perr = ((ah * bh - prod) + ah * bl + al * bh) + al * bl
        # two-sum
        sm = p + prod
        z = sm - p
        serr = (p - (sm - z)) + (prod - z)
        p = sm
        e = e + (serr + perr)
    return p + e


def bilinear_form(K, u, v):
    """Compensated ambient bilinear form of two coordinate vectors."""
    return _bilinear(K, [float(c) for c in u], [float(c) for c in v])


def geodesic_rk4(K, x, v, h, nsteps):
    """RK4 on x'' = -K g(v, v) x with per-step reprojection onto the model.

    g(v, v) is conserved along geodesics, so it is taken once from the
    initial state. Re-evaluating it from rounded far-out states would feed
    ~|v|^2 eps noise into the growth rate.
    """
    x = [float(c) for c in x]
    v = [float(c) for c in v]
    m = len(x)
    hh = 0.5 * h
    speed2 = _bilinear(K, v, v)
    c = -K * speed2
    for _ in range(nsteps):
        k1x = v
        k1v = [c * xi for xi in x]
        x2 = [x[i] + hh * k1x[i] for i in range(m)]
        v2 = [v[i] + hh * k1v[i] for i in range(m)]
        k2x = v2
        k2v = [c * xi for xi in x2]
        x3 = [x[i] + hh * k2x[i] for i in range(m)]
        v3 = [v[i] + hh * k2v[i] for i in range(m)]
        k3x = v3
        k3v = [c * xi for xi in x3]
        x4 = [x[i] + h * k3x[i] for i in range(m)]
        v4 = [v[i] + h * k3v[i] for i in range(m)]
        k4x = v4
        k4v = [c * xi for xi in x4]
        x = [x[i] + (h / 6.0) * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]) for i in range(m)]
        v = [v[i] + (h / 6.0) * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]) for i in range(m)]
        x, v = _reproject(K, x, v, speed2)
    return np.array(x), np.array(v)


def _reproject(K, x, v, speed2=1.0):
    """Pull (x, v) back onto the model with minimal Euclidean corrections.

    Each constraint gets one Newton step along its Euclidean gradient. On
    the hyperboloid far from the origin the model is nearly a light cone and
    rescaling x radially would slide the point along the geodesic; the
    gradient step moves it by about one ulp.
    """
    m = len(x)
    sg = [-1.0 if (i == 0 and K < 0.0) else 1.0 for i in range(m)]
    if K != 0.0:
        nx = 0.0
        for i in range(m):
            nx += x[i] * x[i]
        a = (1.0 / K - _bilinear(K, x, x)) / (2.0 * nx)
        x = [x[i] + a * (sg[i] * x[i]) for i in range(m)]
        nx = 0.0
        for i in range(m):
            nx += x[i] * x[i]
        c = _bilinear(K, x, v) / nx
        v = [v[i] - c * (sg[i] * x[i]) for i in range(m)]
    nv = 0.0
    for i in range(m):
        nv += v[i] * v[i]
    b = (speed2 - _bilinear(K, v, v)) / (2.0 * nv)
    v = [v[i] + b * (sg[i] * v[i]) for i in range(m)]
    return x, v

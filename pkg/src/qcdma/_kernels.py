# Fixed-step RK4 kernels for driven Duffing oscillators.
#
# Force law (per unit omega0 scaling):
#   dx/dt = w0 * p
#   dp/dt = s_lin * w0 * x + s_cub * 4 * mu * x**3 + fd * cos(wd * t) - gam * p
# All kernels are compiled without fastmath so results are IEEE-reproducible.
import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _force(t, x, p, w0, s_lin, s_cub, mu, gam, fd, wd):
    return s_lin * w0 * x + s_cub * 4.0 * mu * x * x * x + fd * math.cos(wd * t) - gam * p


@njit(cache=True, nogil=True)
def rk4_single(x, p, t0, dt, n, w0, s_lin, s_cub, mu, gam, fd, wd, bound):
    """Return (xs, ps, n_ok); n_ok < n + 1 signals divergence at that index."""
    xs = np.empty(n + 1)
    ps = np.empty(n + 1)
    xs[0] = x
    ps[0] = p
    h2 = 0.5 * dt
    for i in range(n):
        t = t0 + i * dt
        th = t + h2
        t1 = t0 + (i + 1) * dt
        k1x = w0 * p
        k1p = _force(t, x, p, w0, s_lin, s_cub, mu, gam, fd, wd)
        x2 = x + h2 * k1x
        p2 = p + h2 * k1p
        k2x = w0 * p2
        k2p = _force(th, x2, p2, w0, s_lin, s_cub, mu, gam, fd, wd)
        x3 = x + h2 * k2x
        p3 = p + h2 * k2p
        k3x = w0 * p3
        k3p = _force(th, x3, p3, w0, s_lin, s_cub, mu, gam, fd, wd)
        x4 = x + dt * k3x
        p4 = p + dt * k3p
        k4x = w0 * p4
        k4p = _force(t1, x4, p4, w0, s_lin, s_cub, mu, gam, fd, wd)
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        p = p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        xs[i + 1] = x
        ps[i + 1] = p
        if not (abs(x) <= bound and abs(p) <= bound):
            return xs, ps, i + 2
    return xs, ps, n + 1


@njit(cache=True, nogil=True)
def rk4_pair(xa, pa, xb, pb, t0, dt, n, w0, s_lin, s_cub, mu, gam, fd, wd, k, one_way, bound):
    """Two oscillators coupled through k * (xa - xb).

    Bidirectional: a feels -k(xa-xb), b feels +k(xa-xb).
    one_way: only b feels the coupling (a is the drive).
    """
    xas = np.empty(n + 1)
    pas = np.empty(n + 1)
    xbs = np.empty(n + 1)
    pbs = np.empty(n + 1)
    xas[0] = xa
    pas[0] = pa
    xbs[0] = xb
    pbs[0] = pb
    ka = 0.0 if one_way else k
    h2 = 0.5 * dt
    for i in range(n):
        t = t0 + i * dt
        th = t + h2
        t1 = t0 + (i + 1) * dt

        c = xa - xb
        a1x = w0 * pa
        a1p = _force(t, xa, pa, w0, s_lin, s_cub, mu, gam, fd, wd) - ka * c
        b1x = w0 * pb
        b1p = _force(t, xb, pb, w0, s_lin, s_cub, mu, gam, fd, wd) + k * c

        xa2 = xa + h2 * a1x
        pa2 = pa + h2 * a1p
        xb2 = xb + h2 * b1x
        pb2 = pb + h2 * b1p
        c = xa2 - xb2
        a2x = w0 * pa2
        a2p = _force(th, xa2, pa2, w0, s_lin, s_cub, mu, gam, fd, wd) - ka * c
        b2x = w0 * pb2
        b2p = _force(th, xb2, pb2, w0, s_lin, s_cub, mu, gam, fd, wd) + k * c

        xa3 = xa + h2 * a2x
        pa3 = pa + h2 * a2p
        xb3 = xb + h2 * b2x
        pb3 = pb + h2 * b2p
        c = xa3 - xb3
        a3x = w0 * pa3
        a3p = _force(th, xa3, pa3, w0, s_lin, s_cub, mu, gam, fd, wd) - ka * c
        b3x = w0 * pb3
        b3p = _force(th, xb3, pb3, w0, s_lin, s_cub, mu, gam, fd, wd) + k * c

        xa4 = xa + dt * a3x
        pa4 = pa + dt * a3p
        xb4 = xb + dt * b3x
        pb4 = pb + dt * b3p
        c = xa4 - xb4
        a4x = w0 * pa4
        a4p = _force(t1, xa4, pa4, w0, s_lin, s_cub, mu, gam, fd, wd) - ka * c
        b4x = w0 * pb4
        b4p = _force(t1, xb4, pb4, w0, s_lin, s_cub, mu, gam, fd, wd) + k * c

        xa = xa + dt / 6.0 * (a1x + 2.0 * a2x + 2.0 * a3x + a4x)
        pa = pa + dt / 6.0 * (a1p + 2.0 * a2p + 2.0 * a3p + a4p)
        xb = xb + dt / 6.0 * (b1x + 2.0 * b2x + 2.0 * b3x + b4x)
        pb = pb + dt / 6.0 * (b1p + 2.0 * b2p + 2.0 * b3p + b4p)
        xas[i + 1] = xa
        pas[i + 1] = pa
        xbs[i + 1] = xb
        pbs[i + 1] = pb
        if not (abs(xa) <= bound and abs(pa) <= bound and abs(xb) <= bound and abs(pb) <= bound):
            return xas, pas, xbs, pbs, i + 2
    return xas, pas, xbs, pbs, n + 1


@njit(cache=True, nogil=True)
def rk4_tangent(x, p, t0, dt, n_transient, n_blocks, block, w0, s_lin, s_cub, mu, gam, fd, wd, bound):
    """Benettin-style maximal exponent with renormalization every `block` steps.

    Returns (history, ok): history[j] is the running estimate after block j.
    """
    u = 1.0
    v = 0.0
    h2 = 0.5 * dt
    hist = np.empty(n_blocks)
    acc = 0.0
    i = 0
    total = n_transient + n_blocks * block
    j = 0
    while i < total:
        t = t0 + i * dt
        th = t + h2
        t1 = t0 + (i + 1) * dt
        # linearization: du = w0 v ; dv = (s_lin w0 + 12 s_cub mu x^2) u - gam v
        k1x = w0 * p
        k1p = _force(t, x, p, w0, s_lin, s_cub, mu, gam, fd, wd)
        k1u = w0 * v
        k1v = (s_lin * w0 + 12.0 * s_cub * mu * x * x) * u - gam * v
        x2 = x + h2 * k1x
        p2 = p + h2 * k1p
        u2 = u + h2 * k1u
        v2 = v + h2 * k1v
        k2x = w0 * p2
        k2p = _force(th, x2, p2, w0, s_lin, s_cub, mu, gam, fd, wd)
        k2u = w0 * v2
        k2v = (s_lin * w0 + 12.0 * s_cub * mu * x2 * x2) * u2 - gam * v2
        x3 = x + h2 * k2x
        p3 = p + h2 * k2p
        u3 = u + h2 * k2u
        v3 = v + h2 * k2v
        k3x = w0 * p3
        k3p = _force(th, x3, p3, w0, s_lin, s_cub, mu, gam, fd, wd)
        k3u = w0 * v3
        k3v = (s_lin * w0 + 12.0 * s_cub * mu * x3 * x3) * u3 - gam * v3
        x4 = x + dt * k3x
        p4 = p + dt * k3p
        u4 = u + dt * k3u
        v4 = v + dt * k3v
        k4x = w0 * p4
        k4p = _force(t1, x4, p4, w0, s_lin, s_cub, mu, gam, fd, wd)
        k4u = w0 * v4
        k4v = (s_lin * w0 + 12.0 * s_cub * mu * x4 * x4) * u4 - gam * v4
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        p = p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        u = u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        i += 1
        if not (abs(x) <= bound and abs(p) <= bound):
            return hist[:j], False
        if i <= n_transient:
            if i == n_transient or (i % block) == 0:
                nrm = math.sqrt(u * u + v * v)
                u /= nrm
                v /= nrm
            continue
        if (i - n_transient) % block == 0:
            nrm = math.sqrt(u * u + v * v)
            acc += math.log(nrm)
            u /= nrm
            v /= nrm
            hist[j] = acc / ((j + 1) * block * dt)
            j += 1
    return hist, True

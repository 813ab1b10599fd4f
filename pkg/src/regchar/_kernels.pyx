# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of _kernels_py: scalar loops over the grid evaluations.

Same contracts as the numpy fallback; selected by regchar.kernels when the
extension is importable.  Keep the two implementations in step: the parity
tests compare them element by element.
"""

from libc.math cimport atan2, cos, exp, fabs, fmod, log, pow, sin, sqrt

import numpy as np

IMPLEMENTATION = "cython"

cdef double PI = 3.14159265358979323846264338328
cdef double TWO_PI = 6.283185307179586476925286766559


cdef inline double _psi_s(double v) nogil:
    if v >= 1.0 or v <= -1.0:
        return 0.0
    return exp(-1.0 / (1.0 - v * v))


cdef inline double _bump3_s(double theta, double s, double u,
                            double t0, double s0, double u0,
                            double ht, double hs, double hu, double amp) nogil:
    # wrap theta - t0 into [-pi, pi), matching np.mod(x + pi, 2 pi) - pi
    cdef double dt = fmod(theta - t0 + PI, TWO_PI)
    if dt < 0.0:
        dt += TWO_PI
    dt -= PI
    return amp * _psi_s(dt / ht) * _psi_s((s - s0) / hs) * _psi_s((u - u0) / hu)


cdef inline double _smoothstep_s(double x) nogil:
    cdef double lo, hi
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    lo = exp(-1.0 / x)
    hi = exp(-1.0 / (1.0 - x))
    return lo / (lo + hi)


cdef inline double _atlas_weight_s(double n, double t, double power,
                                   double r_inner, double r_outer) nogil:
    cdef double rho = sqrt(n * n + t * t)
    cdef double a_z = _smoothstep_s((r_outer - rho) / (r_outer - r_inner))
    cdef double at = fabs(t)
    cdef double tz = pow(at, power)
    cdef double tw = pow(at / (rho * rho), power)
    return a_z * tz + (1.0 - a_z) * tw


def iwasawa_batch(a, b, c, d):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0], i
    theta = np.empty(n)
    s = np.empty(n)
    u = np.empty(n)
    cdef double[::1] tv = theta, sv = s, uv = u
    cdef double r2
    with nogil:
        for i in range(n):
            r2 = av[i] * av[i] + cv[i] * cv[i]
            tv[i] = atan2(cv[i], av[i])
            sv[i] = log(r2)
            uv[i] = (av[i] * bv[i] + cv[i] * dv[i]) / r2
    return theta, s, u


def bump3_batch(theta, s, u, params):
    cdef double[::1] tv = np.ascontiguousarray(theta, dtype=np.float64)
    cdef double[::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef double t0 = params[0], s0 = params[1], u0 = params[2]
    cdef double ht = params[3], hs = params[4], hu = params[5], amp = params[6]
    cdef Py_ssize_t n = tv.shape[0], i
    out = np.empty(n)
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _bump3_s(tv[i], sv[i], uv[i], t0, s0, u0, ht, hs, hu, amp)
    return out


def group_bump_batch(a, b, c, d, params):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef double t0 = params[0], s0 = params[1], u0 = params[2]
    cdef double ht = params[3], hs = params[4], hu = params[5], amp = params[6]
    cdef Py_ssize_t n = av.shape[0], i
    out = np.empty(n)
    cdef double[::1] ov = out
    cdef double r2, theta, s, u
    with nogil:
        for i in range(n):
            r2 = av[i] * av[i] + cv[i] * cv[i]
            theta = atan2(cv[i], av[i])
            s = log(r2)
            u = (av[i] * bv[i] + cv[i] * dv[i]) / r2
            ov[i] = _bump3_s(theta, s, u, t0, s0, u0, ht, hs, hu, amp)
    return out


def kf_batch(n, t, k_nodes, k_weights, params):
    cdef double[::1] nv = np.ascontiguousarray(n, dtype=np.float64)
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef double[::1] kn = np.ascontiguousarray(k_nodes, dtype=np.float64)
    cdef double[::1] kw = np.ascontiguousarray(k_weights, dtype=np.float64)
    cdef double t0 = params[0], s0 = params[1], u0 = params[2]
    cdef double ht = params[3], hs = params[4], hu = params[5], amp = params[6]
    cdef Py_ssize_t m = nv.shape[0], K = kn.shape[0], i, j
    out = np.zeros(m)
    cdef double[::1] ov = out
    cdef double at, nn, ck, sk, m11, m12, m21, m22, r2, theta, s, u, acc
    with nogil:
        for i in range(m):
            at = fabs(tv[i])
            nn = nv[i]
            acc = 0.0
            for j in range(K):
                ck = cos(kn[j])
                sk = sin(kn[j])
                m11 = ck + sk * nn / at
                m12 = -sk * (at + nn * nn / at)
                m21 = sk / at
                m22 = ck - sk * nn / at
                r2 = m11 * m11 + m21 * m21
                theta = atan2(m21, m11)
                s = log(r2)
                u = (m11 * m12 + m21 * m22) / r2
                acc += kw[j] * _bump3_s(theta, s, u, t0, s0, u0, ht, hs, hu, amp)
            ov[i] = acc
    return out


def mobius_inverse_batch(a, b, c, d, double n0, double t0):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0], i
    nr = np.empty(n)
    tr = np.empty(n)
    cdef double[::1] nv = nr, tv = tr
    cdef double num_r, num_i, den_r, den_i, mod2
    with nogil:
        for i in range(n):
            num_r = dv[i] * n0 - bv[i]
            num_i = dv[i] * t0
            den_r = -cv[i] * n0 + av[i]
            den_i = -cv[i] * t0
            mod2 = den_r * den_r + den_i * den_i
            nv[i] = (num_r * den_r + num_i * den_i) / mod2
            tv[i] = (num_i * den_r - num_r * den_i) / mod2
    return nr, tr


def plane_bump_batch(n, t, params):
    cdef double[::1] nv = np.ascontiguousarray(n, dtype=np.float64)
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef double n0 = params[0], t0 = params[1], hn = params[2], ht = params[3], amp = params[4]
    cdef Py_ssize_t m = nv.shape[0], i
    out = np.empty(m)
    cdef double[::1] ov = out
    with nogil:
        for i in range(m):
            ov[i] = amp * _psi_s((nv[i] - n0) / hn) * _psi_s((tv[i] - t0) / ht)
    return out


def atlas_weight_batch(n, t, double s_exponent, double r_inner, double r_outer):
    cdef double[::1] nv = np.ascontiguousarray(n, dtype=np.float64)
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t m = nv.shape[0], i
    out = np.empty(m)
    cdef double[::1] ov = out
    cdef double power = s_exponent + 1.0
    with nogil:
        for i in range(m):
            ov[i] = _atlas_weight_s(nv[i], tv[i], power, r_inner, r_outer)
    return out


def char_weight_batch(a, b, c, d, double s_exponent, double r_inner, double r_outer,
                      double boundary_at_minus_one):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef Py_ssize_t m = av.shape[0], i
    weights = np.zeros(m)
    parabolic = np.zeros(m, dtype=bool)
    cdef double[::1] wv = weights
    cdef unsigned char[::1] pv = parabolic.view(np.uint8)
    cdef double power = s_exponent + 1.0
    cdef double tr, disc, mu_r, mu_i, v1_r, v1_i, v2_r, v2_i, mod2, zn, zt
    cdef double det, lam, det_p, det_m, root
    cdef bint use_b
    with nogil:
        for i in range(m):
            tr = av[i] + dv[i]
            disc = tr * tr - 4.0
            if fabs(disc) <= 1e-12 * (1.0 + tr * tr):
                pv[i] = 1
                continue
            if disc < 0.0:
                mu_r = tr / 2.0
                mu_i = sqrt(-disc) / 2.0
                use_b = fabs(bv[i]) >= fabs(cv[i])
                if use_b:
                    v1_r = bv[i]; v1_i = 0.0
                    v2_r = mu_r - av[i]; v2_i = mu_i
                else:
                    v1_r = mu_r - dv[i]; v1_i = mu_i
                    v2_r = cv[i]; v2_i = 0.0
                mod2 = v2_r * v2_r + v2_i * v2_i
                zn = (v1_r * v2_r + v1_i * v2_i) / mod2
                zt = fabs((v1_i * v2_r - v1_r * v2_i) / mod2)
                det = 4.0 - tr * tr
                wv[i] = (_atlas_weight_s(zn, zt, power, r_inner, r_outer)
                         + _atlas_weight_s(zn, -zt, power, r_inner, r_outer)) / det
            else:
                if s_exponent == -1.0 and boundary_at_minus_one != 0.0:
                    root = sqrt(disc)
                    lam = (tr + root) / 2.0
                    det_p = (1.0 - lam * lam) * (1.0 - lam * lam)
                    det_m = (1.0 - 1.0 / (lam * lam)) * (1.0 - 1.0 / (lam * lam))
                    wv[i] = boundary_at_minus_one * (1.0 / det_p + 1.0 / det_m)
    return weights, parabolic


def kernel_row_batch(double nx, double tx, ny, ty, k_nodes, k_weights, params):
    cdef double[::1] nv = np.ascontiguousarray(ny, dtype=np.float64)
    cdef double[::1] tv = np.ascontiguousarray(ty, dtype=np.float64)
    cdef double[::1] kn = np.ascontiguousarray(k_nodes, dtype=np.float64)
    cdef double[::1] kw = np.ascontiguousarray(k_weights, dtype=np.float64)
    cdef double t0 = params[0], s0 = params[1], u0 = params[2]
    cdef double ht = params[3], hs = params[4], hu = params[5], amp = params[6]
    cdef Py_ssize_t m = nv.shape[0], K = kn.shape[0], i, j
    out = np.zeros(m)
    cdef double[::1] ov = out
    cdef double rx = sqrt(fabs(tx))
    cdef double gx11 = rx, gx12 = nx / rx, gx22 = 1.0 / rx
    cdef double ry, ck, sk, k11, k12, k21, k22, m11, m12, m21, m22
    cdef double r2, theta, s, u, acc, nyy
    with nogil:
        for i in range(m):
            ry = sqrt(fabs(tv[i]))
            nyy = nv[i]
            acc = 0.0
            for j in range(K):
                ck = cos(kn[j])
                sk = sin(kn[j])
                k11 = ck / ry
                k12 = -ck * nyy / ry - sk * ry
                k21 = sk / ry
                k22 = -sk * nyy / ry + ck * ry
                m11 = gx11 * k11 + gx12 * k21
                m12 = gx11 * k12 + gx12 * k22
                m21 = gx22 * k21
                m22 = gx22 * k22
                r2 = m11 * m11 + m21 * m21
                theta = atan2(m21, m11)
                s = log(r2)
                u = (m11 * m12 + m21 * m22) / r2
                acc += kw[j] * _bump3_s(theta, s, u, t0, s0, u0, ht, hs, hu, amp)
            ov[i] = acc
    return out

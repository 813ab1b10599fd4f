"""Pure numpy implementation of the hot kernels.

These routines carry the grid-evaluation load of the character experiments:
Iwasawa coordinates, product bumps, the diagonal-density conjugation loop and
the per-element fixed-point weights.  A Cython twin (_kernels.pyx) implements
the same contracts; `regchar.kernels` picks whichever is available.

All group elements are passed as four flat float64 arrays (a, b, c, d) for
the entries [[a, b], [c, d]].
"""

import numpy as np

IMPLEMENTATION = "python"

TWO_PI = 2.0 * np.pi


def iwasawa_batch(a, b, c, d):
    """Iwasawa coordinates (theta, s, u) of g = k_theta a_s n_u.

    theta = atan2(c, a), e^s = a^2 + c^2, u = (ab + cd) / (a^2 + c^2).
    """
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    r2 = a * a + c * c
    theta = np.arctan2(c, a)
    s = np.log(r2)
    u = (a * b + c * d) / r2
    return theta, s, u


def _psi(v):
    out = np.zeros_like(v)
    inside = np.abs(v) < 1.0
    vi = v[inside]
    out[inside] = np.exp(-1.0 / (1.0 - vi * vi))
    return out


def bump3_batch(theta, s, u, params):
    """Product bump in Iwasawa coordinates.

    params = (theta0, s0, u0, h_theta, h_s, h_u, amplitude); the theta
    distance is wrapped to (-pi, pi].
    """
    theta0, s0, u0, ht, hs, hu, amp = params
    dt = np.mod(np.asarray(theta) - theta0 + np.pi, TWO_PI) - np.pi
    return amp * _psi(dt / ht) * _psi((np.asarray(s) - s0) / hs) * _psi((np.asarray(u) - u0) / hu)


def group_bump_batch(a, b, c, d, params):
    """Bump evaluated on matrices through their Iwasawa coordinates."""
    theta, s, u = iwasawa_batch(a, b, c, d)
    return bump3_batch(theta, s, u, params)


def kf_batch(n, t, k_nodes, k_weights, params):
    """Diagonal density k_f at plane points (n, t) with t != 0.

    k_f(p) = sum_j w_j f(g_p k_{theta_j} g_p^{-1}) over the circle rule; the
    conjugated matrix has the closed-form entries below (r^2 = |t|).
    """
    n = np.asarray(n, dtype=float)[:, None]
    t = np.asarray(t, dtype=float)[:, None]
    at = np.abs(t)
    ck = np.cos(k_nodes)[None, :]
    sk = np.sin(k_nodes)[None, :]
    m11 = ck + sk * n / at
    m12 = -sk * (at + n * n / at)
    m21 = sk / at
    m22 = ck - sk * n / at
    vals = group_bump_batch(m11.ravel(), m12.ravel(), m21.ravel(), m22.ravel(), params)
    vals = vals.reshape(m11.shape)
    return vals @ np.asarray(k_weights)


def mobius_inverse_batch(a, b, c, d, n0, t0):
    """Coordinates of g^{-1} . (n0 + i t0) for a batch of g."""
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    z = complex(n0, t0)
    num = d * z - b
    den = -c * z + a
    zp = num / den
    return zp.real, zp.imag


def plane_bump_batch(n, t, params):
    """2-D product bump on the chart plane; params = (n0, t0, hn, ht, amp)."""
    n0, t0, hn, ht, amp = params
    return amp * _psi((np.asarray(n) - n0) / hn) * _psi((np.asarray(t) - t0) / ht)


def _smoothstep(x):
    lo = np.zeros_like(x)
    pos = x > 0
    lo[pos] = np.exp(-1.0 / x[pos])
    hi = np.zeros_like(x)
    neg = x < 1
    hi[neg] = np.exp(-1.0 / (1.0 - x[neg]))
    out = np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, lo / (lo + hi + ((lo + hi) == 0))))
    return out


def atlas_weight_batch(n, t, s_exponent, r_inner, r_outer):
    """Chart weight alpha_z |t_z|^{s+1} + alpha_w |t_w|^{s+1} at (n, t)."""
    n = np.asarray(n, dtype=float)
    t = np.asarray(t, dtype=float)
    rho = np.sqrt(n * n + t * t)
    a_z = _smoothstep((r_outer - rho) / (r_outer - r_inner))
    power = s_exponent + 1.0
    tz = np.abs(t) ** power
    tw = (np.abs(t) / (rho * rho)) ** power
    return a_z * tz + (1.0 - a_z) * tw


def char_weight_batch(a, b, c, d, s_exponent, r_inner, r_outer, boundary_at_minus_one):
    """Fixed-point weight W_s(g) summed over Fix(g), plus a parabolic mask.

    Interior (elliptic) fixed points carry weight(n, +-t)/ (4 - tr^2);
    boundary fixed points carry 0 for s > -1 and `boundary_at_minus_one`
    (0 or 1, the continuation/plain rule) per point at s = -1.  Parabolic
    elements get weight 0 and are flagged for the caller.
    """
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    tr = a + d
    disc = tr * tr - 4.0
    parabolic = np.abs(disc) <= 1e-12 * (1.0 + tr * tr)
    weights = np.zeros_like(tr)

    elliptic = disc < 0
    if np.any(elliptic):
        ae, be, ce, de = a[elliptic], b[elliptic], c[elliptic], d[elliptic]
        tre = tr[elliptic]
        mu = tre / 2.0 + 1j * np.sqrt(-disc[elliptic]) / 2.0
        use_b = np.abs(be) >= np.abs(ce)
        v1 = np.where(use_b, be, mu - de)
        v2 = np.where(use_b, mu - ae, ce)
        z = v1 / v2
        nn = z.real
        tt = np.abs(z.imag)
        det = 4.0 - tre * tre
        w_up = atlas_weight_batch(nn, tt, s_exponent, r_inner, r_outer)
        w_lo = atlas_weight_batch(nn, -tt, s_exponent, r_inner, r_outer)
        weights[elliptic] = (w_up + w_lo) / det

    hyperbolic = (disc > 0) & ~parabolic
    if np.any(hyperbolic) and s_exponent == -1.0 and boundary_at_minus_one != 0.0:
        trh = tr[hyperbolic]
        root = np.sqrt(disc[hyperbolic])
        lam = (trh + root) / 2.0
        det_plus = (1.0 - lam * lam) ** 2
        det_minus = (1.0 - 1.0 / (lam * lam)) ** 2
        weights[hyperbolic] = boundary_at_minus_one * (1.0 / det_plus + 1.0 / det_minus)

    weights[parabolic] = 0.0
    return weights, parabolic


def kernel_row_batch(nx, tx, ny, ty, k_nodes, k_weights, params):
    """Kernel values K(x, y_j) = int_K f(g_x k g_{y_j}^{-1}) dk for one x and
    a batch of y points in the same orbit."""
    rx = np.sqrt(abs(tx))
    gx = np.array([[rx, nx / rx], [0.0, 1.0 / rx]])
    ny = np.asarray(ny, dtype=float)[:, None]
    ty = np.asarray(ty, dtype=float)[:, None]
    ry = np.sqrt(np.abs(ty))
    ck = np.cos(k_nodes)[None, :]
    sk = np.sin(k_nodes)[None, :]
    # g_y^{-1} = [[1/ry, -ny/ry], [0, ry]]
    k11, k12, k21, k22 = ck / ry, -ck * ny / ry - sk * ry, sk / ry, -sk * ny / ry + ck * ry
    m11 = gx[0, 0] * k11 + gx[0, 1] * k21
    m12 = gx[0, 0] * k12 + gx[0, 1] * k22
    m21 = gx[1, 0] * k11 + gx[1, 1] * k21
    m22 = gx[1, 0] * k12 + gx[1, 1] * k22
    vals = group_bump_batch(m11.ravel(), m12.ravel(), m21.ravel(), m22.ravel(), params)
    return vals.reshape(m11.shape) @ np.asarray(k_weights)

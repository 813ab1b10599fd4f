"""Smooth compactly supported bump profiles.

The basic profile is psi(v) = exp(-1/(1-v^2)) on |v| < 1 (zero outside), the
classical C-infinity bump.  Taylor coefficients at 0 are computed exactly by
power-series composition, which the divergent-integral continuation needs at
1e-8 accuracy and better.
"""

import numpy as np


def psi(v):
    """exp(-1/(1-v^2)) on |v| < 1, else 0.  Vectorized."""
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    inside = np.abs(v) < 1.0
    vi = v[inside]
    out[inside] = np.exp(-1.0 / (1.0 - vi * vi))
    return out if out.shape else float(out)


def _exp_series(a):
    """Power series of exp(A(t)) given coefficients a of A(t).

    Standard recurrence: b_0 = exp(a_0), n b_n = sum_{k=1..n} k a_k b_{n-k}.
    """
    n = len(a)
    b = np.zeros(n)
    b[0] = np.exp(a[0])
    for m in range(1, n):
        acc = 0.0
        for k in range(1, m + 1):
            acc += k * a[k] * b[m - k]
        b[m] = acc / m
    return b


def psi_series(n_terms=16):
    """Taylor coefficients of psi at 0: psi(t) = e^{-1} exp(-t^2 - t^4 - ...)."""
    a = np.zeros(n_terms)
    a[0] = -1.0
    for k in range(2, n_terms, 2):
        a[k] = -1.0
    return _exp_series(a)


def multiply_series(a, b):
    n = min(len(a), len(b))
    out = np.zeros(n)
    for k in range(n):
        out[k] = np.dot(a[: k + 1], b[: k + 1][::-1])
    return out


class Smooth1D:
    """A 1-D function with values everywhere and Taylor data at 0.

    `series[k]` is the coefficient of t^k, i.e. f^(k)(0)/k!.  Profiles that
    are not smooth at 0 (like |t| psi) carry only the coefficients that
    exist; requesting more raises.
    """

    def __init__(self, fn, series, support=(-1.0, 1.0)):
        self._fn = fn
        self._series = np.asarray(series, dtype=float)
        self.support = support

    def __call__(self, t):
        return self._fn(np.asarray(t, dtype=float))

    def taylor_coefficient(self, k):
        if k >= len(self._series):
            raise ValueError(f"Taylor coefficient {k} not available")
        return float(self._series[k])

    def derivative_at_zero(self, k):
        from math import factorial

        return self.taylor_coefficient(k) * factorial(k)

    @property
    def n_coefficients(self):
        return len(self._series)


def bump(n_terms=24):
    """The raw profile psi as a Smooth1D (psi(0) = 1/e)."""
    return Smooth1D(psi, psi_series(n_terms))


def normalized_bump(n_terms=24):
    """psi scaled so the value at 0 is exactly 1."""
    scale = np.e
    s = psi_series(n_terms) * scale
    return Smooth1D(lambda t: scale * psi(t), s)


def poly_times_bump(coeffs, n_terms=24):
    """P(t) * psi(t) for P given by `coeffs` (ascending order)."""
    c = np.zeros(n_terms)
    c[: len(coeffs)] = coeffs
    s = multiply_series(c, psi_series(n_terms))

    def fn(t):
        return np.polynomial.polynomial.polyval(t, np.asarray(coeffs, dtype=float)) * psi(t)

    return Smooth1D(fn, s)


def abs_times_bump(n_terms=24):
    """|t| * psi(t): continuous with value 0 at 0, not differentiable there.

    Only the zeroth Taylor coefficient is exposed.
    """
    return Smooth1D(lambda t: np.abs(t) * psi(t), [0.0])


def smoothstep(x):
    """C-infinity transition: 0 for x <= 0, 1 for x >= 1, monotone between."""
    x = np.asarray(x, dtype=float)

    def half(u):
        out = np.zeros_like(u)
        pos = u > 0
        out[pos] = np.exp(-1.0 / u[pos])
        return out

    lo = half(x)
    hi = half(1.0 - x)
    out = np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, lo / (lo + hi + (lo + hi == 0))))
    return out if out.shape else float(out)


class PlaneBump:
    """Product bump on the (n, t) chart plane, supported in one open orbit.

    f(n, t) = psi((n-n0)/hn) * psi((t-t0)/ht); requires |t0| > ht so the
    support stays inside an open orbit.
    """

    def __init__(self, center, halfwidths, amplitude=1.0):
        self.center = (float(center[0]), float(center[1]))
        self.halfwidths = (float(halfwidths[0]), float(halfwidths[1]))
        self.amplitude = float(amplitude)
        if abs(self.center[1]) <= self.halfwidths[1]:
            raise ValueError("support must avoid the boundary t = 0")

    @property
    def box(self):
        (n0, t0), (hn, ht) = self.center, self.halfwidths
        return ((n0 - hn, n0 + hn), (t0 - ht, t0 + ht))

    def __call__(self, n, t):
        (n0, t0), (hn, ht) = self.center, self.halfwidths
        return self.amplitude * psi((np.asarray(n) - n0) / hn) * psi((np.asarray(t) - t0) / ht)

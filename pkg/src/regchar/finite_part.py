"""Meromorphic continuation of t -> int |t|^s phi(t) dt in one dimension.

Taylor subtraction on |t| <= 1 turns the integral into an entire part plus
explicit pole terms 2 phi^(2m)(0) / (2m)! / (s + 2m + 1) at the negative odd
integers.  The Laurent data at s = -1 realizes the distributional inverse of
|t|: the coefficient S_0 satisfies S_0(|t| psi) = int psi.
"""

from dataclasses import dataclass
from math import factorial

import numpy as np

from .quadrature import graded_panel_rule, integrate, panel_rule


@dataclass
class MeromorphicValue:
    """Value of the continuation at s, with an optional pole record."""

    s: complex
    value: complex
    pole: dict | None = None

    @property
    def is_pole(self):
        return self.pole is not None

    def to_json(self):
        out = {"s": [self.s.real, self.s.imag], "value": [self.value.real, self.value.imag]}
        if self.pole:
            out["pole"] = self.pole
        return out


def _pole_index(s, tol=1e-12):
    """m such that s = -(2m+1), or None."""
    if abs(s.imag) > tol:
        return None
    k = round((-s.real - 1.0) / 2.0)
    if k >= 0 and abs(s.real + 2 * k + 1) <= tol:
        return int(k)
    return None


def _taylor_order(s, phi):
    """Subtraction order: enough terms for an integrable, well-resolved
    remainder, limited by the available Taylor data."""
    need = int(np.ceil(-s.real)) + 3
    return max(0, min(need, phi.n_coefficients - 1))


def _inner_outer_rules(support, inner_levels=48, order=16):
    lo, hi = support
    out_rules = []
    if hi > 1.0:
        out_rules.append(panel_rule(1.0, hi, 16, order))
    if lo < -1.0:
        out_rules.append(panel_rule(lo, -1.0, 16, order))
    pos = graded_panel_rule(0.0, 1.0, inner_levels, order)
    return pos, out_rules


def _inner_integral(phi, s, N, weight=None):
    """int_{|t|<=1} |t|^s (phi - Taylor_N phi)(t) dt with graded panels."""
    nodes, w = _inner_outer_rules(phi.support)[0]

    def remainder(t):
        vals = phi(t)
        for k in range(N):
            vals = vals - phi.taylor_coefficient(k) * t**k
        return vals

    total = 0.0 + 0.0j
    for sign in (1.0, -1.0):
        t = sign * nodes
        vals = remainder(t) * np.exp(s * np.log(nodes))
        if weight is not None:
            vals = vals * weight(nodes)
        total += integrate(vals, w)
    return total


def _outer_integral(phi, s, weight=None):
    total = 0.0 + 0.0j
    for nodes, w in _inner_outer_rules(phi.support)[1]:
        vals = phi(nodes) * np.exp(s * np.log(np.abs(nodes)))
        if weight is not None:
            vals = vals * weight(np.abs(nodes))
        total += integrate(vals, w)
    return total


def finite_part(phi, s):
    """Continuation of int |t|^s phi(t) dt at s.

    Away from the poles this returns the analytic value; at s = -(2m+1) it
    returns the finite part together with a pole record carrying the residue
    2 phi^(2m)(0) / (2m)!.
    """
    s = complex(s)
    m = _pole_index(s)
    N = _taylor_order(s, phi)
    if m is not None and 2 * m >= N:
        raise ValueError(f"need Taylor data of order {2 * m} at the pole s = {s.real}")

    value = _inner_integral(phi, s, N) + _outer_integral(phi, s)
    pole = None
    for k in range(0, N, 2):
        coeff = 2.0 * phi.taylor_coefficient(k)
        if m is not None and k == 2 * m:
            # the singular term: its residue is recorded (no record when the
            # even derivative vanishes and the singularity is removable)
            if coeff != 0.0:
                pole = {"location": -(2 * m + 1), "residue": coeff}
            continue
        value += coeff / (s + k + 1.0)
    if abs(value.imag) < 1e-300 or abs(s.imag) == 0.0:
        value = complex(value.real, value.imag)
    return MeromorphicValue(s=s, value=value, pole=pole)


def residue_at(phi, location):
    """Residue of the continuation at s = -(2m+1): 2 phi^(2m)(0) / (2m)!."""
    if location >= 0 or location % 2 == 0:
        raise ValueError("poles sit at negative odd integers")
    m = (-location - 1) // 2
    return 2.0 * phi.taylor_coefficient(2 * m)


def laurent_at_minus_one(phi, n_coefficients=3):
    """Laurent coefficients [S_-1, S_0, S_1, ...] at s = -1.

    S_-1 = 2 phi(0); S_j for j >= 0 comes from the j-th s-derivative, i.e.
    log-weighted integrals of the subtracted remainder plus the expansion of
    the pole terms with k > 0.
    """
    N = max(1, _taylor_order(complex(-1.0), phi))
    s = complex(-1.0)
    out = [2.0 * phi.taylor_coefficient(0)]
    for j in range(n_coefficients):
        def logweight(t, j=j):
            return np.log(t) ** j / factorial(j)

        val = _inner_integral(phi, s, N, weight=logweight) + _outer_integral(phi, s, weight=logweight)
        # pole terms 2 c_k / (s + k + 1) with k >= 2 even expand around -1 as
        # 2 c_k sum_j (-1)^j (s+1)^j / k^{j+1}
        for k in range(2, N, 2):
            val += 2.0 * phi.taylor_coefficient(k) * (-1.0) ** j / k ** (j + 1)
        out.append(complex(val).real)
    return out

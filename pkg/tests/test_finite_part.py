"""Continuation of int |t|^s phi dt: poles, residues, Laurent data."""

from fractions import Fraction

import numpy as np
import pytest

from regchar import bump
from regchar import finite_part as fpart


def numeric_limit_residue(phi, location, eps_values=(1e-2, 1e-3)):
    """Oracle: residue as the limit of (s - location) * I(s) along real s,
    linearly extrapolated from two epsilon values."""
    vals = []
    for eps in eps_values:
        s = location + eps
        v = fpart.finite_part(phi, s).value.real
        # remove the regular part estimate by multiplying with eps
        vals.append(eps * v)
    # r(eps) = R + c eps: extrapolate to eps = 0
    e1, e2 = eps_values
    r1, r2 = vals
    return (r2 * e1 - r1 * e2) / (e1 - e2)


class TestPolesAndResidues:
    def test_residue_at_minus_one(self):
        phi = bump.normalized_bump()
        res = fpart.residue_at(phi, -1)
        assert res == 2.0
        mv = fpart.finite_part(phi, -1.0)
        assert mv.is_pole and mv.pole["location"] == -1
        assert mv.pole["residue"] == pytest.approx(2.0, abs=1e-15)

    def test_residue_matches_numeric_limit(self):
        phi = bump.normalized_bump()
        oracle = numeric_limit_residue(phi, -1.0)
        assert fpart.residue_at(phi, -1) == pytest.approx(oracle, rel=1e-4)

    def test_residue_at_minus_three(self):
        phi = bump.normalized_bump()
        # residue at -3 is 2 phi''(0) / 2! = phi''(0)
        expected = phi.derivative_at_zero(2)
        assert fpart.residue_at(phi, -3) == pytest.approx(expected, rel=1e-14)
        # the regular part is large near -3, so the limit needs finer epsilon
        oracle = numeric_limit_residue(phi, -3.0, eps_values=(1e-3, 1e-4))
        assert fpart.residue_at(phi, -3) == pytest.approx(oracle, rel=1e-3)

    def test_no_pole_when_even_derivative_vanishes(self):
        phi = bump.poly_times_bump([0.0, 0.0, 1.0])  # t^2 * psi
        mv = fpart.finite_part(phi, -1.0)
        assert not mv.is_pole

    def test_pole_free_away_from_odd_integers(self):
        phi = bump.normalized_bump()
        for s in (0.0, 1.0, -0.5, -2.0, 0.5 + 0.5j):
            assert not fpart.finite_part(phi, s).is_pole


class TestExactValues:
    def test_polynomial_bump_at_s_one(self):
        # phi = P(t) (1-t^2)^4 on [-1, 1] has an exact rational integral
        # against |t| at s = 1
        P = [3, 2, -1, 1]

        def correction(coeffs):
            # (1 - t^2)^4 = sum_k binom(4,k) (-1)^k t^{2k}
            from math import comb

            out = {}
            for k in range(5):
                out[2 * k] = comb(4, k) * (-1) ** k
            return out

        window = correction(None)

        class PolyBump:
            support = (-1.0, 1.0)
            n_coefficients = 1

            def __call__(self, t):
                t = np.asarray(t, dtype=float)
                w = np.where(np.abs(t) < 1.0, (1.0 - t * t) ** 4, 0.0)
                return np.polynomial.polynomial.polyval(t, np.asarray(P, dtype=float)) * w

            def taylor_coefficient(self, k):
                return float(P[0]) if k == 0 else 0.0

        exact = Fraction(0)
        for k_pow, w_coeff in window.items():
            for j, c in enumerate(P):
                power = k_pow + j  # t^{power}; integrand |t| t^{power}
                if power % 2 == 0:
                    exact += 2 * Fraction(c * w_coeff, power + 2)
        got = fpart.finite_part(PolyBump(), 1.0).value.real
        assert got == pytest.approx(float(exact), rel=1e-10)

    def test_plain_integral_at_s_zero(self):
        # s = 0 must reproduce int phi dt
        phi = bump.normalized_bump()
        from regchar.quadrature import panel_rule

        nodes, w = panel_rule(-1.0, 1.0, 64, 12)
        direct = float(np.dot(phi(nodes), w))
        assert fpart.finite_part(phi, 0.0).value.real == pytest.approx(direct, rel=1e-11)


class TestLaurent:
    def test_leading_coefficient(self):
        phi = bump.normalized_bump()
        S = fpart.laurent_at_minus_one(phi)
        assert S[0] == 2.0
        phi0 = bump.poly_times_bump([0.0, 1.0])  # t * psi: phi(0) = 0
        assert fpart.laurent_at_minus_one(phi0)[0] == 0.0

    def test_distributional_inverse(self):
        # S_0(|t| psi) = int psi
        psi = bump.normalized_bump()
        phi = bump.Smooth1D(lambda t: np.abs(t) * psi(t), [0.0])
        S = fpart.laurent_at_minus_one(phi, n_coefficients=1)
        from regchar.quadrature import panel_rule

        nodes, w = panel_rule(-1.0, 1.0, 64, 12)
        total = float(np.dot(psi(nodes), w))
        assert S[1] == pytest.approx(total, rel=1e-9)

    def test_odd_part_contributes_nothing(self):
        odd = bump.poly_times_bump([0.0, 1.0, 0.0, 2.0])  # odd polynomial x psi
        S = fpart.laurent_at_minus_one(odd, n_coefficients=3)
        assert S[0] == 0.0
        for val in S[1:]:
            assert val == pytest.approx(0.0, abs=1e-12)

    def test_finite_part_value_matches_s0(self):
        phi = bump.normalized_bump()
        S = fpart.laurent_at_minus_one(phi)
        mv = fpart.finite_part(phi, -1.0)
        assert mv.value.real == pytest.approx(S[1], rel=1e-10)


class TestAnalyticity:
    def test_cauchy_riemann_near_half_plane_point(self):
        phi = bump.normalized_bump()
        s0 = 0.5 + 0.5j
        h = 1e-4

        def F(s):
            return fpart.finite_part(phi, s).value

        d_re = (F(s0 + h) - F(s0 - h)) / (2 * h)
        d_im = (F(s0 + 1j * h) - F(s0 - 1j * h)) / (2 * h)
        # holomorphy: d/dy F = i d/dx F
        assert abs(d_im - 1j * d_re) <= 1e-6 * max(1.0, abs(d_re))

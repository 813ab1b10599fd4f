"""Fixed flags, isotropy representatives and the two-route Jacobian identity."""

import numpy as np
import pytest

from regchar import fixed_points as fp
from regchar import group as gp
from regchar.errors import NotAFixedPoint, NotRealSemisimpleRegular


def random_split_sl3(rng, spread=(0.4, 2.5)):
    """Random regular element with three distinct real eigenvalues."""
    while True:
        lams = rng.uniform(*spread, size=3)
        lams[2] = 1.0 / (lams[0] * lams[1])
        if min(abs(lams[0] - lams[1]), abs(lams[0] - lams[2]), abs(lams[1] - lams[2])) > 0.1:
            break
    y = rng.standard_normal((3, 3))
    while abs(np.linalg.det(y)) < 0.2:
        y = rng.standard_normal((3, 3))
    y = y / np.sign(np.linalg.det(y)) / abs(np.linalg.det(y)) ** (1 / 3)
    return y @ np.diag(lams) @ np.linalg.inv(y)


class TestRegularity:
    def test_split_diagonal(self):
        assert fp.is_regular(np.diag([2.0, 1.0, 0.5]))

    def test_jordan_block(self):
        g = np.eye(3)
        g[0, 1] = 1.0
        assert not fp.is_regular(g)

    def test_rotation_regular(self):
        assert fp.is_regular(gp.rotation(0.7))
        assert not fp.is_regular(gp.rotation(0.0))


class TestFixedFlags:
    def test_split_sl3_count(self):
        flags = fp.fixed_flags(np.diag([2.0, 1.0, 0.5]))
        assert len(flags) == 6
        for flag in flags:
            assert flag.nesting_residual() <= 1e-10
            assert flag.invariance_residual(np.diag([2.0, 1.0, 0.5])) <= 1e-10

    def test_rotation_has_none(self):
        assert fp.fixed_flags(gp.rotation(0.9)) == []

    def test_projective_line(self):
        flags = fp.fixed_flags(np.diag([2.0, 0.5]))
        assert len(flags) == 2
        lines = {tuple(np.round(np.abs(f.bases[0].ravel()), 10)) for f in flags}
        assert lines == {(1.0, 0.0), (0.0, 1.0)}

    def test_repeated_eigenvalue_raises(self):
        g = np.eye(3)
        g[0, 1] = 1.0
        with pytest.raises(NotRealSemisimpleRegular):
            fp.fixed_flags(g)

    def test_mixed_spectrum_sl3(self):
        # one real eigenvalue, one complex pair: no invariant complete flag
        rng = np.random.default_rng(41)
        block = gp.rotation(0.8) * 1.2
        g = np.zeros((3, 3))
        g[:2, :2] = block
        g[2, 2] = 1.0 / np.linalg.det(block)
        y = rng.standard_normal((3, 3))
        y /= np.sign(np.linalg.det(y)) * abs(np.linalg.det(y)) ** (1 / 3)
        assert fp.fixed_flags(y @ g @ np.linalg.inv(y)) == []


class TestIsotropy:
    def test_identity_coset(self):
        g = gp.rotation(0.5)
        h = fp.isotropy_rep(g, np.eye(2), "K")
        assert np.allclose(h, g)

    def test_conjugacy_class_consistency(self):
        rng = np.random.default_rng(42)
        g = np.diag([2.0, 1.0, 0.5])
        x = np.eye(3)
        for _ in range(20):
            # change the representative within the coset by h0 in P
            h0 = np.triu(rng.standard_normal((3, 3)) * 0.3) + np.eye(3)
            h0 /= np.linalg.det(h0) ** (1 / 3)
            h_base = fp.isotropy_rep(g, x, "P")
            h_moved = fp.isotropy_rep(g, x @ h0, "P")
            assert np.allclose(h_moved, np.linalg.inv(h0) @ h_base @ h0, atol=1e-10)

    def test_permuted_eigenbasis_lands_in_P(self):
        g = np.diag([2.0, 1.0, 0.5])
        recs = fp.flag_fixed_point_records(g)
        assert len(recs) == 6
        for r in recs:
            assert np.max(np.abs(np.tril(r.isotropy_h, k=-1))) <= 1e-8

    def test_not_fixed_raises(self):
        g = np.diag([2.0, 1.0, 0.5])
        x = np.linalg.qr(np.random.default_rng(0).standard_normal((3, 3)))[0]
        if np.linalg.det(x) < 0:
            x[:, 0] *= -1
        with pytest.raises(NotAFixedPoint):
            fp.isotropy_rep(g, x, "P")


class TestJacobians:
    def test_identity_jacobians(self):
        J = fp.jacobian_via_chart(np.eye(2), np.eye(2), "K")
        assert np.allclose(J, np.eye(2), atol=1e-9)
        A = fp.jacobian_via_ad(np.eye(2), "K")
        assert np.allclose(A, np.eye(2))

    def test_rotation_on_plane(self):
        theta = 0.8
        A = fp.jacobian_via_ad(gp.rotation(theta), "K")
        det = np.linalg.det(np.eye(2) - A)
        assert det == pytest.approx(4 * np.sin(theta) ** 2, rel=1e-12)

    def test_projective_scaling(self):
        # diag(2, 1/2) fixes the axes of RP^1; the 1-dim derivative of
        # l_{g^{-1}} is lambda^2 at e1 and lambda^{-2} at e2, and matches
        # Ad of the isotropy representative of g^{-1}
        lam = 2.0
        g = np.diag([lam, 1.0 / lam])
        J_e1 = fp.jacobian_via_chart(g, np.eye(2), "P")
        A_e1 = fp.jacobian_via_ad(fp.isotropy_rep(np.linalg.inv(g), np.eye(2), "P"), "P")
        assert J_e1[0, 0] == pytest.approx(lam**2, rel=1e-8)
        assert A_e1[0, 0] == pytest.approx(lam**2, rel=1e-12)
        w = np.array([[0.0, 1.0], [-1.0, 0.0]])
        J_e2 = fp.jacobian_via_chart(g, w, "P")
        assert J_e2[0, 0] == pytest.approx(lam**-2, rel=1e-8)

    def test_parabolic_ad_product_formula(self):
        # det(1 - Ad(h)) on g/p is the product over negative roots of
        # (1 - lambda_j / lambda_i)
        h = np.diag([2.0, 1.0, 0.5])
        A = fp.jacobian_via_ad(h, "P")
        det = np.linalg.det(np.eye(3) - A)
        assert det == pytest.approx((1 - 0.5) * (1 - 0.25) * (1 - 0.5), rel=1e-12)

    def test_spectrum_match_chart_vs_ad(self):
        rng = np.random.default_rng(43)
        for _ in range(50):
            g = random_split_sl3(rng)
            recs = fp.flag_fixed_point_records(g)
            r = recs[rng.integers(len(recs))]
            # eigenvalues of the chart Jacobian match Ad(h) on g/h
            x = None  # record already closed over chart; compare dets instead
            assert r.det_chart == pytest.approx(r.det_ad, rel=1e-6, abs=1e-9)


class TestLemmaTwoIdentity:
    def test_sl2_compact(self):
        rng = np.random.default_rng(44)
        for _ in range(40):
            g = gp.random_elliptic(rng)
            recs = fp.hyperbolic_plane_records(g)
            assert len(recs) == 1
            r = recs[0]
            assert r.det_chart == pytest.approx(r.det_ad, rel=1e-6)

    def test_sl2_parabolic_subgroup(self):
        rng = np.random.default_rng(45)
        for _ in range(40):
            g = gp.random_hyperbolic(rng)
            recs = fp.flag_fixed_point_records(g)
            assert len(recs) == 2
            for r in recs:
                assert r.det_chart == pytest.approx(r.det_ad, rel=1e-6)

    def test_sl3_parabolic_subgroup(self):
        rng = np.random.default_rng(46)
        for _ in range(20):
            g = random_split_sl3(rng)
            for r in fp.flag_fixed_point_records(g):
                assert r.det_chart == pytest.approx(r.det_ad, rel=1e-6)


class TestTransversality:
    def test_elliptic_on_plane(self):
        rng = np.random.default_rng(47)
        for _ in range(25):
            g = gp.random_elliptic(rng)
            res = fp.is_transversal(g, "hyperbolic_plane")
            assert res.transversal and res.n_fixed_points == 1

    def test_hyperbolic_on_plane_vacuous(self):
        rng = np.random.default_rng(48)
        for _ in range(10):
            g = gp.random_hyperbolic(rng)
            res = fp.is_transversal(g, "hyperbolic_plane")
            assert res.transversal and res.n_fixed_points == 0

    def test_split_regular_on_flags(self):
        rng = np.random.default_rng(49)
        for _ in range(10):
            g = random_split_sl3(rng)
            res = fp.is_transversal(g, "flags")
            assert res.transversal and res.n_fixed_points == 6

    def test_identity_rejected(self):
        from regchar.errors import CentralElement

        with pytest.raises(CentralElement):
            fp.is_transversal(np.eye(3), "flags")

    def test_perturbed_nontransversal_becomes_transversal(self):
        rng = np.random.default_rng(50)
        for _ in range(10):
            u = np.array([[1.0, rng.uniform(0.5, 1.5)], [0.0, 1.0]])
            y = gp.random_sl2(rng)
            g = y @ u @ np.linalg.inv(y)
            pert = g + rng.standard_normal((2, 2)) * 1e-3
            pert /= np.sqrt(np.linalg.det(pert))
            from regchar import sphere as sp

            assert sp.transversal_class(pert)

    def test_record_serialization(self):
        recs = fp.flag_fixed_point_records(np.diag([2.0, 1.0, 0.5]))
        blob = recs[0].to_json()
        assert set(blob) >= {"det_chart", "det_ad", "margin", "transversal"}

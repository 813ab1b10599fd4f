"""Diagonal density, operator application, and the two-sided trace."""

import numpy as np
import pytest

from regchar import kernels
from regchar.bump import PlaneBump, psi
from regchar.errors import CertificationError, UnvalidatedGridError
from regchar.group import GroupTestFunction, HaarGrid, haar_quadrature, rotation
from regchar.quadrature import panel_rule
from regchar.sphere import ChartAtlas, SpherePoint, act, base_section
from regchar.trace import (
    CharacterExperiment,
    DiagonalDensity,
    apply_pi_f,
    circle_rule,
    diagonal_density,
    kernel_apply,
    relative_error,
    trace_reg,
    trace_s_direct,
    trace_s_fixed_point,
    transversal_trace_pointwise,
)


@pytest.fixture(scope="module")
def elliptic_f():
    return GroupTestFunction((np.pi / 2, 0.0, 0.0), (0.6, 0.5, 0.5)).certify()


@pytest.fixture(scope="module")
def hyperbolic_f():
    return GroupTestFunction((0.0, 2.2, 0.0), (0.3, 0.5, 0.2)).certify()


@pytest.fixture(scope="module")
def elliptic_grid(elliptic_f):
    return haar_quadrature(elliptic_f, resolution=1)


@pytest.fixture(scope="module")
def elliptic_experiment(elliptic_f, elliptic_grid):
    return CharacterExperiment(elliptic_f, grid=elliptic_grid)


class TestApplyPiF:
    def test_constant_input_gives_total_mass(self, elliptic_f, elliptic_grid):
        mass = elliptic_grid.integrate_function(elliptic_f)
        for z in (0.3 + 0.9j, -0.4 + 1.4j, 2.0 - 0.7j):
            p = SpherePoint.from_plane(z)
            v = apply_pi_f(elliptic_f, lambda n, t: np.ones_like(n), p, elliptic_grid)
            assert v == pytest.approx(mass, rel=1e-12)

    def test_positivity(self, elliptic_f, elliptic_grid):
        u = PlaneBump((0.2, 1.1), (0.6, 0.5))
        v = apply_pi_f(elliptic_f, u, SpherePoint.from_plane(0.1 + 0.9j), elliptic_grid)
        assert v >= 0.0

    def test_unvalidated_grid_rejected(self, elliptic_f):
        grid = HaarGrid(elliptic_f.support_box)
        with pytest.raises(UnvalidatedGridError):
            apply_pi_f(elliptic_f, lambda n, t: np.ones_like(n), SpherePoint.from_plane(1j), grid)

    def test_kernel_oracle_sample(self, elliptic_f):
        # the full 10-point 1e-4 assertion runs in the acceptance suite
        grid = haar_quadrature(elliptic_f, resolution=2, validate=False)
        grid.validated = True
        u = PlaneBump((0.2, 1.1), (0.6, 0.5))
        for z in (0.0 + 0.9j, -0.3 + 1.2j):
            p = SpherePoint.from_plane(z)
            va = apply_pi_f(elliptic_f, u, p, grid)
            vk = kernel_apply(elliptic_f, u, p, orbit_panels=32, k_panels=48)
            assert relative_error(va, vk) <= 1e-4


class TestDiagonalDensity:
    def test_value_at_base_point(self, elliptic_f, elliptic_grid):
        density = diagonal_density(elliptic_f, elliptic_grid)
        got = float(density(np.array([0.0]), np.array([1.0]))[0])
        # at the base point the section is the identity and k_f(i) is the
        # integral of f over the rotation subgroup
        nodes, w = panel_rule(0.0, 2 * np.pi, 64, 10)
        fk = elliptic_f.coords_values(nodes, np.zeros_like(nodes), np.zeros_like(nodes))
        oracle = float(np.dot(fk, w))
        assert got == pytest.approx(oracle, rel=1e-9)

    def test_conjugation_equivariance(self, elliptic_f, elliptic_grid):
        density = diagonal_density(elliptic_f, elliptic_grid)
        rng = np.random.default_rng(90)
        k_nodes, k_w = circle_rule(64, 8)
        for _ in range(5):
            z = complex(rng.uniform(-0.4, 0.4), rng.uniform(0.7, 1.3))
            p = SpherePoint.from_plane(z)
            g0 = np.array([[1.0, rng.uniform(-0.3, 0.3)], [0.0, 1.0]])
            g0 = g0 @ rotation(rng.uniform(-0.3, 0.3))
            moved = act(g0, p)
            lhs = float(density(*[np.array([v]) for v in moved.plane_coords()])[0])
            gx = base_section(p)
            conj = g0 @ gx
            conj_inv = np.linalg.inv(conj)
            vals = []
            for th in k_nodes:
                m = conj @ rotation(th) @ conj_inv
                vals.append(elliptic_f(m))
            rhs = float(np.dot(vals, k_w))
            assert lhs == pytest.approx(rhs, abs=1e-8, rel=1e-8)

    def test_hyperbolic_density_vanishes(self, hyperbolic_f):
        grid = haar_quadrature(hyperbolic_f, resolution=1)
        density = diagonal_density(hyperbolic_f, grid)
        assert density.is_zero
        n = np.linspace(-2, 2, 17)
        t = np.full_like(n, 0.8)
        assert np.all(density(n, t) == 0.0)

    def test_vanishes_toward_boundary(self, elliptic_f, elliptic_grid):
        density = diagonal_density(elliptic_f, elliptic_grid)
        t_ray = np.array([0.2, 0.1, 0.05, 0.02, 0.01])
        vals = density(np.zeros_like(t_ray), t_ray)
        assert np.all(vals == 0.0)

    def test_certification_required(self):
        f = GroupTestFunction((np.pi / 2, 0.0, 0.0), (0.6, 0.5, 0.5))
        grid = HaarGrid(f.support_box)
        grid.validated = True
        with pytest.raises(CertificationError):
            DiagonalDensity(f, grid)


class TestTwoSidedFormula:
    def test_character_formula_elliptic(self, elliptic_experiment):
        for s in (1.0, 0.0, -1.0):
            direct = elliptic_experiment.direct(s)
            fixed = elliptic_experiment.fixed_point(s)
            assert relative_error(direct, fixed) <= 1e-3

    def test_two_atlases_at_minus_one(self, elliptic_f, elliptic_grid):
        e1 = CharacterExperiment(elliptic_f, atlas=ChartAtlas(1.0, 2.0), grid=elliptic_grid)
        e2 = CharacterExperiment(elliptic_f, atlas=ChartAtlas(1.5, 3.0), grid=elliptic_grid)
        assert relative_error(e1.direct(-1.0), e2.direct(-1.0)) <= 1e-6

    def test_linearity_in_amplitude(self, elliptic_f, elliptic_grid):
        scaled = GroupTestFunction(elliptic_f.center, elliptic_f.halfwidths, amplitude=2.5)
        scaled.certify()
        base = CharacterExperiment(elliptic_f, grid=elliptic_grid)
        exp2 = CharacterExperiment(scaled, grid=elliptic_grid)
        assert exp2.direct(0.0) == pytest.approx(2.5 * base.direct(0.0), rel=1e-12)

    def test_hyperbolic_all_zero_under_continuation(self, hyperbolic_f):
        exp = CharacterExperiment(hyperbolic_f)
        for s in (1.0, 0.0, -1.0):
            assert exp.direct(s) == 0.0
            assert exp.fixed_point(s) == 0.0

    def test_hyperbolic_plain_rule_closed_form(self, hyperbolic_f):
        exp = CharacterExperiment(hyperbolic_f)
        got = exp.fixed_point(-1.0, boundary_rule="plain")
        a, b, c, d = exp.grid.entries()
        fv = kernels.group_bump_batch(a, b, c, d, hyperbolic_f.params)
        tr = a + d
        lam = (tr + np.sqrt(tr * tr - 4.0)) / 2.0
        closed = exp.grid.integrate(fv * (1.0 / (1.0 - lam**2) ** 2 + 1.0 / (1.0 - lam**-2) ** 2))
        assert got == pytest.approx(closed, rel=1e-12)
        assert got > 0.0

    def test_elliptic_closed_form_at_minus_one(self, elliptic_experiment, elliptic_f):
        got = elliptic_experiment.fixed_point(-1.0)
        a, b, c, d = elliptic_experiment.grid.entries()
        fv = kernels.group_bump_batch(a, b, c, d, elliptic_f.params)
        tr = a + d
        closed = elliptic_experiment.grid.integrate(fv / (2.0 * (1.0 - (tr / 2.0) ** 2)))
        assert got == pytest.approx(closed, rel=1e-12)

    def test_trace_reg_equals_direct_at_minus_one(self, elliptic_experiment):
        reg = elliptic_experiment.fixed_point(-1.0)
        direct = elliptic_experiment.direct(-1.0)
        assert relative_error(reg, direct) <= 1e-3

    def test_run_report(self, elliptic_experiment):
        rows = elliptic_experiment.run([1.0, 0.0, -1.0])
        assert all(r["pass"] for r in rows)
        assert [r["s"] for r in rows] == [1.0, 0.0, -1.0]

    def test_parabolic_inside_support_detected(self, monkeypatch):
        f = GroupTestFunction((0.3, 1.0, 0.0), (0.8, 1.2, 0.8))
        monkeypatch.setattr(f, "certified", True)
        grid = haar_quadrature(f, validate=False)
        with pytest.raises(CertificationError):
            CharacterExperiment(f, grid=grid).fixed_point(0.0)


class TestFunctionalWrappers:
    def test_trace_s_direct_value(self, elliptic_f, elliptic_grid):
        mv = trace_s_direct(elliptic_f, 0.0, grid=elliptic_grid)
        assert not mv.is_pole
        assert mv.value.real > 0.0

    def test_wrappers_consistent(self, elliptic_f, elliptic_grid):
        direct = trace_s_direct(elliptic_f, -1.0, grid=elliptic_grid).value.real
        reg = trace_reg(elliptic_f, grid=elliptic_grid)
        fixed = trace_s_fixed_point(elliptic_f, -1.0, grid=elliptic_grid)
        assert reg == fixed
        assert relative_error(reg, direct) <= 1e-3

    def test_complex_s_direct(self, elliptic_f, elliptic_grid):
        mv = trace_s_direct(elliptic_f, 0.5 + 0.25j, grid=elliptic_grid)
        assert np.isfinite(mv.value.real) and np.isfinite(mv.value.imag)


class TestPointwiseTrace:
    def test_rotation(self):
        theta = 0.9
        val = transversal_trace_pointwise(rotation(theta))
        assert val == pytest.approx(1.0 / (2.0 * np.sin(theta) ** 2), rel=1e-12)

    def test_diagonal(self):
        lam = 1.7
        val = transversal_trace_pointwise(np.diag([lam, 1.0 / lam]))
        expected = 1.0 / (1.0 - lam**2) ** 2 + 1.0 / (1.0 - lam**-2) ** 2
        assert val == pytest.approx(expected, rel=1e-12)

    def test_nontransversal_rejected(self):
        from regchar.errors import RegcharError

        with pytest.raises(RegcharError):
            transversal_trace_pointwise(np.array([[1.0, 1.0], [0.0, 1.0]]))

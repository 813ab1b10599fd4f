"""Both sides of the character formula on the sphere model.

Direct side: the diagonal kernel density k_f(p) = int_K f(g_p k g_p^{-1}) dk
integrated with the chart weight |t|^{s+1} against the invariant measure
dn dt / t^2 on the open orbits.  Fixed-point side: the Haar integral of
f(g) times the weighted sum over Fix(g) of 1 / |det(1 - dPhi_{g^{-1}})|.
For certified test functions the two sides agree; their equality is the
flagship numerical experiment.

Boundary fixed points at s = -1 admit two conventions, selected by
`boundary_rule`:

* "continuation" (default): boundary terms vanish identically for
  Re s > -1, so their analytic continuation to s = -1 contributes 0.  This
  is the rule consistent with the direct side (whose density vanishes
  identically for functions supported on the hyperbolic set) and the one the
  acceptance experiment uses.
* "plain": boundary terms enter with weight |t|^0 = 1 at s = -1, which
  reproduces the literal fixed-point display (and the closed hyperbolic
  form); for functions supported on the elliptic set the two rules agree.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bump import PlaneBump
from .errors import CertificationError, DensitySupportError
from .group import HaarGrid, haar_quadrature
from .quadrature import TensorGrid, integrate, panel_rule
from .sphere import ChartAtlas

KF_NEGLIGIBLE = 1e-14


def circle_rule(panels=32, order=8):
    """Quadrature of the compact factor K = SO(2), total mass 2 pi."""
    return panel_rule(0.0, 2.0 * np.pi, panels, order)


def _require_usable(f, grid):
    if not f.certified:
        raise CertificationError("test function must be certified before tracing")
    grid.require_validated()


class DiagonalDensity:
    """Diagonal kernel density on the open orbits, with cached support boxes.

    The density is supported exactly on the fixed points of the elliptic part
    of supp f; the boxes are estimated from the fixed points of the Haar
    grid elements and verified by a vanishing check along the box edges.
    For test functions certified on the hyperbolic side the density is
    identically zero and the boxes are empty.
    """

    def __init__(self, f, grid, k_panels=32, k_order=8, pad=0.25):
        _require_usable(f, grid)
        self.f = f
        self.k_nodes, self.k_weights = circle_rule(k_panels, k_order)
        self.upper_box = None
        self.lower_box = None
        self._locate_support(grid, pad)
        if self.upper_box is not None:
            self._check_edge_vanishing()

    def _locate_support(self, grid, pad):
        a, b, c, d = grid.entries()
        fvals = self.f(np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2))
        mask = fvals > 0.0
        if not np.any(mask):
            return
        tr = a[mask] + d[mask]
        disc = tr * tr - 4.0
        elliptic = disc < 0
        if not np.any(elliptic):
            return
        ae, be = a[mask][elliptic], b[mask][elliptic]
        ce, de = c[mask][elliptic], d[mask][elliptic]
        tre = tr[elliptic]
        mu = tre / 2.0 + 1j * np.sqrt(-disc[elliptic]) / 2.0
        use_b = np.abs(be) >= np.abs(ce)
        v1 = np.where(use_b, be.astype(complex), mu - de)
        v2 = np.where(use_b, mu - ae, ce.astype(complex))
        z = v1 / v2
        n, t = z.real, np.abs(z.imag)
        n_lo, n_hi = float(n.min()), float(n.max())
        t_lo, t_hi = float(t.min()), float(t.max())
        pad_n = pad * max(n_hi - n_lo, 0.1)
        pad_t = pad * max(t_hi - t_lo, 0.1)
        t_floor = max(t_lo - pad_t, 0.5 * t_lo)
        self.upper_box = ((n_lo - pad_n, n_hi + pad_n), (t_floor, t_hi + pad_t))
        self.lower_box = ((n_lo - pad_n, n_hi + pad_n), (-(t_hi + pad_t), -t_floor))

    def _check_edge_vanishing(self, samples=33):
        peak = 0.0
        for box in (self.upper_box, self.lower_box):
            (n0, n1), (t0, t1) = box
            nc = np.linspace(n0, n1, samples)
            tc = np.linspace(t0, t1, samples)
            interior = self(
                np.concatenate([nc, nc, np.full(samples, 0.5 * (n0 + n1))]),
                np.concatenate(
                    [np.full(samples, 0.5 * (t0 + t1)), np.full(samples, 0.25 * t0 + 0.75 * t1), tc]
                ),
            )
            peak = max(peak, float(np.max(interior)))
        if peak <= 0.0:
            raise DensitySupportError("density vanished on the whole declared box")
        for box in (self.upper_box, self.lower_box):
            (n0, n1), (t0, t1) = box
            nc = np.linspace(n0, n1, samples)
            tc = np.linspace(t0, t1, samples)
            edges_n = np.concatenate([nc, nc, np.full(samples, n0), np.full(samples, n1)])
            edges_t = np.concatenate([np.full(samples, t0), np.full(samples, t1), tc, tc])
            vals = self(edges_n, edges_t)
            if float(np.max(np.abs(vals))) > KF_NEGLIGIBLE * peak:
                raise DensitySupportError(
                    "density does not vanish near the declared box edge; enlarge the box"
                )

    @property
    def is_zero(self):
        return self.upper_box is None

    def __call__(self, n, t):
        n = np.atleast_1d(np.asarray(n, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return kernels.kf_batch(n, t, self.k_nodes, self.k_weights, self.f.params)


def diagonal_density(f, grid=None, resolution=1, k_panels=32, k_order=8):
    """Build the diagonal density of pi(f); validates grid and certification."""
    if grid is None:
        grid = haar_quadrature(f, resolution=resolution)
    return DiagonalDensity(f, grid, k_panels=k_panels, k_order=k_order)


def apply_pi_f(f, u, point, grid):
    """(pi(f) u)(point) = int f(g) u(g^{-1} . point) dg by Haar quadrature.

    `u` is a PlaneBump or any callable of the chart coordinates (n, t);
    `point` is a SpherePoint off the boundary (its orbit carries u).
    """
    _require_usable(f, grid)
    n0, t0 = point.plane_coords()
    a, b, c, d = grid.entries()
    fvals = kernels.group_bump_batch(a, b, c, d, f.params)
    n1, t1 = kernels.mobius_inverse_batch(a, b, c, d, n0, t0)
    if isinstance(u, PlaneBump):
        uvals = kernels.plane_bump_batch(n1, t1, (*u.center, *u.halfwidths, u.amplitude))
    else:
        uvals = np.asarray(u(n1, t1), dtype=float)
    return grid.integrate(fvals * uvals)


def kernel_apply(f, u, point, density=None, grid=None, orbit_panels=24, orbit_order=8,
                 k_panels=32, k_order=8):
    """Kernel-quadrature route: int K(point, y) u(y) dmu(y) over supp u.

    The kernel is K(x, y) = int_K f(g_x k g_y^{-1}) dk; agreement with
    apply_pi_f pins the d_G = dmu (x) dk compatibility normalization.
    """
    if not isinstance(u, PlaneBump):
        raise TypeError("the kernel route needs a PlaneBump with a known support box")
    nx, tx = point.plane_coords()
    (n0, n1), (t0, t1) = u.box
    if not (t0 * tx > 0):
        raise ValueError("u and the point must live in the same open orbit")
    gn = panel_rule(n0, n1, orbit_panels, orbit_order)
    gt = panel_rule(t0, t1, orbit_panels, orbit_order)
    grid2 = TensorGrid([gn, gt])
    pts = grid2.points()
    ny, ty = pts[:, 0], pts[:, 1]
    k_nodes, k_weights = circle_rule(k_panels, k_order)
    K_row = kernels.kernel_row_batch(nx, tx, ny, ty, k_nodes, k_weights, f.params)
    uvals = u(ny, ty)
    mu_weights = grid2.weights() / (ty * ty)
    return integrate(K_row * uvals * mu_weights, np.ones_like(K_row))


def _orbit_grid(box, panels, order):
    (n0, n1), (t0, t1) = box
    return TensorGrid([panel_rule(n0, n1, panels, order), panel_rule(t0, t1, panels, order)])


@dataclass
class TraceResolution:
    """Quadrature resolutions for the two-sided experiment."""

    group_panels: tuple = (6, 6, 6)
    group_order: int = 10
    orbit_panels: int = 12
    orbit_order: int = 8
    k_panels: int = 32
    k_order: int = 8

    @classmethod
    def scaled(cls, factor=1):
        return cls(
            group_panels=tuple(max(2, int(round(6 * factor))) for _ in range(3)),
            group_order=10,
            orbit_panels=max(4, int(round(12 * factor))),
            orbit_order=8,
            k_panels=max(8, int(round(32 * factor))),
            k_order=8,
        )


class CharacterExperiment:
    """Cached two-sided evaluation of the character formula for one f.

    Shares the Haar grid, the diagonal density values on the orbit grids and
    the per-element fixed point data across the requested s values.
    """

    def __init__(self, f, atlas=None, resolution=None, grid=None):
        self.f = f
        self.atlas = atlas if atlas is not None else ChartAtlas()
        self.res = resolution if resolution is not None else TraceResolution()
        if not f.certified:
            f.certify()
        self.grid = grid if grid is not None else HaarGrid(
            f.support_box, panels=self.res.group_panels, order=self.res.group_order
        ).validate()
        self.density = diagonal_density(
            f, self.grid, k_panels=self.res.k_panels, k_order=self.res.k_order
        )
        self._orbit_cache = None
        self._fvals = None

    def _orbit_data(self):
        if self._orbit_cache is None:
            cache = []
            if not self.density.is_zero:
                for box in (self.density.upper_box, self.density.lower_box):
                    g2 = _orbit_grid(box, self.res.orbit_panels, self.res.orbit_order)
                    pts = g2.points()
                    n, t = pts[:, 0], pts[:, 1]
                    kf = self.density(n, t)
                    mu_w = g2.weights() / (t * t)
                    cache.append((n, t, kf, mu_w))
            self._orbit_cache = cache
        return self._orbit_cache

    def _group_fvals(self):
        if self._fvals is None:
            a, b, c, d = self.grid.entries()
            self._fvals = kernels.group_bump_batch(a, b, c, d, self.f.params)
        return self._fvals

    def direct(self, s):
        """Sum over charts of int alpha_gamma |t_gamma|^{s+1} k_f dmu."""
        total = 0.0
        for n, t, kf, mu_w in self._orbit_data():
            if isinstance(s, complex):
                w = self.atlas.weight_arrays(n, t, s)
                total = total + integrate(w * kf * mu_w, np.ones_like(kf))
            else:
                w = kernels.atlas_weight_batch(n, t, float(s), self.atlas.r_inner, self.atlas.r_outer)
                total = total + integrate(w * kf * mu_w, np.ones_like(kf))
        return total

    def fixed_point(self, s, boundary_rule="continuation"):
        """Haar integral of f(g) times the weighted fixed-point sum."""
        if boundary_rule not in ("continuation", "plain"):
            raise ValueError(f"unknown boundary rule {boundary_rule!r}")
        if isinstance(s, complex):
            raise NotImplementedError("the fixed-point side is evaluated at real s")
        boundary = 1.0 if (boundary_rule == "plain" and s == -1.0) else 0.0
        a, b, c, d = self.grid.entries()
        fvals = self._group_fvals()
        weights, parabolic = kernels.char_weight_batch(
            a, b, c, d, float(s), self.atlas.r_inner, self.atlas.r_outer, boundary
        )
        if np.any(parabolic & (fvals > 0)):
            raise CertificationError("non-transversal element inside supp f")
        return self.grid.integrate(fvals * weights)

    def run(self, s_values, tolerance=1e-3, boundary_rule="continuation"):
        rows = []
        for s in s_values:
            t0 = time.perf_counter()
            direct = self.direct(float(s))
            fixed = self.fixed_point(float(s), boundary_rule=boundary_rule)
            rel = relative_error(direct, fixed)
            rows.append(
                {
                    "s": float(s),
                    "direct": direct,
                    "fixed_point": fixed,
                    "rel_err": rel,
                    "pass": bool(rel <= tolerance),
                    "seconds": time.perf_counter() - t0,
                }
            )
        return rows


def relative_error(a, b, floor=1e-12):
    scale = max(abs(a), abs(b))
    if scale <= floor:
        return 0.0
    return abs(a - b) / scale


def trace_s_direct(f, s, atlas=None, resolution=None, grid=None):
    """Meromorphic-trace value on the direct (diagonal density) side.

    For certified f the density is compactly supported inside the open
    orbits, so the result is entire in s and carries no pole record.
    """
    from .finite_part import MeromorphicValue

    exp = CharacterExperiment(f, atlas=atlas, resolution=resolution, grid=grid)
    return MeromorphicValue(s=complex(s), value=complex(exp.direct(s if isinstance(s, complex) else float(s))))


def trace_s_fixed_point(f, s, atlas=None, resolution=None, grid=None, boundary_rule="continuation"):
    """Fixed-point side of the character formula at real s."""
    exp = CharacterExperiment(f, atlas=atlas, resolution=resolution, grid=grid)
    return exp.fixed_point(float(s), boundary_rule=boundary_rule)


def trace_reg(f, atlas=None, resolution=None, grid=None):
    """Regularized trace: the s = -1 value of the continued trace."""
    return trace_s_fixed_point(f, -1.0, atlas=atlas, resolution=resolution, grid=grid)


def transversal_trace_pointwise(g):
    """Sum over the simple fixed points of 1 / |det(1 - dPhi_{g^{-1}})|."""
    from .errors import RegcharError
    from .sphere import fixed_points_on_sphere, transversal_class

    g = np.asarray(g, dtype=float)
    if not transversal_class(g):
        raise RegcharError("element is not transversal on the sphere")
    return float(sum(1.0 / r.det_one_minus_dphi for r in fixed_points_on_sphere(g)))

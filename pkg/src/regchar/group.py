"""Iwasawa coordinates, test functions and Haar quadrature on SL(2, R).

Elements are written g = k_theta a_s n_u with k_theta the rotation by theta,
a_s = diag(e^{s/2}, e^{-s/2}) and n_u unipotent upper.  In these coordinates
a left and right invariant measure is  e^s dtheta ds du;  the exponent is not
imported as a convention but validated by an executable left-invariance test
(validate_invariance), and grids must pass that test before the trace
routines accept them.
"""

import numpy as np

from . import kernels
from .errors import CertificationError, HaarValidationError, UnvalidatedGridError
from .quadrature import TensorGrid, panel_rule

HAAR_DENSITY_EXPONENT = 1.0  # weight e^{kappa s} with kappa = +1


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def from_iwasawa(theta, s, u):
    """Matrix of k_theta a_s n_u."""
    es = np.exp(s / 2.0)
    c, sn = np.cos(theta), np.sin(theta)
    # a_s n_u = [[es, es*u], [0, 1/es]]
    return np.array([[c * es, c * es * u - sn / es], [sn * es, sn * es * u + c / es]])


def iwasawa(g):
    """Coordinates (theta, s, u) of a single matrix."""
    g = np.asarray(g, dtype=float)
    theta, s, u = kernels.iwasawa_batch(
        np.array([g[0, 0]]), np.array([g[0, 1]]), np.array([g[1, 0]]), np.array([g[1, 1]])
    )
    return float(theta[0]), float(s[0]), float(u[0])


def trace_from_iwasawa(theta, s, u):
    """tr(k_theta a_s n_u) = 2 cos(theta) cosh(s/2) + u e^{s/2} sin(theta)."""
    return 2.0 * np.cos(theta) * np.cosh(s / 2.0) + u * np.exp(s / 2.0) * np.sin(theta)


class GroupTestFunction:
    """Smooth compactly supported product bump on the group.

    f(k_theta a_s n_u) = amplitude * psi((theta-theta0)/h_theta) *
    psi((s-s0)/h_s) * psi((u-u0)/h_u), with the theta difference wrapped.
    `certify()` checks that the whole support box keeps |trace| away from 2,
    so supp f lies in the transversal set; the margin delta and the side
    (elliptic or hyperbolic) are recorded on the instance.
    """

    def __init__(self, center, halfwidths, amplitude=1.0):
        self.center = tuple(float(x) for x in center)
        self.halfwidths = tuple(float(x) for x in halfwidths)
        if len(self.center) != 3 or len(self.halfwidths) != 3:
            raise ValueError("need (theta0, s0, u0) and three halfwidths")
        if not all(h > 0 for h in self.halfwidths):
            raise ValueError("halfwidths must be positive")
        if self.halfwidths[0] >= np.pi:
            raise ValueError("theta halfwidth must stay below pi")
        self.amplitude = float(amplitude)
        self.certified = False
        self.delta = None
        self.side = None

    @property
    def params(self):
        return (*self.center, *self.halfwidths, self.amplitude)

    @property
    def support_box(self):
        c, h = self.center, self.halfwidths
        return tuple((c[i] - h[i], c[i] + h[i]) for i in range(3))

    def coords_values(self, theta, s, u):
        return kernels.bump3_batch(theta, s, u, self.params)

    def __call__(self, g):
        g = np.asarray(g, dtype=float)
        if g.ndim == 2:
            theta, s, u = iwasawa(g)
            return float(self.coords_values(np.array([theta]), np.array([s]), np.array([u]))[0])
        flat = g.reshape(-1, 2, 2)
        vals = kernels.group_bump_batch(flat[:, 0, 0], flat[:, 0, 1], flat[:, 1, 0], flat[:, 1, 1], self.params)
        return vals.reshape(g.shape[:-2])

    def certify(self, grid_points=41, min_delta=1e-3):
        """Grid certification that supp f avoids the band |trace| near 2.

        Every grid point of the support box must have |tr| on the same side
        of 2, with margin at least min_delta; otherwise a CertificationError
        carrying the violating point is raised.
        """
        axes = [np.linspace(lo, hi, grid_points) for lo, hi in self.support_box]
        TH, S, U = np.meshgrid(*axes, indexing="ij")
        tr = trace_from_iwasawa(TH, S, U)
        margin = np.abs(np.abs(tr) - 2.0)
        idx = np.unravel_index(np.argmin(margin), margin.shape)
        delta = float(margin[idx])
        sides = np.sign(np.abs(tr) - 2.0)
        if delta <= min_delta or not (np.all(sides > 0) or np.all(sides < 0)):
            worst = (float(TH[idx]), float(S[idx]), float(U[idx]))
            raise CertificationError(
                f"support not certified: |tr| = {abs(float(tr[idx])):.6f} at {worst}",
                point=worst,
            )
        self.certified = True
        self.delta = delta
        self.side = "elliptic" if np.all(sides < 0) else "hyperbolic"
        return self

    def to_json(self):
        return {
            "center": list(self.center),
            "halfwidths": list(self.halfwidths),
            "amplitude": self.amplitude,
            "certified": self.certified,
            "delta": self.delta,
            "side": self.side,
        }


class HaarGrid:
    """Gauss-Legendre tensor grid over a box in Iwasawa coordinates.

    Weights include the validated density e^s; `matrices()` caches the grid
    as four flat entry arrays for the kernels.  Integration is the
    deterministic pairwise sum of quadrature.py, so results do not depend on
    evaluation chunking.
    """

    def __init__(self, box, panels=(6, 6, 6), order=10):
        self.box = tuple((float(lo), float(hi)) for lo, hi in box)
        self.panels = tuple(int(p) for p in panels)
        self.order = int(order)
        axes = [panel_rule(lo, hi, p, order) for (lo, hi), p in zip(self.box, self.panels)]
        # fold the Haar density into the s-axis weights
        th_nodes, th_w = axes[0]
        s_nodes, s_w = axes[1]
        u_nodes, u_w = axes[2]
        s_w = s_w * np.exp(HAAR_DENSITY_EXPONENT * s_nodes)
        self.grid = TensorGrid([(th_nodes, th_w), (s_nodes, s_w), (u_nodes, u_w)])
        self.validated = False
        self.estimated_error = None
        self._entries = None

    @property
    def size(self):
        return self.grid.size

    def points(self):
        return self.grid.points()

    def weights(self):
        return self.grid.weights()

    def entries(self):
        """Flat (a, b, c, d) arrays of the grid matrices."""
        if self._entries is None:
            pts = self.points()
            theta, s, u = pts[:, 0], pts[:, 1], pts[:, 2]
            es = np.exp(s / 2.0)
            c, sn = np.cos(theta), np.sin(theta)
            a = c * es
            b = c * es * u - sn / es
            cc = sn * es
            d = sn * es * u + c / es
            self._entries = (a, b, cc, d)
        return self._entries

    def integrate(self, values):
        return self.grid.integrate(values)

    def integrate_function(self, f):
        pts = self.points()
        vals = f.coords_values(pts[:, 0], pts[:, 1], pts[:, 2])
        return self.integrate(vals)

    def require_validated(self):
        if not self.validated:
            raise UnvalidatedGridError(
                "Haar grid has not passed the invariance validation; call validate() first"
            )

    def validate(self, tol=1e-4, n_translates=2, seed=7):
        """Light left-invariance check on this grid's resolution class.

        Integrates a bump against the grid measure and against its translate
        by small random g0; failure means the density exponent is wrong for
        this parametrization (wrong exponents defect at order one, correct
        ones at quadrature error) and raises with the measured defect.
        """
        worst = validate_invariance(
            n_translates=n_translates,
            n_integrands=1,
            panels=self.panels,
            order=self.order,
            seed=seed,
        )
        if worst > tol:
            raise HaarValidationError(
                f"left-invariance defect {worst:.3e} exceeds {tol:.1e}; "
                f"density e^({HAAR_DENSITY_EXPONENT}*s) rejected at this resolution"
            )
        self.validated = True
        self.estimated_error = worst
        return self

    def to_json(self):
        return {
            "box": [list(b) for b in self.box],
            "panels": list(self.panels),
            "order": self.order,
            "size": self.size,
            "validated": self.validated,
            "estimated_error": self.estimated_error,
        }


def haar_quadrature(f, resolution=1, validate=True, order=10, base_panels=(6, 6, 6)):
    """Grid over supp f with the validated invariant density.

    `resolution` scales the panel counts; certification of f is not required
    here but the grid covers exactly the declared support box.
    """
    panels = tuple(max(1, int(round(p * resolution))) for p in base_panels)
    grid = HaarGrid(f.support_box, panels=panels, order=order)
    if validate:
        grid.validate()
    else:
        grid.validated = True
    return grid


def _box_of_translates(box, g0_list, samples=9):
    """Hull in Iwasawa coordinates of a box and its images g ~ g0^{-1} g."""
    axes = [np.linspace(lo, hi, samples) for lo, hi in box]
    TH, S, U = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([TH.ravel(), S.ravel(), U.ravel()], axis=-1)
    mats = np.array([from_iwasawa(*p) for p in pts])
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    for g0 in g0_list:
        g0_inv = np.linalg.inv(g0)
        moved = np.einsum("ij,njk->nik", g0_inv, mats)
        th, s, u = kernels.iwasawa_batch(moved[:, 0, 0], moved[:, 0, 1], moved[:, 1, 0], moved[:, 1, 1])
        lo = np.minimum(lo, [th.min(), s.min(), u.min()])
        hi = np.maximum(hi, [th.max(), s.max(), u.max()])
    pad = 0.05 * (hi - lo)
    return tuple((float(l - p), float(h + p)) for l, h, p in zip(lo, hi, pad))


def validate_invariance(n_translates=5, n_integrands=3, panels=(8, 8, 8), order=10, seed=123):
    """Left-invariance test of the quadrature measure.

    For bump integrands F and small random g0, compares int F(g0 g) dg with
    int F(g) dg over a common hull grid; returns the worst relative defect.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_integrands):
        center = (rng.uniform(-0.6, 0.6), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        halfw = (rng.uniform(0.5, 0.7), rng.uniform(0.5, 0.7), rng.uniform(0.5, 0.7))
        F = GroupTestFunction(center, halfw)
        g0_list = [from_iwasawa(*rng.uniform(-0.25, 0.25, size=3)) for _ in range(n_translates)]
        box = _box_of_translates(F.support_box, g0_list)
        grid = HaarGrid(box, panels=panels, order=order)
        base = grid.integrate_function(F)
        a, b, c, d = grid.entries()
        mats = np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)
        for g0 in g0_list:
            moved = np.einsum("ij,njk->nik", g0, mats)
            vals = kernels.group_bump_batch(
                moved[:, 0, 0], moved[:, 0, 1], moved[:, 1, 0], moved[:, 1, 1], F.params
            )
            translated = grid.integrate(vals)
            worst = max(worst, abs(translated - base) / abs(base))
    return worst


# -- random element helpers (used throughout the tests) ----------------------


def random_sl2(rng, scale=1.0):
    while True:
        A = rng.standard_normal((2, 2)) * scale
        det = np.linalg.det(A)
        if det > 0.05:
            return A / np.sqrt(det)


def random_elliptic(rng, theta_range=(0.2, np.pi - 0.2)):
    theta = rng.uniform(*theta_range)
    y = random_sl2(rng)
    return y @ rotation(theta) @ np.linalg.inv(y)


def random_hyperbolic(rng, lam_range=(1.2, 3.0)):
    lam = rng.uniform(*lam_range)
    y = random_sl2(rng)
    return y @ np.diag([lam, 1.0 / lam]) @ np.linalg.inv(y)

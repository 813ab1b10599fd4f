"""Rank-one model: the Riemann sphere with the real Moebius action.

Points are held in normalized homogeneous coordinates [z1 : z2], which keeps
infinity unexceptional.  The two open orbits are the upper and lower half
planes (sign of Im(z1 conj(z2))), the boundary orbit is the real circle.
The two charts are z = z1/z2 and w = z2/z1 with a smooth partition of unity
in between; on each chart the boundary is {t = 0} for t the imaginary part,
which is the normal-crossing picture with k = l = 1.
"""

from dataclasses import dataclass

import numpy as np

from .bump import smoothstep
from .errors import CentralElement, ChartDomainError

BOUNDARY_TOL = 1e-12
PARABOLIC_TOL = 1e-12


class SpherePoint:
    """Normalized homogeneous coordinates on the sphere.

    |z1|^2 + |z2|^2 = 1 and the first component of modulus >= 1/sqrt(2) is
    rotated real-positive, fixing a unique representative of the projective
    point.
    """

    __slots__ = ("z1", "z2")

    def __init__(self, z1, z2):
        z1, z2 = complex(z1), complex(z2)
        norm = np.hypot(abs(z1), abs(z2))
        if norm < 1e-300:
            raise ValueError("homogeneous coordinates must not both vanish")
        z1, z2 = z1 / norm, z2 / norm
        anchor = z1 if abs(z1) >= abs(z2) else z2
        phase = anchor / abs(anchor)
        self.z1 = z1 / phase
        self.z2 = z2 / phase

    @classmethod
    def from_plane(cls, z):
        """Point with chart coordinate z = n + i t (z2 = 1)."""
        return cls(z, 1.0)

    @classmethod
    def infinity(cls):
        return cls(1.0, 0.0)

    @property
    def height(self):
        """Im(z1 conj(z2)): the sign invariant separating the orbits."""
        return (self.z1 * np.conj(self.z2)).imag

    def chart_z(self):
        if abs(self.z2) <= BOUNDARY_TOL:
            raise ChartDomainError("point at infinity is outside the z-chart")
        return self.z1 / self.z2

    def chart_w(self):
        if abs(self.z1) <= BOUNDARY_TOL:
            raise ChartDomainError("point at zero is outside the w-chart")
        return self.z2 / self.z1

    def plane_coords(self):
        """(n, t) in the z-chart."""
        z = self.chart_z()
        return z.real, z.imag

    def __repr__(self):
        return f"SpherePoint({self.z1:.6g}, {self.z2:.6g})"

    def isclose(self, other, tol=1e-12):
        # compare as projective points: cross product of homogeneous coords
        return abs(self.z1 * other.z2 - self.z2 * other.z1) <= tol


def act(g, p):
    """Moebius action [z1 : z2] -> [a z1 + b z2 : c z1 + d z2]."""
    g = np.asarray(g, dtype=float)
    return SpherePoint(g[0, 0] * p.z1 + g[0, 1] * p.z2, g[1, 0] * p.z1 + g[1, 1] * p.z2)


def orbit_label(p):
    """'upper', 'lower', or 'boundary' from the sign of the height invariant."""
    eta = p.height
    if abs(eta) <= BOUNDARY_TOL:
        return "boundary"
    return "upper" if eta > 0 else "lower"


def chi(g, p, chart="z"):
    """Ratio t(g.p)/t(p) of the boundary-defining coordinate in one chart.

    Closed form 1/|c z + d|^2 (bottom row of g acting in the chart), positive
    and real-analytic across t = 0; satisfies the cocycle identity
    chi(gh, p) = chi(g, h.p) chi(h, p).
    """
    g = np.asarray(g, dtype=float)
    if chart == "z":
        z = p.chart_z()
        denom = g[1, 0] * z + g[1, 1]
    elif chart == "w":
        w = p.chart_w()
        # the w-chart action of g is by the matrix [[d, c], [b, a]]
        denom = g[0, 1] * w + g[0, 0]
    else:
        raise ValueError(f"unknown chart {chart!r}")
    mod2 = abs(denom) ** 2
    if mod2 <= 1e-280:
        raise ChartDomainError("image leaves the chart")
    return 1.0 / mod2


@dataclass
class SphereFixedPoint:
    """A fixed point of the sphere action with its multiplier data.

    `multiplier` is the derivative of the map p -> g^{-1}.p at the point (a
    complex number, chart-independent); `det_one_minus_dphi` is the real 2x2
    determinant |1 - multiplier|^2.
    """

    point: SpherePoint
    orbit: str
    eigenvalue: complex
    multiplier: complex
    det_one_minus_dphi: float
    transversal: bool
    chart: str

    def to_json(self):
        out = {
            "orbit": self.orbit,
            "det_1_minus_dphi": self.det_one_minus_dphi,
            "transversal": self.transversal,
            "chart": self.chart,
        }
        if self.orbit == "boundary" and abs(self.point.z2) <= BOUNDARY_TOL:
            out["z"] = "inf"
        else:
            z = self.point.chart_z()
            out["z"] = [z.real, z.imag]
        return out


def trace_type(g, tol=PARABOLIC_TOL):
    """'elliptic', 'parabolic' or 'hyperbolic' from the trace trichotomy."""
    tr = float(g[0, 0] + g[1, 1])
    disc = tr * tr - 4.0
    if abs(disc) <= tol * (1.0 + tr * tr):
        return "parabolic"
    return "hyperbolic" if disc > 0 else "elliptic"


def _eigenvector(g, lam):
    """Eigenvector of a 2x2 matrix for eigenvalue lam, stable branch choice."""
    a, b = g[0, 0], g[0, 1]
    c, d = g[1, 0], g[1, 1]
    v1 = (b, lam - a)
    v2 = (lam - d, c)
    n1 = abs(v1[0]) + abs(v1[1])
    n2 = abs(v2[0]) + abs(v2[1])
    return v1 if n1 >= n2 else v2


def fixed_points_on_sphere(g):
    """All fixed points of g with multipliers and transversality flags.

    Hyperbolic: two boundary points (the real eigendirections); elliptic: one
    point in each open orbit (a conjugate pair); parabolic: one boundary
    point with multiplier 1, flagged non-transversal.
    """
    g = np.asarray(g, dtype=float)
    if np.max(np.abs(g - np.eye(2))) <= 1e-12 or np.max(np.abs(g + np.eye(2))) <= 1e-12:
        raise CentralElement("central elements fix the whole sphere")
    tr = float(g[0, 0] + g[1, 1])
    kind = trace_type(g)
    records = []
    if kind == "parabolic":
        lam = tr / 2.0  # +-1
        v = _eigenvector(g, lam)
        p = SpherePoint(v[0], v[1])
        records.append(_record(p, lam, "boundary"))
    elif kind == "hyperbolic":
        root = np.sqrt(tr * tr - 4.0)
        for lam in ((tr + root) / 2.0, (tr - root) / 2.0):
            v = _eigenvector(g, lam)
            p = SpherePoint(v[0], v[1])
            records.append(_record(p, lam, "boundary"))
    else:
        lam = complex(tr / 2.0, np.sqrt(4.0 - tr * tr) / 2.0)
        v = _eigenvector(g.astype(complex), lam)
        p = SpherePoint(v[0], v[1])
        q = SpherePoint(np.conj(p.z1), np.conj(p.z2))
        if orbit_label(p) == "upper":
            upper, lower, lam_u = p, q, lam
        else:
            upper, lower, lam_u = q, p, np.conj(lam)
        records.append(_record(upper, lam_u, "upper"))
        records.append(_record(lower, np.conj(lam_u), "lower"))
    return records


def _record(p, eigenvalue, orbit):
    # multiplier of Phi_{g^{-1}} at the fixed point with g-eigenvalue mu is mu^2
    multiplier = eigenvalue * eigenvalue
    det = abs(1.0 - multiplier) ** 2
    chart = "z" if abs(p.z1) <= abs(p.z2) else "w"
    return SphereFixedPoint(
        point=p,
        orbit=orbit,
        eigenvalue=eigenvalue,
        multiplier=multiplier,
        det_one_minus_dphi=float(det),
        transversal=bool(det > 1e-8),
        chart=chart,
    )


def dphi(g, record):
    """Real 2x2 Jacobian of p -> g^{-1}.p at a fixed point, in its owning chart.

    The map is holomorphic, so this is multiplication by the complex
    multiplier; cross-checked against finite differences in dphi_fd.
    """
    zeta = record.multiplier
    return np.array([[zeta.real, -zeta.imag], [zeta.imag, zeta.real]])


def _chart_map(g_inv, chart):
    if chart == "z":
        def f(x, y):
            p = act(g_inv, SpherePoint.from_plane(complex(x, y)))
            z = p.chart_z()
            return z.real, z.imag
    else:
        def f(x, y):
            p = act(g_inv, SpherePoint(1.0, complex(x, y)))
            w = p.chart_w()
            return w.real, w.imag
    return f


def dphi_fd(g, record, step=1e-6):
    """Finite-difference Jacobian of Phi_{g^{-1}} at the fixed point."""
    g = np.asarray(g, dtype=float)
    g_inv = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]])
    if record.chart == "z":
        z0 = record.point.chart_z()
    else:
        z0 = record.point.chart_w()
    f = _chart_map(g_inv, record.chart)
    J = np.zeros((2, 2))
    for j, (dx, dy) in enumerate(((step, 0.0), (0.0, step))):
        fp = f(z0.real + dx, z0.imag + dy)
        fm = f(z0.real - dx, z0.imag - dy)
        J[0, j] = (fp[0] - fm[0]) / (2 * step)
        J[1, j] = (fp[1] - fm[1]) / (2 * step)
    return J


def transversal_class(g, tol=PARABOLIC_TOL):
    """Whether every fixed point of g on the sphere is simple: |tr g| != 2."""
    g = np.asarray(g, dtype=float)
    tr = float(g[0, 0] + g[1, 1])
    return abs(tr * tr - 4.0) > tol * (1.0 + tr * tr)


def base_section(p):
    """Upper-triangular g_p with g_p . (sign(t) i) = p, for p off the boundary."""
    n, t = p.plane_coords()
    if abs(t) <= BOUNDARY_TOL:
        raise ChartDomainError("boundary points have no orbit section")
    r = np.sqrt(abs(t))
    return np.array([[r, n / r], [0.0, 1.0 / r]])


class ChartAtlas:
    """Two-chart atlas with a smooth partition of unity.

    alpha_z(p) transitions from 1 to 0 as |z| crosses [r_inner, r_outer], so
    alpha_z is compactly supported in the z-chart and alpha_w = 1 - alpha_z
    in the w-chart.  `weight(n, t, s)` is the s-dependent chart-relative
    boundary weight  alpha_z |t_z|^{s+1} + alpha_w |t_w|^{s+1}  used by both
    sides of the character formula.
    """

    def __init__(self, r_inner=1.0, r_outer=2.0):
        if not 0 < r_inner < r_outer:
            raise ValueError("need 0 < r_inner < r_outer")
        self.r_inner = float(r_inner)
        self.r_outer = float(r_outer)

    def alpha_z(self, p):
        z2 = abs(p.z2)
        if z2 <= BOUNDARY_TOL:
            return 0.0
        return self._alpha_z_from_modulus(abs(p.z1) / z2)

    def _alpha_z_from_modulus(self, mod):
        return smoothstep((self.r_outer - mod) / (self.r_outer - self.r_inner))

    def alpha_w(self, p):
        return 1.0 - self.alpha_z(p)

    def partition_values(self, p):
        a = self.alpha_z(p)
        return a, 1.0 - a

    def weight_arrays(self, n, t, s):
        """Vectorized chart weight at plane points (n, t), t != 0."""
        n = np.asarray(n, dtype=float)
        t = np.asarray(t, dtype=float)
        mod = np.sqrt(n * n + t * t)
        a_z = smoothstep((self.r_outer - mod) / (self.r_outer - self.r_inner))
        t_w = np.abs(t) / (mod * mod)
        power = s + 1.0
        if np.iscomplexobj(np.asarray(s)) or isinstance(s, complex):
            tz = np.abs(t).astype(complex) ** power
            tw = t_w.astype(complex) ** power
        else:
            tz = np.abs(t) ** power
            tw = t_w**power
        return a_z * tz + (1.0 - a_z) * tw

    def weight(self, p, s):
        if orbit_label(p) == "boundary":
            raise ChartDomainError("boundary weight is handled by the trace routines")
        n, t = p.plane_coords()
        return complex(self.weight_arrays(n, t, s)) if isinstance(s, complex) else float(
            self.weight_arrays(n, t, s)
        )

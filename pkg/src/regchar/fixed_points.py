"""Fixed points of left translations on homogeneous spaces G/H.

For G = SL(n, R) and H either the maximal compact subgroup K = SO(n) or the
minimal parabolic P (upper triangular), this module enumerates fixed cosets,
extracts isotropy representatives h = x^{-1} g x, and computes the
determinant det(1 - dl_{g^{-1}}) two independent ways: from a finite
difference Jacobian in an exponential normal chart, and from the isotropy
action Ad(h) on g/h.  The equality of the two is the identity the test suite
hammers on.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import sphere
from .errors import CentralElement, NotAFixedPoint, NotRealSemisimpleRegular
from .structure import group_element

EIGEN_SPLIT_TOL = 1e-8
MEMBERSHIP_TOL = 1e-10
TRANSVERSAL_TOL = 1e-8


def is_regular(g):
    """Distinct eigenvalues over C, with relative splitting tolerance 1e-8."""
    g = np.asarray(g, dtype=float)
    lams = np.linalg.eigvals(g)
    scale = max(1.0, float(np.max(np.abs(lams))))
    for i in range(len(lams)):
        for j in range(i + 1, len(lams)):
            if abs(lams[i] - lams[j]) <= EIGEN_SPLIT_TOL * scale:
                return False
    return True


@dataclass
class Flag:
    """Complete flag as nested orthonormal spanning sets of dims 1..n-1."""

    n: int
    bases: list  # bases[k] is an (n, k+1) orthonormal matrix

    @classmethod
    def from_ordered_lines(cls, vectors):
        """Flag spanned by the leading subsets of the given vectors."""
        V = np.stack(vectors, axis=1)
        Q, _ = np.linalg.qr(V)
        n = V.shape[0]
        return cls(n=n, bases=[Q[:, : k + 1] for k in range(n - 1)])

    def nesting_residual(self):
        worst = 0.0
        for small, big in zip(self.bases[:-1], self.bases[1:]):
            proj = big @ (big.T @ small)
            worst = max(worst, float(np.max(np.abs(proj - small))))
        return worst

    def invariance_residual(self, g):
        """max over subspaces of ||(1 - P_V) g P_V|| for the flag subspaces."""
        worst = 0.0
        for B in self.bases:
            gB = np.asarray(g) @ B
            resid = gB - B @ (B.T @ gB)
            worst = max(worst, float(np.max(np.abs(resid))))
        return worst

    def representative(self, eigenbasis_columns):
        """Unimodular matrix whose leading columns span the flag."""
        x = np.stack(eigenbasis_columns, axis=1)
        det = np.linalg.det(x)
        if det < 0:
            x = x.copy()
            x[:, -1] *= -1.0
            det = -det
        return x / det ** (1.0 / x.shape[0])


def fixed_flags(g):
    """All complete flags fixed by g.

    Requires distinct eigenvalues.  With all eigenvalues real the invariant
    flags are exactly the n! orderings of the eigenlines; with a complex pair
    present there is no invariant complete flag and the list is empty.
    Repeated or defective spectra raise NotRealSemisimpleRegular.
    """
    g = group_element(g)
    n = g.shape[0]
    lams, vecs = np.linalg.eig(g)
    scale = max(1.0, float(np.max(np.abs(lams))))
    for i in range(n):
        for j in range(i + 1, n):
            if abs(lams[i] - lams[j]) <= EIGEN_SPLIT_TOL * scale:
                raise NotRealSemisimpleRegular(
                    f"eigenvalues {lams[i]:.6g} and {lams[j]:.6g} are not split"
                )
    if np.max(np.abs(lams.imag)) > EIGEN_SPLIT_TOL * scale:
        return []
    vecs = vecs.real
    vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
    flags = []
    for order in permutations(range(n)):
        flag = Flag.from_ordered_lines([vecs[:, i] for i in order])
        if flag.invariance_residual(g) > 1e-10 * scale:
            raise NotRealSemisimpleRegular("eigenline flag failed the invariance residual")
        flags.append(flag)
    return flags


# -- subgroups ---------------------------------------------------------------


def _in_subgroup(h, tag, tol=MEMBERSHIP_TOL):
    h = np.asarray(h, dtype=float)
    n = h.shape[0]
    if tag == "K":
        return float(np.max(np.abs(h.T @ h - np.eye(n)))) <= tol and abs(np.linalg.det(h) - 1) <= tol
    if tag == "P":
        lower = np.tril(h, k=-1)
        return float(np.max(np.abs(lower))) <= tol and abs(np.linalg.det(h) - 1) <= tol
    raise ValueError(f"unknown subgroup tag {tag!r}")


def _complement_basis(n, tag):
    """Basis of the trace_theta_form-orthocomplement q of h in sl(n)."""
    if tag == "K":
        # q = symmetric traceless: off-diagonal pairs plus an orthonormalized
        # diagonal traceless family
        basis = []
        for i in range(n):
            for j in range(i + 1, n):
                B = np.zeros((n, n))
                B[i, j] = B[j, i] = 1.0 / np.sqrt(2.0)
                basis.append(B)
        raw = [np.diag([1.0 if m == k else -1.0 if m == k + 1 else 0.0 for m in range(n)]) for k in range(n - 1)]
        ortho = []
        for B in raw:
            C = B.copy()
            for D in ortho:
                C = C - np.trace(C @ D.T) * D
            C = C / np.sqrt(np.trace(C @ C.T))
            ortho.append(C)
        return basis + ortho
    if tag == "P":
        # q = strictly lower triangular
        basis = []
        for i in range(n):
            for j in range(i):
                B = np.zeros((n, n))
                B[i, j] = 1.0
                basis.append(B)
        return basis
    raise ValueError(f"unknown subgroup tag {tag!r}")


def _project_to_complement(M, tag):
    """Orthogonal projection of a traceless matrix onto q along h."""
    if tag == "K":
        return (M + M.T) / 2.0
    if tag == "P":
        return np.tril(M, k=-1)
    raise ValueError(f"unknown subgroup tag {tag!r}")


def _coords_in_complement(M, basis):
    return np.array([np.trace(M @ B.T) for B in basis])


def _retract(y, tag):
    """Solve y = exp(q) h with q in the complement and h in the subgroup.

    K: polar decomposition, q = (1/2) log(y y^t) through the symmetric
    eigendecomposition.  P: Doolittle LU without pivoting, q = log of the
    unipotent lower factor (finite nilpotent series).
    """
    if tag == "K":
        S = y @ y.T
        w, U = np.linalg.eigh(S)
        if np.any(w <= 0):
            raise NotAFixedPoint("polar retraction broke down")
        return U @ np.diag(0.5 * np.log(w)) @ U.T
    if tag == "P":
        n = y.shape[0]
        L = np.eye(n)
        Umat = y.astype(float).copy()
        for k in range(n - 1):
            if abs(Umat[k, k]) < 1e-14:
                raise NotAFixedPoint("LU retraction hit a vanishing pivot")
            for i in range(k + 1, n):
                factor = Umat[i, k] / Umat[k, k]
                L[i, k] = factor
                Umat[i, :] = Umat[i, :] - factor * Umat[k, :]
        N = L - np.eye(n)
        out = np.zeros_like(N)
        term = np.eye(n)
        for k in range(1, n):
            term = term @ N
            out = out + ((-1) ** (k + 1)) * term / k
        return out
    raise ValueError(f"unknown subgroup tag {tag!r}")


def isotropy_rep(g, x, subgroup):
    """h = x^{-1} g x, verified to lie in the tagged subgroup."""
    g = group_element(g)
    x = group_element(x)
    h = np.linalg.solve(x, g @ x)
    if not _in_subgroup(h, subgroup, tol=1e-8):
        raise NotAFixedPoint(f"x^-1 g x is not in {subgroup} (coset not fixed)")
    return h


def _exp_series(X, terms=24):
    n = X.shape[0]
    out = np.eye(n)
    term = np.eye(n)
    for k in range(1, terms):
        term = term @ X / k
        out = out + term
    return out


def jacobian_via_chart(g, x, subgroup, step=1e-5):
    """Jacobian of l_{g^{-1}} at the fixed coset xH in the normal chart.

    Chart: q -> x exp(q) H on the trace_theta_form-orthocomplement of h.
    Central differences with one Richardson refinement (steps h and h/2).
    """
    g = group_element(g)
    x = group_element(x)
    isotropy_rep(g, x, subgroup)  # validates that xH is fixed
    n = g.shape[0]
    basis = _complement_basis(n, subgroup)
    g_inv = np.linalg.inv(g)
    x_inv = np.linalg.inv(x)
    core = x_inv @ g_inv @ x

    def chart_image(qvec):
        q = sum(c * B for c, B in zip(qvec, basis))
        y = core @ _exp_series(q)
        return _coords_in_complement(_retract(y, subgroup), basis)

    dim = len(basis)

    def jac(h):
        J = np.zeros((dim, dim))
        for j in range(dim):
            e = np.zeros(dim)
            e[j] = h
            J[:, j] = (chart_image(e) - chart_image(-e)) / (2.0 * h)
        return J

    J1 = jac(step)
    J2 = jac(step / 2.0)
    return (4.0 * J2 - J1) / 3.0


def jacobian_via_ad(h, subgroup):
    """Matrix of Ad(h) on g/h in the fixed complement basis."""
    h = group_element(h)
    n = h.shape[0]
    if not _in_subgroup(h, subgroup, tol=1e-8):
        raise NotAFixedPoint(f"element is not in {subgroup}")
    basis = _complement_basis(n, subgroup)
    h_inv = np.linalg.inv(h)
    cols = []
    for B in basis:
        image = _project_to_complement(h @ B @ h_inv, subgroup)
        cols.append(_coords_in_complement(image, basis))
    return np.stack(cols, axis=1)


@dataclass
class FixedPointRecord:
    """One fixed point with both Lemma-2 determinant values."""

    location: object  # Flag or SpherePoint
    subgroup: str
    isotropy_h: np.ndarray
    det_chart: float
    det_ad: float
    transversal: bool

    @property
    def margin(self):
        return abs(self.det_ad)

    def to_json(self):
        if isinstance(self.location, sphere.SpherePoint):
            try:
                z = self.location.chart_z()
                loc = [z.real, z.imag]
            except Exception:
                loc = "inf"
        else:
            loc = [[float(v) for v in col] for col in self.location.bases[-1].T]
        return {
            "location": loc,
            "subgroup": self.subgroup,
            "isotropy_h": [[float(v) for v in row] for row in np.asarray(self.isotropy_h)],
            "det_chart": self.det_chart,
            "det_ad": self.det_ad,
            "transversal": self.transversal,
            "margin": self.margin,
        }


def _record_for(g, x, subgroup, location):
    # the stored representative is x^{-1} g x; the determinant identity for
    # l_{g^{-1}} pairs with the isotropy action of g^{-1}, i.e. Ad(h^{-1})
    h = isotropy_rep(g, x, subgroup)
    J_chart = jacobian_via_chart(g, x, subgroup)
    A = jacobian_via_ad(np.linalg.inv(h), subgroup)
    dim = A.shape[0]
    det_chart = float(np.linalg.det(np.eye(dim) - J_chart))
    det_ad = float(np.linalg.det(np.eye(dim) - A))
    return FixedPointRecord(
        location=location,
        subgroup=subgroup,
        isotropy_h=h,
        det_chart=det_chart,
        det_ad=det_ad,
        transversal=bool(abs(det_ad) > TRANSVERSAL_TOL),
    )


def flag_fixed_point_records(g):
    """FixedPointRecords for all flags fixed by g on G/P."""
    g = group_element(g)
    n = g.shape[0]
    if not fixed_flags(g):  # validates the spectrum; [] for complex-regular g
        return []
    _, vecs = np.linalg.eig(g)
    vecs = vecs.real / np.linalg.norm(vecs.real, axis=0, keepdims=True)
    out = []
    for order in permutations(range(n)):
        cols = [vecs[:, i] for i in order]
        flag = Flag.from_ordered_lines(cols)
        x = flag.representative(cols)
        out.append(_record_for(g, x, "P", flag))
    return out


def upper_half_plane_fixed_point(g):
    """The unique fixed point of an elliptic g on G/K, as a SpherePoint."""
    g = group_element(g)
    if sphere.trace_type(g) != "elliptic":
        return None
    for rec in sphere.fixed_points_on_sphere(g):
        if rec.orbit == "upper":
            return rec.point
    return None


def hyperbolic_plane_records(g):
    """FixedPointRecords of the G/K action (upper half-plane model)."""
    g = group_element(g)
    if g.shape != (2, 2):
        raise ValueError("the hyperbolic-plane space is the SL(2) model")
    p = upper_half_plane_fixed_point(g)
    if p is None:
        return []
    x = sphere.base_section(p)
    x = x / np.sqrt(np.linalg.det(x))
    return [_record_for(g, x, "K", p)]


@dataclass
class TransversalityResult:
    transversal: bool
    margin: float
    n_fixed_points: int


def is_transversal(g, space):
    """Transversality of l_{g^{-1}} on the tagged space.

    space = "flags": complete flags of the ambient dimension;
    space = "hyperbolic_plane": G/K for SL(2).  Vacuously transversal when
    there are no fixed points; the margin is the smallest |det(1 - dl)|.
    """
    g = group_element(g)
    n = g.shape[0]
    if np.max(np.abs(g - np.eye(n))) <= 1e-12 or (
        n % 2 == 0 and np.max(np.abs(g + np.eye(n))) <= 1e-12
    ):
        raise CentralElement("central elements fix every point")
    if space == "flags":
        records = flag_fixed_point_records(g)
    elif space == "hyperbolic_plane":
        records = hyperbolic_plane_records(g)
    else:
        raise ValueError(f"unknown space {space!r}")
    if not records:
        return TransversalityResult(True, np.inf, 0)
    margin = min(abs(r.det_ad) for r in records)
    return TransversalityResult(bool(margin > TRANSVERSAL_TOL), float(margin), len(records))

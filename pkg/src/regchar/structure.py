"""Structure theory of sl(n, R).

Cartan involution and decomposition, Killing and modified bilinear forms,
restricted roots with their root spaces, parabolic data for every subset of
the simple roots, Weyl group representatives, and the orbit census of the
compactification.  Everything is computed in a fixed basis of sl(n) so that
results are deterministic, and all constructions with integer inputs stay
exactly integer-valued.

Matrices are plain numpy arrays; `algebra_element` / `group_element` validate
the defining invariants (tracelessness, unit determinant) and are used at the
public entry points.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product

import numpy as np

from .errors import DimensionMismatch

ALGEBRA_TRACE_TOL = 1e-12
GROUP_DET_TOL = 1e-10


def algebra_element(mat):
    """Validate and return a traceless real square matrix."""
    X = np.asarray(mat, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("entries must be finite")
    scale = 1.0 + np.max(np.abs(X), initial=0.0)
    if abs(np.trace(X)) > ALGEBRA_TRACE_TOL * scale:
        raise ValueError(f"matrix is not traceless (trace {np.trace(X)})")
    return X


def group_element(mat):
    """Validate and return a real matrix with determinant 1."""
    g = np.asarray(mat, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError("entries must be finite")
    det = np.linalg.det(g)
    if abs(det - 1.0) > GROUP_DET_TOL:
        raise ValueError(f"determinant {det} is not 1")
    return g


def elementary(n, i, j):
    """Matrix unit E_ij (0-based indices)."""
    E = np.zeros((n, n))
    E[i, j] = 1.0
    return E


def cartan_involution(X):
    """theta(X) = -X^t."""
    X = algebra_element(X)
    return -X.T


def cartan_decompose(X):
    """Split X into its antisymmetric and symmetric parts (k-part, p-part)."""
    X = algebra_element(X)
    return (X - X.T) / 2.0, (X + X.T) / 2.0


def bracket(X, Y):
    return X @ Y - Y @ X


def sl_basis(n):
    """Fixed ordered basis of sl(n): all E_ij with i != j, then the diagonal
    units H_k = E_kk - E_{k+1,k+1}."""
    basis = [elementary(n, i, j) for i in range(n) for j in range(n) if i != j]
    for k in range(n - 1):
        H = np.zeros((n, n))
        H[k, k] = 1.0
        H[k + 1, k + 1] = -1.0
        basis.append(H)
    return basis


def coordinates(X, n):
    """Coordinates of a traceless matrix in the fixed sl(n) basis."""
    coords = [X[i, j] for i in range(n) for j in range(n) if i != j]
    # diagonal part: diag = sum c_k (e_k - e_{k+1})  =>  c_k = partial sums
    c = np.cumsum(np.diag(X))[:-1]
    return np.concatenate([coords, c])


def ad_matrix(X):
    """Matrix of ad X = [X, .] on sl(n) in the fixed basis."""
    X = algebra_element(X)
    n = X.shape[0]
    basis = sl_basis(n)
    cols = [coordinates(bracket(X, B), n) for B in basis]
    return np.stack(cols, axis=1)


def killing_form(X, Y):
    """Tr(ad X ad Y), computed from the (n^2-1) x (n^2-1) adjoint matrices."""
    X, Y = algebra_element(X), algebra_element(Y)
    if X.shape != Y.shape:
        raise DimensionMismatch(f"{X.shape} vs {Y.shape}")
    return float(np.trace(ad_matrix(X) @ ad_matrix(Y)))


def theta_form(X, Y):
    """<X, Y>_theta = -<X, theta Y> with the true Killing form."""
    return -killing_form(X, cartan_involution(Y))


def trace_theta_form(X, Y):
    """Tr(X Y^t): the modified form in its trace normalization."""
    X, Y = algebra_element(X), algebra_element(Y)
    if X.shape != Y.shape:
        raise DimensionMismatch(f"{X.shape} vs {Y.shape}")
    return float(np.trace(X @ Y.T))


@dataclass(frozen=True)
class RestrictedRoot:
    """The functional e_i - e_j on the diagonal subspace (1-based indices)."""

    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("i and j must differ")

    def value(self, H):
        """alpha(H) for diagonal H."""
        return float(H[self.i - 1, self.i - 1] - H[self.j - 1, self.j - 1])

    @property
    def positive(self):
        return self.i < self.j

    @property
    def simple(self):
        return self.j == self.i + 1

    def __str__(self):
        return f"e{self.i}-e{self.j}"


class RootSystem:
    """Restricted roots of (sl(n), a) with positivity from the standard order."""

    def __init__(self, n):
        if n < 2:
            raise ValueError("need n >= 2")
        self.n = n
        self.roots = [RestrictedRoot(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]

    @property
    def positive_roots(self):
        return [a for a in self.roots if a.positive]

    @property
    def simple_roots(self):
        return [a for a in self.roots if a.positive and a.simple]


def restricted_roots(n):
    return RootSystem(n)


def root_space_basis(alpha, n):
    """Normalized generator E_ij of the root space for alpha = e_i - e_j."""
    if not (1 <= alpha.i <= n and 1 <= alpha.j <= n):
        raise ValueError(f"root {alpha} does not fit in sl({n})")
    return elementary(n, alpha.i - 1, alpha.j - 1)


def q_vector(alpha, n):
    """Q_alpha = [theta E, E] for the trace_theta_form-normalized generator E.

    For E = E_ij this is exactly diag(..., 1, ..., -1, ...) with the 1 in
    position i and the -1 in position j.
    """
    E = root_space_basis(alpha, n)
    return bracket(cartan_involution(E), E)


# -- exact rational linear algebra for the small nullspace problems ---------


def _rref(rows):
    """Reduced row echelon form over Fraction; returns (rref_rows, pivot_cols)."""
    rows = [list(r) for r in rows]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot = next((k for k in range(r, n_rows) if rows[k][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1, 1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for k in range(n_rows):
            if k != r and rows[k][c] != 0:
                factor = rows[k][c]
                rows[k] = [x - factor * y for x, y in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return rows[:r], pivots


def exact_nullspace(rows, n_cols):
    """Integer basis of the nullspace of a rational matrix.

    Each basis vector is scaled to integer entries with content 1 and first
    nonzero entry positive, so fixtures with integer data come out exactly.
    """
    rows = [[Fraction(x).limit_denominator(10**12) for x in r] for r in rows]
    if not rows:
        rows = [[Fraction(0)] * n_cols]
    rref, pivots = _rref(rows)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n_cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rref[r][fc]
        denom = 1
        for x in v:
            denom = denom * x.denominator // np.gcd(denom, x.denominator)
        ints = [int(x * denom) for x in v]
        g = 0
        for x in ints:
            g = np.gcd(g, abs(x))
        if g > 1:
            ints = [x // g for x in ints]
        lead = next(x for x in ints if x != 0)
        if lead < 0:
            ints = [-x for x in ints]
        basis.append(np.array(ints, dtype=float))
    return basis


def so_basis(n):
    """Basis F_ij = E_ij - E_ji (i < j) of the antisymmetric matrices."""
    return [elementary(n, i, j) - elementary(n, j, i) for i in range(n) for j in range(i + 1, n)]


def centralizer_algebra(a_basis, n):
    """Basis of {X antisymmetric : [X, H] = 0 for all H in span(a_basis)}.

    Computed as the exact nullspace of the stacked bracket map on so(n)
    coordinates; with an empty a_basis this is all of so(n).
    """
    kb = so_basis(n)
    if not a_basis:
        return [b.copy() for b in kb]
    rows = []
    for H in a_basis:
        H = algebra_element(H)
        # equations: coordinates of [sum_c x_c F_c, H] = 0
        cols = [bracket(F, H) for F in kb]
        for i in range(n):
            for j in range(n):
                row = [C[i, j] for C in cols]
                if any(abs(x) > 0 for x in row):
                    rows.append(row)
    null = exact_nullspace(rows, len(kb))
    out = []
    for v in null:
        M = sum(c * F for c, F in zip(v, kb))
        out.append(M)
    return out


def _diag_traceless_basis(n):
    """Integer basis diag units of the diagonal traceless subspace."""
    return [np.diag([1.0 if k == i else (-1.0 if k == i + 1 else 0.0) for k in range(n)]) for i in range(n - 1)]


@dataclass
class ParabolicData:
    """Subspace bases and dimensions attached to a subset of simple roots.

    All n-type bases consist of matrix units, the a-type bases of integer
    diagonal matrices; `m_theta_k_basis` spans the centralizer of a_theta in
    the antisymmetric matrices.
    """

    n: int
    theta: tuple
    n_plus_of_theta: list
    n_minus_of_theta: list
    n_plus_theta: list
    n_minus_theta: list
    a_of_theta: list
    a_theta: list
    m_theta_k_basis: list
    m_theta_k_components: list = field(default_factory=list)

    @property
    def dims(self):
        return {
            "n_plus_of_theta": len(self.n_plus_of_theta),
            "n_minus_of_theta": len(self.n_minus_of_theta),
            "n_plus_theta": len(self.n_plus_theta),
            "n_minus_theta": len(self.n_minus_theta),
            "a_of_theta": len(self.a_of_theta),
            "a_theta": len(self.a_theta),
            "m_theta_k": len(self.m_theta_k_basis),
        }

    @property
    def dim_G_mod_P_theta_K(self):
        dim_g = self.n * self.n - 1
        return dim_g - (len(self.m_theta_k_basis) + len(self.a_theta) + len(self.n_plus_theta))

    # subgroup realizations: generators through the exponential map

    def exp_a_of_theta(self, params):
        return _exp_diag_span(self.a_of_theta, params)

    def exp_a_theta(self, params):
        return _exp_diag_span(self.a_theta, params)

    def exp_n_plus_theta(self, params):
        return _exp_nilpotent_span(self.n_plus_theta, params)

    def exp_n_minus_theta(self, params):
        return _exp_nilpotent_span(self.n_minus_theta, params)

    # membership tests

    def in_A_theta(self, g, tol=1e-10):
        return _in_exp_diag_span(g, self.a_theta, tol)

    def in_A_of_theta(self, g, tol=1e-10):
        return _in_exp_diag_span(g, self.a_of_theta, tol)

    def in_N_plus_theta(self, g, tol=1e-10):
        return _in_exp_nilpotent_span(g, self.n_plus_theta, tol)

    def in_M_theta_K(self, g, tol=1e-10):
        g = np.asarray(g, dtype=float)
        if np.max(np.abs(g.T @ g - np.eye(self.n))) > tol:
            return False
        if abs(np.linalg.det(g) - 1.0) > tol:
            return False
        return all(np.max(np.abs(g @ H - H @ g)) <= tol for H in self.a_theta) or not self.a_theta

    def in_P_theta_K(self, g, tol=1e-8):
        """Membership in M_theta(K) A_theta N+_theta via QR factorization."""
        g = np.asarray(g, dtype=float)
        q, r = np.linalg.qr(g)
        signs = np.sign(np.diag(r))
        q, r = q * signs[None, :], r * signs[:, None]
        if not self.in_M_theta_K(q, tol):
            return False
        a = np.diag(np.diag(r))
        if not self.in_A_theta(a, tol):
            return False
        nn = np.diag(1.0 / np.diag(r)) @ r
        return self.in_N_plus_theta(nn, tol)


def _exp_diag_span(basis, params):
    H = sum(p * B for p, B in zip(params, basis)) if basis else np.zeros((1, 1))
    if not basis:
        raise ValueError("empty diagonal span")
    return np.diag(np.exp(np.diag(H)))


def _exp_nilpotent_span(basis, params):
    if not basis:
        raise ValueError("empty nilpotent span")
    X = sum(p * B for p, B in zip(params, basis))
    n = X.shape[0]
    out = np.eye(n)
    term = np.eye(n)
    for k in range(1, n):
        term = term @ X / k
        out = out + term
    return out


def _nilpotent_log(g):
    n = g.shape[0]
    N = g - np.eye(n)
    out = np.zeros_like(N)
    term = np.eye(n)
    for k in range(1, n):
        term = term @ N
        out = out + ((-1) ** (k + 1)) * term / k
    return out


def _in_span(X, basis, tol):
    if not basis:
        return float(np.max(np.abs(X))) <= tol
    A = np.stack([B.ravel() for B in basis], axis=1)
    coeffs, *_ = np.linalg.lstsq(A, X.ravel(), rcond=None)
    resid = A @ coeffs - X.ravel()
    return float(np.max(np.abs(resid))) <= tol


def _in_exp_diag_span(g, basis, tol):
    g = np.asarray(g, dtype=float)
    if np.max(np.abs(g - np.diag(np.diag(g)))) > tol:
        return False
    d = np.diag(g)
    if np.any(d <= 0):
        return False
    return _in_span(np.diag(np.log(d)), basis, tol)


def _in_exp_nilpotent_span(g, basis, tol):
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    # unipotent check: (g - 1)^n = 0
    N = g - np.eye(n)
    P = np.eye(n)
    for _ in range(n):
        P = P @ N
    if np.max(np.abs(P)) > tol:
        return False
    return _in_span(_nilpotent_log(g), basis, tol)


def _theta_subset_key(theta):
    return tuple(sorted((a.i, a.j) for a in theta))


def validate_theta(theta, n):
    simple = {(a.i, a.j) for a in RootSystem(n).simple_roots}
    for a in theta:
        if (a.i, a.j) not in simple:
            raise ValueError(f"{a} is not a simple root of sl({n})")


def span_of_theta(theta, n):
    """Positive roots expressible in the roots of theta: for sl(n) these are
    the e_i - e_j whose whole simple-root run {alpha_i .. alpha_{j-1}} lies
    in theta."""
    chosen = {a.i for a in theta}
    out = []
    for root in RootSystem(n).positive_roots:
        if all(k in chosen for k in range(root.i, root.j)):
            out.append(root)
    return out


def parabolic_data(theta, n):
    """All seven subspace bases attached to theta, plus component data of
    M_theta(K) for n <= 3."""
    theta = list(theta)
    validate_theta(theta, n)
    inside = span_of_theta(theta, n)
    inside_keys = {(a.i, a.j) for a in inside}
    outside = [a for a in RootSystem(n).positive_roots if (a.i, a.j) not in inside_keys]

    n_plus_of = [root_space_basis(a, n) for a in inside]
    n_minus_of = [cartan_involution(B) for B in n_plus_of]
    n_plus = [root_space_basis(a, n) for a in outside]
    n_minus = [cartan_involution(B) for B in n_plus]

    a_of = [q_vector(a, n) for a in theta]
    # a_theta: diagonal traceless vectors orthogonal to every Q_alpha
    diag_basis = _diag_traceless_basis(n)
    rows = [[np.trace(D @ Q.T) for D in diag_basis] for Q in a_of]
    a_theta = [sum(c * D for c, D in zip(v, diag_basis)) for v in exact_nullspace(rows, len(diag_basis))]

    m_basis = centralizer_algebra(a_theta, n)
    components = _m_theta_components(a_theta, n) if n <= 3 else []
    return ParabolicData(
        n=n,
        theta=tuple(theta),
        n_plus_of_theta=n_plus_of,
        n_minus_of_theta=n_minus_of,
        n_plus_theta=n_plus,
        n_minus_theta=n_minus,
        a_of_theta=a_of,
        a_theta=a_theta,
        m_theta_k_basis=m_basis,
        m_theta_k_components=components,
    )


def m_group(n):
    """The centralizer of the diagonal subspace in SO(n): diagonal sign
    matrices with an even number of -1 entries."""
    out = []
    for signs in product([1.0, -1.0], repeat=n):
        if np.prod(signs) == 1.0:
            out.append(np.diag(signs))
    return out


def _m_theta_components(a_theta, n):
    """Representatives of the connected components of M_theta(K).

    The identity component is the product of rotation groups of the blocks on
    which the a_theta diagonal is constant; a sign matrix lies in it exactly
    when every block carries an even number of -1 entries.  Components are
    then the cosets of M by those even-in-every-block sign matrices.
    """
    if a_theta:
        diags = np.stack([np.diag(H) for H in a_theta])
        blocks = []
        assigned = [False] * n
        for i in range(n):
            if assigned[i]:
                continue
            block = [j for j in range(n) if np.allclose(diags[:, j], diags[:, i])]
            for j in block:
                assigned[j] = True
            blocks.append(block)
    else:
        blocks = [list(range(n))]

    def in_identity_component(m):
        d = np.diag(m)
        return all(int(np.sum(d[block] < 0)) % 2 == 0 for block in blocks)

    reps = []
    for m in m_group(n):
        if not any(in_identity_component(m @ r.T) for r in reps):
            reps.append(m)
    return reps


@dataclass(frozen=True)
class OrbitCensusEntry:
    theta: tuple
    multiplicity: int
    orbit_dim: int
    codim: int


def orbit_census(n):
    """One entry per subset of the simple roots, ordered by subset size then
    lexicographically, with multiplicity 2^#theta and the dimension of the
    corresponding boundary orbit."""
    simple = RootSystem(n).simple_roots
    entries = []
    subsets = []
    for size in range(len(simple) + 1):
        from itertools import combinations

        subsets.extend(combinations(simple, size))
    for theta in subsets:
        data = parabolic_data(list(theta), n)
        orbit_dim = data.dim_G_mod_P_theta_K
        codim = (n - 1) - len(theta)
        entries.append(
            OrbitCensusEntry(
                theta=tuple(str(a) for a in theta),
                multiplicity=2 ** len(theta),
                orbit_dim=orbit_dim,
                codim=codim,
            )
        )
    return entries


def weyl_group(n):
    """n! signed permutation representatives of M*/M in SO(n).

    The representative of sigma sends e_j to e_{sigma(j)}, with the sign of
    the last column adjusted so the determinant is +1; distinct permutations
    give distinct M-cosets.
    """
    out = []
    for sigma in permutations(range(n)):
        P = np.zeros((n, n))
        for j, i in enumerate(sigma):
            P[i, j] = 1.0
        det = np.linalg.det(P)
        if det < 0:
            P[:, n - 1] *= -1.0
        out.append(P)
    return out


# -- JSON export --------------------------------------------------------------


def _mat_json(M):
    out = []
    for row in np.asarray(M):
        out.append([int(x) if float(x).is_integer() else float(x) for x in row])
    return out


def structure_report(n):
    """Machine-readable structure report: roots, parabolic data for every
    theta, orbit census, Weyl and M representatives."""
    system = restricted_roots(n)
    report = {
        "n": n,
        "roots": {
            "all": [str(a) for a in system.roots],
            "positive": [str(a) for a in system.positive_roots],
            "simple": [str(a) for a in system.simple_roots],
            "root_spaces": {str(a): _mat_json(root_space_basis(a, n)) for a in system.positive_roots},
            "q_vectors": {str(a): _mat_json(q_vector(a, n)) for a in system.positive_roots},
        },
        "parabolic": {},
        "census": [],
        "weyl": [_mat_json(w) for w in weyl_group(n)],
        "m_group": [_mat_json(m) for m in m_group(n)],
    }
    from itertools import combinations

    simple = system.simple_roots
    for size in range(len(simple) + 1):
        for theta in combinations(simple, size):
            data = parabolic_data(list(theta), n)
            key = "{" + ",".join(str(a) for a in theta) + "}"
            report["parabolic"][key] = {
                "n_plus_of_theta": [_mat_json(B) for B in data.n_plus_of_theta],
                "n_minus_of_theta": [_mat_json(B) for B in data.n_minus_of_theta],
                "n_plus_theta": [_mat_json(B) for B in data.n_plus_theta],
                "n_minus_theta": [_mat_json(B) for B in data.n_minus_theta],
                "a_of_theta": [_mat_json(B) for B in data.a_of_theta],
                "a_theta": [_mat_json(B) for B in data.a_theta],
                "m_theta_k_basis": [_mat_json(B) for B in data.m_theta_k_basis],
                "m_theta_k_components": [_mat_json(B) for B in data.m_theta_k_components],
                "dims": data.dims,
                "dim_G_mod_P_theta_K": data.dim_G_mod_P_theta_K,
            }
    for entry in orbit_census(n):
        report["census"].append(
            {
                "theta": list(entry.theta),
                "multiplicity": entry.multiplicity,
                "orbit_dim": entry.orbit_dim,
                "codim": entry.codim,
            }
        )
    return report

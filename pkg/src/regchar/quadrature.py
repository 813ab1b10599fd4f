"""Gauss-Legendre panel quadrature with deterministic pairwise summation.

All integrals in the library go through these helpers so that results are
reproducible bit-for-bit: nodes are laid out panel-major in axis order and
sums are always reduced pairwise in that fixed order, which makes the result
independent of any later chunking of the evaluation loop.
"""

import numpy as np


def gauss_legendre_rule(order):
    """Nodes and weights of the `order`-point rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel_rule(a, b, n_panels, order):
    """Composite Gauss-Legendre rule on [a, b].

    Returns flat (nodes, weights) arrays of length n_panels * order, ordered
    panel by panel from a to b.
    """
    if not b > a:
        raise ValueError(f"empty interval [{a}, {b}]")
    x, w = gauss_legendre_rule(order)
    edges = np.linspace(a, b, n_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def graded_panel_rule(a, b, levels, order, ratio=0.5, sub_panels=4):
    """Panels on [a, b] geometrically refined toward the endpoint a.

    Dyadic breakpoints a + (b-a)*ratio^k for k = 0..levels, each level split
    into `sub_panels` uniform panels; used for integrands with limited
    smoothness at a (e.g. |t|^sigma factors at t = 0).
    """
    if not b > a:
        raise ValueError(f"empty interval [{a}, {b}]")
    pts = [a + (b - a) * ratio**k for k in range(levels + 1)]
    pts.append(a)
    pts = np.array(sorted(set(pts)))
    x, w = gauss_legendre_rule(order)
    nodes, weights = [], []
    for lo, hi in zip(pts[:-1], pts[1:]):
        edges = np.linspace(lo, hi, sub_panels + 1)
        for slo, shi in zip(edges[:-1], edges[1:]):
            half, mid = 0.5 * (shi - slo), 0.5 * (shi + slo)
            nodes.append(mid + half * x)
            weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def pairwise_sum(values):
    """Deterministic pairwise reduction of a 1-D array.

    The array is padded with zeros to a power of two and halved repeatedly,
    so the summation tree depends only on the element order.
    """
    v = np.asarray(values, dtype=np.complex128 if np.iscomplexobj(values) else np.float64).ravel()
    n = v.size
    if n == 0:
        return 0.0
    size = 1 << (n - 1).bit_length()
    if size != n:
        v = np.concatenate([v, np.zeros(size - n, dtype=v.dtype)])
    while v.size > 1:
        v = v[0::2] + v[1::2]
    out = v[0]
    return out if np.iscomplexobj(out) else float(out)


def integrate(values, weights):
    """Weighted pairwise sum; `values` and `weights` must be flat and aligned."""
    values = np.asarray(values)
    weights = np.asarray(weights)
    if values.shape != weights.shape:
        raise ValueError("values and weights misaligned")
    return pairwise_sum(values * weights)


class TensorGrid:
    """Tensor product of 1-D panel rules.

    Axis node/weight arrays are kept separately; `points()` materializes the
    full grid in C order (first axis slowest), matching `integrate`.
    """

    def __init__(self, axes):
        # axes: list of (nodes, weights) pairs
        self.axis_nodes = [np.asarray(n) for n, _ in axes]
        self.axis_weights = [np.asarray(w) for _, w in axes]
        self.shape = tuple(n.size for n in self.axis_nodes)

    @property
    def size(self):
        return int(np.prod(self.shape))

    def points(self):
        """(size, ndim) array of grid points in C order."""
        mesh = np.meshgrid(*self.axis_nodes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def weights(self):
        """Flat array of product weights aligned with points()."""
        w = self.axis_weights[0]
        for wi in self.axis_weights[1:]:
            w = np.multiply.outer(w, wi)
        return w.ravel()

    def integrate(self, values):
        return integrate(np.asarray(values).ravel(), self.weights())

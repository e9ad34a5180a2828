"""Orthonormal polynomial bases: univariate recurrences and tensor products.

Two univariate families are supported, each orthonormal under the probability
density of its standardized marginal:

- ``"hermite"``: probabilists' Hermite polynomials against the standard normal
  density.  Normalization is folded into the three-term recurrence
  ``psi_{n+1} = (x psi_n - sqrt(n) psi_{n-1}) / sqrt(n+1)`` so that no
  factorials are ever formed (stable up to high degree).
- ``"legendre"``: Legendre polynomials against the density 1/2 on [-1, 1],
  i.e. the classical P_n scaled by sqrt(2n+1).

Both recurrences share the orthonormal form ``b_{n+1} psi_{n+1} = x psi_n -
b_n psi_{n-1}`` with family-specific off-diagonal coefficients b_n; the same
coefficients build the Jacobi matrices for Gauss rules.  Differentiating the
recurrence gives values and derivatives jointly.

Multivariate basis functions are tensor products over a total-degree
multi-index set: all exponent tuples with |alpha|_1 <= p, ordered by total
degree and lexicographically (ascending, leftmost dimension most significant)
within each degree.  The first index is always the zero tuple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FAMILIES = ("hermite", "legendre")

#: hard cap on basis size; larger requests are almost certainly mistakes
MAX_INDEX_SET_SIZE = 2_000_000


def recurrence_offdiag(family, n):
    """Off-diagonal coefficient b_n of the orthonormal three-term recurrence.

    Also the n-th sub/super-diagonal entry of the Jacobi matrix used for
    Gauss quadrature.
    """
    if n < 1:
        raise ValueError(f"recurrence coefficient index must be >= 1, got {n}")
    if family == "hermite":
        return math.sqrt(n)
    if family == "legendre":
        return n / math.sqrt(4.0 * n * n - 1.0)
    raise ValueError(f"unknown polynomial family {family!r}")


def univariate_table(family, degree, x):
    """Values and derivatives of all orthonormal polynomials up to ``degree``.

    Parameters
    ----------
    family : str
        "hermite" or "legendre".
    degree : int
        Highest polynomial degree to evaluate.
    x : array_like, shape (n,)
        Evaluation points in the standard domain.

    Returns
    -------
    values, derivs : ndarray, shape (n, degree + 1)
        ``values[:, k]`` is psi_k(x), ``derivs[:, k]`` is psi_k'(x).
    """
    if degree < 0:
        raise ValueError(f"polynomial degree must be >= 0, got {degree}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n_pts = x.shape[0]
    values = np.empty((n_pts, degree + 1))
    derivs = np.empty((n_pts, degree + 1))
    values[:, 0] = 1.0
    derivs[:, 0] = 0.0
    if degree == 0:
        return values, derivs
    b_next = recurrence_offdiag(family, 1)
    values[:, 1] = x / b_next
    derivs[:, 1] = 1.0 / b_next
    for n in range(1, degree):
        b_n = b_next
        b_next = recurrence_offdiag(family, n + 1)
        values[:, n + 1] = (x * values[:, n] - b_n * values[:, n - 1]) / b_next
        derivs[:, n + 1] = (
            values[:, n] + x * derivs[:, n] - b_n * derivs[:, n - 1]
        ) / b_next
    return values, derivs


def univariate_eval(family, degree, x):
    """Evaluate one orthonormal polynomial and its derivative at a scalar x."""
    values, derivs = univariate_table(family, degree, [x])
    return float(values[0, degree]), float(derivs[0, degree])


def _compositions(total, parts):
    """All tuples of ``parts`` non-negative ints summing to ``total``, ascending lex."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


@dataclass(frozen=True)
class MultiIndexSet:
    """Total-degree exponent tuples: all alpha with |alpha|_1 <= p.

    ``indices`` has shape (P + 1, m) with P + 1 = (p + m)! / (p! m!), ordered
    by total degree then ascending lexicographically; row 0 is the zero tuple.
    """

    m: int
    p: int
    indices: np.ndarray

    def __len__(self):
        return self.indices.shape[0]

    @property
    def total_degrees(self):
        return self.indices.sum(axis=1)


def build_index_set(m, p):
    """Construct the total-degree multi-index set for m dimensions, order p."""
    if m < 1:
        raise ValueError(f"dimension must be >= 1, got {m}")
    if p < 0:
        raise ValueError(f"chaos order must be >= 0, got {p}")
    count = math.comb(p + m, m)
    if count > MAX_INDEX_SET_SIZE:
        raise ValueError(
            f"index set would hold {count} terms (m={m}, p={p}); "
            f"the supported maximum is {MAX_INDEX_SET_SIZE}"
        )
    rows = []
    for degree in range(p + 1):
        rows.extend(_compositions(degree, m))
    indices = np.array(rows, dtype=np.int64).reshape(count, m)
    return MultiIndexSet(m=m, p=p, indices=indices)


class ChaosBasis:
    """Multivariate orthonormal basis bound to a stochastic space.

    The family per dimension follows the marginal (Hermite for Gaussian,
    Legendre for uniform).  Instances are immutable; evaluation and gradient
    are pure functions, safe for data-parallel use over sample points.
    """

    def __init__(self, space, order):
        self.space = space
        self.order = int(order)
        self.index_set = build_index_set(space.m, self.order)
        self.families = space.families

    @property
    def m(self):
        return self.space.m

    @property
    def n_terms(self):
        """Number of retained basis functions, (p + m)! / (p! m!)."""
        return len(self.index_set)

    def __repr__(self):
        return f"ChaosBasis(m={self.m}, order={self.order}, n_terms={self.n_terms})"

    def _tables(self, points, with_derivs):
        values = []
        derivs = []
        for k, family in enumerate(self.families):
            val, der = univariate_table(family, self.order, points[:, k])
            values.append(val)
            derivs.append(der if with_derivs else None)
        return values, derivs

    def _as_batch(self, points):
        points = np.asarray(points, dtype=float)
        single = points.ndim == 1
        if single:
            points = points[None, :]
        if points.shape[1] != self.m:
            raise ValueError(
                f"points have dimension {points.shape[1]}, basis expects {self.m}"
            )
        return points, single

    def eval(self, points):
        """Evaluate all basis functions.

        Parameters
        ----------
        points : array_like, shape (n, m) or (m,)
            Standardized coordinates.

        Returns
        -------
        ndarray, shape (n, P + 1) or (P + 1,)
            Tensor-product values; column 0 is identically 1.
        """
        points, single = self._as_batch(points)
        tables, _ = self._tables(points, with_derivs=False)
        idx = self.index_set.indices
        out = tables[0][:, idx[:, 0]].copy()
        for k in range(1, self.m):
            out *= tables[k][:, idx[:, k]]
        return out[0] if single else out

    def grad(self, points):
        """Gradient of every basis function w.r.t. the standardized coordinates.

        Returns shape (n, m, P + 1), or (m, P + 1) for a single point; entry
        (k, j) is the partial derivative of basis function j along dimension k.
        """
        points, single = self._as_batch(points)
        tables, dtables = self._tables(points, with_derivs=True)
        idx = self.index_set.indices
        n_pts = points.shape[0]
        cols = [tables[k][:, idx[:, k]] for k in range(self.m)]
        dcols = [dtables[k][:, idx[:, k]] for k in range(self.m)]
        # prefix[k] = prod_{l < k} cols[l], suffix[k] = prod_{l > k} cols[l]
        prefix = np.ones((n_pts, len(idx)))
        out = np.empty((n_pts, self.m, len(idx)))
        for k in range(self.m):
            out[:, k, :] = prefix * dcols[k]
            if k < self.m - 1:
                prefix = prefix * cols[k]
        suffix = np.ones((n_pts, len(idx)))
        for k in range(self.m - 1, -1, -1):
            out[:, k, :] *= suffix
            if k > 0:
                suffix = suffix * cols[k]
        return out[0] if single else out

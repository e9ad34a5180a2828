"""Input probability spaces: independent marginals, standardization, sampling.

All regression and quadrature machinery works in *standardized* coordinates:
a Gaussian marginal maps to N(0, 1), a uniform marginal to U(-1, 1).  Physical
coordinates appear only inside models, which call :meth:`StochasticSpace.
destandardize` before evaluating the underlying problem.

Sampling uses numpy's ``default_rng`` (PCG64).  Gaussian draws use numpy's
ziggurat implementation of ``standard_normal``; uniform draws come straight
from the PCG64 stream.  Pools generated with the same seed are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Gaussian:
    """Normal marginal N(mean, std**2); standardized variable is N(0, 1)."""

    mean: float = 0.0
    std: float = 1.0

    #: polynomial family orthonormal under the standardized density
    family = "hermite"
    #: support of the standardized variable
    standard_domain = (-np.inf, np.inf)

    def __post_init__(self):
        if not self.std > 0.0:
            raise ValueError(f"Gaussian marginal needs std > 0, got {self.std}")

    @property
    def scale(self):
        """dx/dxi of the affine map from standardized to physical."""
        return self.std

    def standardize(self, x):
        return (np.asarray(x, dtype=float) - self.mean) / self.std

    def destandardize(self, xi):
        return self.mean + self.std * np.asarray(xi, dtype=float)

    def standard_pdf(self, xi):
        xi = np.asarray(xi, dtype=float)
        return _INV_SQRT_2PI * np.exp(-0.5 * xi * xi)

    def sample_standard(self, rng, q):
        return rng.standard_normal(q)


@dataclass(frozen=True)
class Uniform:
    """Uniform marginal on [lower, upper]; standardized variable is U(-1, 1)."""

    lower: float = -1.0
    upper: float = 1.0

    family = "legendre"
    standard_domain = (-1.0, 1.0)

    def __post_init__(self):
        if not self.upper > self.lower:
            raise ValueError(
                f"Uniform marginal needs upper > lower, got [{self.lower}, {self.upper}]"
            )

    @property
    def scale(self):
        return 0.5 * (self.upper - self.lower)

    def standardize(self, x):
        x = np.asarray(x, dtype=float)
        return 2.0 * (x - self.lower) / (self.upper - self.lower) - 1.0

    def destandardize(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.lower + 0.5 * (xi + 1.0) * (self.upper - self.lower)

    def standard_pdf(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.where(np.abs(xi) <= 1.0, 0.5, 0.0)

    def sample_standard(self, rng, q):
        return rng.uniform(-1.0, 1.0, q)


Marginal = Gaussian | Uniform


@dataclass(frozen=True)
class SamplePool:
    """Candidate sample points in standardized coordinates.

    ``points`` has shape (q, m); every row lies in the standard domain of its
    marginal (all of R for Gaussian, [-1, 1] for uniform).  Pools regenerate
    bit-identically from the stored seed.
    """

    points: np.ndarray
    seed: int

    @property
    def q(self):
        return self.points.shape[0]

    @property
    def m(self):
        return self.points.shape[1]


class StochasticSpace:
    """Ordered collection of independent marginals.

    The joint PDF factorizes over marginals by construction.  Instances are
    immutable and safe to share across threads.
    """

    def __init__(self, marginals):
        marginals = tuple(marginals)
        if len(marginals) == 0:
            raise ValueError("a stochastic space needs at least one marginal")
        for marg in marginals:
            if not isinstance(marg, (Gaussian, Uniform)):
                raise ValueError(f"unsupported marginal type: {type(marg).__name__}")
        self._marginals = marginals
        self._scales = np.array([marg.scale for marg in marginals])

    @property
    def marginals(self):
        return self._marginals

    @property
    def m(self):
        """Number of stochastic dimensions."""
        return len(self._marginals)

    @property
    def families(self):
        """Per-dimension polynomial family ('hermite' or 'legendre')."""
        return tuple(marg.family for marg in self._marginals)

    @property
    def scales(self):
        """Per-dimension dx/dxi of the standardization map (chain-rule factors)."""
        return self._scales

    def __repr__(self):
        inner = ", ".join(repr(m) for m in self._marginals)
        return f"StochasticSpace([{inner}])"

    def _check_shape(self, arr, name):
        arr = np.asarray(arr, dtype=float)
        if arr.ndim == 1:
            if arr.shape[0] != self.m:
                raise ValueError(
                    f"{name} has length {arr.shape[0]}, expected {self.m}"
                )
        elif arr.ndim == 2:
            if arr.shape[1] != self.m:
                raise ValueError(
                    f"{name} has {arr.shape[1]} columns, expected {self.m}"
                )
        else:
            raise ValueError(f"{name} must be 1- or 2-dimensional")
        return arr

    def standardize(self, x):
        """Map physical coordinates to standardized ones (vectorized over rows)."""
        x = self._check_shape(x, "physical point")
        out = np.empty_like(x)
        for k, marg in enumerate(self._marginals):
            out[..., k] = marg.standardize(x[..., k])
        return out

    def destandardize(self, xi):
        """Map standardized coordinates back to physical ones."""
        xi = self._check_shape(xi, "standard point")
        out = np.empty_like(xi)
        for k, marg in enumerate(self._marginals):
            out[..., k] = marg.destandardize(xi[..., k])
        return out

    def joint_pdf(self, xi):
        """Product of the standardized marginal densities at ``xi``."""
        xi = self._check_shape(xi, "standard point")
        dens = np.ones(xi.shape[:-1] if xi.ndim > 1 else ())
        for k, marg in enumerate(self._marginals):
            dens = dens * marg.standard_pdf(xi[..., k])
        return float(dens) if np.ndim(dens) == 0 else dens

    def sample_pool(self, q, seed):
        """Draw q independent standardized points with a fixed seed.

        Columns are drawn marginal by marginal from a single PCG64 stream, so
        the pool depends only on (marginals, q, seed).
        """
        if q < 1:
            raise ValueError(f"pool size must be >= 1, got {q}")
        rng = np.random.default_rng(seed)
        points = np.empty((q, self.m))
        for k, marg in enumerate(self._marginals):
            points[:, k] = marg.sample_standard(rng, q)
        return SamplePool(points=points, seed=int(seed))

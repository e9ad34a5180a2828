"""The QoI evaluation contract and the built-in analytic model problems.

A model binds a stochastic space to a scalar quantity of interest.  It is
evaluated at *standardized* coordinates; internally it maps them to physical
ones, and gradients are returned already chain-ruled back to standardized
coordinates (dM/dxi_k = dM/dx_k * dx_k/dxi_k).

Every evaluation is stateless from the caller's view, so evaluations at
distinct points may run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedModelError
from .spaces import StochasticSpace, Uniform


@dataclass
class ModelEvaluation:
    """One model evaluation: QoI value, gradient, and its evaluation cost.

    ``cost_units`` is 1 for a value-only evaluation and 2 when a gradient was
    produced as well (one direct plus one adjoint solve).
    """

    value: float
    gradient: np.ndarray
    cost_units: int


class Model:
    """Base QoI contract: value M(xi) and gradient dM/dxi per sample point."""

    name = "model"
    has_gradient = False

    def __init__(self, space):
        self.space = space

    @property
    def dim(self):
        return self.space.m

    def value(self, xi):
        raise NotImplementedError

    def values(self, points):
        """Batched evaluation; subclasses override with vectorized forms."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.array([self.value(xi) for xi in points])

    def value_and_grad(self, xi):
        raise UnsupportedModelError(f"model {self.name!r} provides no gradient")


class AnalyticModel(Model):
    """Model defined by closed-form value and gradient in physical coordinates."""

    has_gradient = True

    def _phys_value(self, x):
        raise NotImplementedError

    def _phys_grad(self, x):
        raise NotImplementedError

    def value(self, xi):
        x = self.space.destandardize(np.asarray(xi, dtype=float))
        return float(self._phys_value(x))

    def values(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        x = self.space.destandardize(points)
        return np.asarray(self._phys_value_batch(x), dtype=float)

    def _phys_value_batch(self, x):
        return np.array([self._phys_value(row) for row in x])

    def value_and_grad(self, xi):
        xi = np.asarray(xi, dtype=float)
        x = self.space.destandardize(xi)
        grad = np.asarray(self._phys_grad(x), dtype=float) * self.space.scales
        return ModelEvaluation(
            value=float(self._phys_value(x)), gradient=grad, cost_units=2
        )


class ExponentialDecayModel(AnalyticModel):
    """u(t; k) = exp(-k t) with a single uncertain decay rate k ~ U(0, 1).

    The QoI is the solution of du/dt = -k u, u(0) = 1 at a fixed time t; its
    sensitivity is du/dk = -t exp(-k t).
    """

    name = "ode"

    def __init__(self, t):
        if t < 0:
            raise ValueError(f"time must be >= 0, got {t}")
        super().__init__(StochasticSpace([Uniform(0.0, 1.0)]))
        self.t = float(t)

    def _phys_value(self, x):
        return math.exp(-x[0] * self.t)

    def _phys_value_batch(self, x):
        return np.exp(-x[:, 0] * self.t)

    def _phys_grad(self, x):
        return np.array([-self.t * math.exp(-x[0] * self.t)])


def ode_model(t):
    """Stochastic linear-decay benchmark at time t (m = 1, k ~ U(0, 1))."""
    return ExponentialDecayModel(t)


def ode_mean(t):
    """Closed-form mean of exp(-k t) over k ~ U(0, 1)."""
    if t == 0.0:
        return 1.0
    return (1.0 - math.exp(-t)) / t


def ode_variance(t):
    """Closed-form variance of exp(-k t) over k ~ U(0, 1)."""
    if t == 0.0:
        return 0.0
    return (1.0 - math.exp(-2.0 * t)) / (2.0 * t) - ode_mean(t) ** 2


class IshigamiModel(AnalyticModel):
    """Y = sin(X1) + alpha sin^2(X2) + beta X3^4 sin(X1), X_i ~ U(-pi, pi).

    Strongly nonlinear, non-monotonic, with an exact variance decomposition;
    the standard global-sensitivity benchmark.
    """

    name = "ishigami"

    def __init__(self, alpha=7.0, beta=0.1):
        super().__init__(
            StochasticSpace([Uniform(-math.pi, math.pi)] * 3)
        )
        self.alpha = float(alpha)
        self.beta = float(beta)

    def _phys_value(self, x):
        return (
            math.sin(x[0])
            + self.alpha * math.sin(x[1]) ** 2
            + self.beta * x[2] ** 4 * math.sin(x[0])
        )

    def _phys_value_batch(self, x):
        return (
            np.sin(x[:, 0])
            + self.alpha * np.sin(x[:, 1]) ** 2
            + self.beta * x[:, 2] ** 4 * np.sin(x[:, 0])
        )

    def _phys_grad(self, x):
        return np.array(
            [
                math.cos(x[0]) * (1.0 + self.beta * x[2] ** 4),
                2.0 * self.alpha * math.sin(x[1]) * math.cos(x[1]),
                4.0 * self.beta * x[2] ** 3 * math.sin(x[0]),
            ]
        )


def ishigami_model(alpha=7.0, beta=0.1):
    """Ishigami benchmark (m = 3, X_i ~ U(-pi, pi))."""
    return IshigamiModel(alpha=alpha, beta=beta)


def ishigami_mean(alpha=7.0, beta=0.1):
    """Exact mean alpha / 2."""
    return alpha / 2.0


def ishigami_variance(alpha=7.0, beta=0.1):
    """Exact variance a^2/8 + b pi^4/5 + b^2 pi^8/18 + 1/2."""
    pi4 = math.pi**4
    pi8 = pi4 * pi4
    return alpha**2 / 8.0 + beta * pi4 / 5.0 + beta**2 * pi8 / 18.0 + 0.5


def ishigami_sobol_total(alpha=7.0, beta=0.1):
    """Exact total Sobol indices from the closed-form variance decomposition."""
    pi4 = math.pi**4
    pi8 = pi4 * pi4
    d1 = beta * pi4 / 5.0 + beta**2 * pi8 / 50.0 + 0.5
    d2 = alpha**2 / 8.0
    d13 = 8.0 * beta**2 * pi8 / 225.0
    total = d1 + d2 + d13
    return np.array([(d1 + d13) / total, d2 / total, d13 / total])

"""Weighted least-squares chaos fits, plain and sensitivity-enhanced.

The plain fit solves ``min_c || W^(1/2) (Q - psi c) ||_2`` from QoI values at
selected points.  The sensitivity-enhanced fit additionally stacks, for every
dimension k, one block of gradient equations ``dQ/dxi_k = (dpsi/dxi_k) c``,
giving 1 + m equations per sample point at the cost of two model evaluations
(one direct, one adjoint).  With gradients, only ``ceil((P + 1) / (m + 1))``
points are needed to reach P + 1 equations.

Both paths solve the rectangular weighted system by orthogonal factorization
(SVD-based least squares); forming the normal equations would square the
condition number.  Gradient rows reuse the weight of their sample point, so
the block weight matrix repeats the point weights identically across all
1 + m blocks.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InsufficientSamplesError, RankDeficientError, UnsupportedModelError
from .orthopoly import ChaosBasis
from .parallel import evaluate_with_gradients
from .spaces import Gaussian, StochasticSpace, Uniform

#: relative singular-value cutoff used to declare a regression rank deficient
_RCOND = 1e-12


@dataclass
class FitReport:
    """Bookkeeping attached to every fitted surrogate.

    ``rank`` is the numerical rank of the weighted design matrix; it equals
    the coefficient count except for rank-deficient sensitivity-enhanced fits
    (see :func:`fit_segpc`).
    """

    method: str
    n_points: int
    n_equations: int
    residual_norm: float
    cond_number: float
    evaluation_count: int
    rank: int = -1


@dataclass(frozen=True)
class AugmentedSystem:
    """Value and gradient equations stacked in block form.

    ``g`` has length (1 + m) q: first the q QoI values, then for each
    dimension k a block of q derivative values.  ``phi`` stacks the basis
    matrix and the m basis-gradient matrices the same way; ``w_sqrt`` repeats
    the point weights across all blocks.
    """

    g: np.ndarray
    phi: np.ndarray
    w_sqrt: np.ndarray


class PceSurrogate:
    """Fitted spectral expansion bound to a basis and its space.

    Immutable once constructed; evaluation and differentiation are pure.
    """

    def __init__(self, coefficients, basis, fit_report):
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != (basis.n_terms,):
            raise ValueError(
                f"expected {basis.n_terms} coefficients, got {coefficients.shape}"
            )
        self.coefficients = coefficients
        self.basis = basis
        self.fit_report = fit_report

    @property
    def space(self):
        return self.basis.space

    @property
    def order(self):
        return self.basis.order

    def __repr__(self):
        return (
            f"PceSurrogate(m={self.basis.m}, order={self.order}, "
            f"method={self.fit_report.method!r})"
        )

    def eval(self, points):
        """Evaluate the surrogate at standardized points."""
        vals = self.basis.eval(points)
        return vals @ self.coefficients

    def grad(self, points):
        """Surrogate gradient w.r.t. standardized coordinates."""
        grads = self.basis.grad(points)
        return grads @ self.coefficients

    def to_dict(self):
        marginals = []
        for marg in self.space.marginals:
            if isinstance(marg, Gaussian):
                marginals.append({"kind": "gaussian", "mean": marg.mean, "std": marg.std})
            else:
                marginals.append(
                    {"kind": "uniform", "lower": marg.lower, "upper": marg.upper}
                )
        return {
            "schema": "segpc/surrogate-v1",
            "dim": self.basis.m,
            "order": self.order,
            "families": list(self.basis.families),
            "marginals": marginals,
            "coefficients": self.coefficients.tolist(),
            "fit_report": asdict(self.fit_report),
        }

    @classmethod
    def from_dict(cls, data):
        marginals = []
        for entry in data["marginals"]:
            if entry["kind"] == "gaussian":
                marginals.append(Gaussian(mean=entry["mean"], std=entry["std"]))
            elif entry["kind"] == "uniform":
                marginals.append(Uniform(lower=entry["lower"], upper=entry["upper"]))
            else:
                raise ValueError(f"unknown marginal kind {entry['kind']!r}")
        basis = ChaosBasis(StochasticSpace(marginals), data["order"])
        report = FitReport(**data["fit_report"])
        return cls(np.asarray(data["coefficients"]), basis, report)

    def save_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _weighted_lstsq(rows, w_sqrt, rhs, allow_rank_deficient=False):
    """Solve min ||diag(w_sqrt) (rhs - rows c)|| by orthogonal factorization.

    With ``allow_rank_deficient`` the minimum-norm solution is returned for a
    singular system (unresolved coefficient directions stay zero); otherwise
    rank deficiency raises.
    """
    design = rows * w_sqrt[:, None]
    target = rhs * w_sqrt
    cond = float(np.linalg.cond(design))
    coeff, _, rank, _ = np.linalg.lstsq(design, target, rcond=_RCOND)
    if rank < rows.shape[1] and not allow_rank_deficient:
        raise RankDeficientError(
            f"regression matrix is rank deficient (rank {rank} of "
            f"{rows.shape[1]}, condition number {cond:.3e})",
            cond_number=cond,
        )
    residual_norm = float(np.linalg.norm(design @ coeff - target))
    return coeff, residual_norm, cond, int(rank)


def fit_wlsq(basis, points, w_sqrt, values, evaluation_count=None):
    """Plain weighted least-squares fit from QoI values at sample points.

    Parameters
    ----------
    basis : ChaosBasis
    points : ndarray, shape (n, m)
        Standardized sample coordinates.
    w_sqrt : ndarray, shape (n,)
        Square-root weights per point.
    values : ndarray, shape (n,)
        QoI values at the points.
    evaluation_count : int, optional
        Model evaluations actually spent; defaults to n.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    values = np.asarray(values, dtype=float)
    w_sqrt = np.asarray(w_sqrt, dtype=float)
    n_pts = points.shape[0]
    if n_pts < basis.n_terms:
        raise InsufficientSamplesError(
            f"{n_pts} points cannot determine {basis.n_terms} coefficients"
        )
    psi = basis.eval(points)
    coeff, residual_norm, cond, rank = _weighted_lstsq(psi, w_sqrt, values)
    report = FitReport(
        method="wlsq",
        n_points=n_pts,
        n_equations=n_pts,
        residual_norm=residual_norm,
        cond_number=cond,
        evaluation_count=n_pts if evaluation_count is None else evaluation_count,
        rank=rank,
    )
    return PceSurrogate(coeff, basis, report)


def build_augmented(basis, points, w_sqrt, values, gradients):
    """Stack value and gradient equations into one block system.

    ``gradients`` holds dQoI/dxi_k per point in *standardized* coordinates
    (models apply the chain rule of the standardization map before returning
    gradients).  An empty gradient block (shape (n, 0)) degenerates to the
    plain value system.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    values = np.asarray(values, dtype=float)
    w_sqrt = np.asarray(w_sqrt, dtype=float)
    gradients = np.asarray(gradients, dtype=float)
    n_pts, m = points.shape
    if gradients.size == 0:
        gradients = gradients.reshape(n_pts, 0)
    if gradients.shape[0] != n_pts:
        raise ValueError("one gradient row per point is required")
    n_grad_dims = gradients.shape[1]
    if n_grad_dims not in (0, m):
        raise ValueError(
            f"gradients have {n_grad_dims} components, expected {m} (or none)"
        )
    psi = basis.eval(points)
    blocks = [psi]
    rhs = [values]
    if n_grad_dims:
        dpsi = basis.grad(points)
        for k in range(m):
            blocks.append(dpsi[:, k, :])
            rhs.append(gradients[:, k])
    phi = np.vstack(blocks)
    g = np.concatenate(rhs)
    w_block = np.tile(w_sqrt, 1 + n_grad_dims)
    return AugmentedSystem(g=g, phi=phi, w_sqrt=w_block)


def segpc_point_count(n_terms, m):
    """Sample points needed by the gradient-augmented fit: ceil((P+1)/(m+1))."""
    return math.ceil(n_terms / (m + 1))


def fit_segpc(basis, plan, model, n_points=None, workers=1):
    """Sensitivity-enhanced fit at the top-ranked design points.

    Evaluates the model's value and gradient at the first
    ``ceil((P + 1) / (m + 1))`` points of ``plan`` (or ``n_points`` if given),
    assembles the block system and solves the weighted least-squares problem.
    Each point costs two evaluations (direct + adjoint).

    At order 2 and above, fewer than m + 1 points cannot resolve polynomial
    directions orthogonal to the points' affine span, so the block system can
    be structurally rank deficient even with enough equations.  The solve then
    returns the minimum-norm solution (unresolvable coefficients stay zero)
    and records the rank in the fit report rather than failing.
    """
    if not getattr(model, "has_gradient", False):
        raise UnsupportedModelError(
            f"model {getattr(model, 'name', model)!r} provides no gradient; "
            "sensitivity-enhanced fitting needs one"
        )
    m = basis.m
    n_use = segpc_point_count(basis.n_terms, m) if n_points is None else int(n_points)
    if plan.n_selected < n_use:
        raise ValueError(
            f"plan provides {plan.n_selected} ranked points, fit needs {n_use}"
        )
    points = plan.points[:n_use]
    w_sqrt = plan.w_sqrt[:n_use]
    n_equations = (1 + m) * n_use
    if n_equations < basis.n_terms:
        raise InsufficientSamplesError(
            f"{n_use} points give {n_equations} equations, fewer than "
            f"{basis.n_terms} coefficients"
        )
    values, gradients = evaluate_with_gradients(model, points, workers=workers)
    system = build_augmented(basis, points, w_sqrt, values, gradients)
    coeff, residual_norm, cond, rank = _weighted_lstsq(
        system.phi, system.w_sqrt, system.g, allow_rank_deficient=True
    )
    report = FitReport(
        method="segpc",
        n_points=n_use,
        n_equations=n_equations,
        residual_norm=residual_norm,
        cond_number=cond,
        evaluation_count=2 * n_use,
        rank=rank,
    )
    return PceSurrogate(coeff, basis, report)

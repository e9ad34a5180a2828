import math

import numpy as np
import pytest

from segpc import (
    ChaosBasis,
    Gaussian,
    Model,
    ModelEvaluation,
    StochasticSpace,
    Uniform,
    build_augmented,
    build_measurement,
    coherence_weights,
    fit_segpc,
    fit_wlsq,
    moments_from_coefficients,
    ode_mean,
    ode_model,
    qr_select,
    segpc_point_count,
)
from segpc.errors import InsufficientSamplesError, UnsupportedModelError


def make_plan(space, order, q=2000, seed=0):
    basis = ChaosBasis(space, order)
    pool = space.sample_pool(q, seed=seed)
    weights = coherence_weights(space, pool.points)
    meas = build_measurement(basis, pool, weights)
    return basis, qr_select(meas, basis.n_terms)


class PolynomialModel(Model):
    """QoI equal to one basis function; exact gradients from the basis."""

    name = "basis-function"
    has_gradient = True

    def __init__(self, space, basis, coeffs):
        super().__init__(space)
        self.basis = basis
        self.coeffs = np.asarray(coeffs, dtype=float)

    def value(self, xi):
        return float(self.basis.eval(xi) @ self.coeffs)

    def values(self, points):
        return self.basis.eval(np.atleast_2d(points)) @ self.coeffs

    def value_and_grad(self, xi):
        grad = self.basis.grad(xi) @ self.coeffs
        return ModelEvaluation(self.value(xi), grad, 2)


def test_fit_wlsq_constant():
    space = StochasticSpace([Gaussian(), Gaussian()])
    basis, plan = make_plan(space, 2)
    values = np.ones(plan.n_selected)
    sur = fit_wlsq(basis, plan.points, plan.w_sqrt, values)
    want = np.zeros(basis.n_terms)
    want[0] = 1.0
    assert np.max(np.abs(sur.coefficients - want)) < 1e-12


def test_fit_wlsq_recovers_basis_function():
    space = StochasticSpace([Gaussian(), Uniform()])
    basis, plan = make_plan(space, 3)
    target = basis.eval(plan.points)[:, 3]
    sur = fit_wlsq(basis, plan.points, plan.w_sqrt, target)
    want = np.zeros(basis.n_terms)
    want[3] = 1.0
    assert np.max(np.abs(sur.coefficients - want)) < 1e-10


def test_fit_wlsq_underdetermined():
    space = StochasticSpace([Gaussian()])
    basis = ChaosBasis(space, 4)
    pts = space.sample_pool(3, seed=0).points
    with pytest.raises(InsufficientSamplesError):
        fit_wlsq(basis, pts, np.ones(3), np.zeros(3))


def test_fit_wlsq_rank_deficient_raises():
    from segpc.errors import RankDeficientError

    space = StochasticSpace([Gaussian()])
    basis = ChaosBasis(space, 3)
    pts = np.tile([[0.5]], (6, 1))  # all points identical
    with pytest.raises(RankDeficientError) as err:
        fit_wlsq(basis, pts, np.ones(6), np.ones(6))
    assert err.value.cond_number is not None


def test_fit_wlsq_ode_mean():
    model = ode_model(1.0)
    basis, plan = make_plan(model.space, 6, q=10000, seed=42)
    values = model.values(plan.points)
    sur = fit_wlsq(basis, plan.points, plan.w_sqrt, values)
    mean, _ = moments_from_coefficients(sur)
    assert abs(mean - ode_mean(1.0)) < 1e-4


def test_residual_orthogonal_to_design():
    # least-squares optimality: design^T residual = 0
    space = StochasticSpace([Gaussian(), Gaussian()])
    basis, plan = make_plan(space, 2)
    rng = np.random.default_rng(0)
    values = rng.standard_normal(plan.n_selected)
    # oversampled: reuse pool points beyond the plan
    pts = space.sample_pool(40, seed=3).points
    w = coherence_weights(space, pts)
    vals = rng.standard_normal(40)
    sur = fit_wlsq(basis, pts, w, vals)
    design = basis.eval(pts) * w[:, None]
    residual = design @ sur.coefficients - w * vals
    assert np.max(np.abs(design.T @ residual)) < 1e-10
    # the reported residual norm is the achieved weighted misfit
    assert sur.fit_report.residual_norm == pytest.approx(
        float(np.linalg.norm(residual)), rel=1e-12
    )


def test_build_augmented_block_layout():
    space = StochasticSpace([Uniform()])
    basis = ChaosBasis(space, 3)
    pts = space.sample_pool(4, seed=1).points
    w = np.linspace(0.5, 1.0, 4)
    vals = np.arange(4.0)
    grads = np.arange(4.0)[:, None] + 10.0
    system = build_augmented(basis, pts, w, vals, grads)
    assert system.phi.shape == (8, basis.n_terms)
    assert np.array_equal(system.g[:4], vals)
    assert np.array_equal(system.g[4:], grads[:, 0])
    assert np.array_equal(system.w_sqrt, np.tile(w, 2))
    assert np.allclose(system.phi[:4], basis.eval(pts))
    assert np.allclose(system.phi[4:], basis.grad(pts)[:, 0, :])


def test_build_augmented_empty_gradients_degenerates():
    space = StochasticSpace([Gaussian(), Gaussian()])
    basis = ChaosBasis(space, 2)
    pts = space.sample_pool(7, seed=2).points
    w = np.ones(7)
    vals = np.arange(7.0)
    system = build_augmented(basis, pts, w, vals, np.empty((7, 0)))
    assert system.phi.shape == (7, basis.n_terms)
    assert np.array_equal(system.g, vals)


def test_build_augmented_gradient_mismatch():
    space = StochasticSpace([Gaussian(), Gaussian()])
    basis = ChaosBasis(space, 2)
    pts = space.sample_pool(3, seed=2).points
    with pytest.raises(ValueError):
        build_augmented(basis, pts, np.ones(3), np.zeros(3), np.zeros((3, 1)))


def test_segpc_point_counts():
    assert segpc_point_count(7, 1) == 4       # m=1, p=6
    assert segpc_point_count(10, 2) == 4      # m=2, p=3 -> 12 equations
    assert segpc_point_count(2, 1) == 1       # p=1: single point
    assert segpc_point_count(861, 40) == 21   # m=40, p=2


def test_fit_segpc_exact_linear():
    # M = 2 xi1 - xi2 is exactly representable at p=1: one point suffices
    space = StochasticSpace([Gaussian(), Gaussian()])
    basis, plan = make_plan(space, 1)
    coeffs = np.array([0.0, 2.0, -1.0])
    model = PolynomialModel(space, basis, coeffs)
    sur = fit_segpc(basis, plan, model)
    assert sur.fit_report.n_points == 1
    assert sur.fit_report.evaluation_count == 2
    assert np.max(np.abs(sur.coefficients - coeffs)) < 1e-12


def test_fit_segpc_exact_recovery_full_rank():
    space = StochasticSpace([Uniform(), Uniform()])
    basis, plan = make_plan(space, 4)
    rng = np.random.default_rng(8)
    coeffs = rng.standard_normal(basis.n_terms)
    model = PolynomialModel(space, basis, coeffs)
    sur = fit_segpc(basis, plan, model, n_points=basis.n_terms)
    assert sur.fit_report.rank == basis.n_terms
    assert np.max(np.abs(sur.coefficients - coeffs)) < 1e-9


def test_fit_segpc_equivalence_with_wlsq_for_constant():
    # constant QoI with analytically zero gradients: both paths coincide
    space = StochasticSpace([Gaussian(), Uniform()])
    basis, plan = make_plan(space, 2)
    coeffs = np.zeros(basis.n_terms)
    coeffs[0] = 3.25
    model = PolynomialModel(space, basis, coeffs)
    sur_g = fit_segpc(basis, plan, model, n_points=basis.n_terms)
    values = model.values(plan.points)
    sur_w = fit_wlsq(basis, plan.points, plan.w_sqrt, values)
    assert np.max(np.abs(sur_g.coefficients - sur_w.coefficients)) < 1e-12


def test_fit_segpc_requires_gradient():
    space = StochasticSpace([Gaussian()])
    basis, plan = make_plan(space, 2)

    class NoGrad(Model):
        name = "value-only"

    with pytest.raises(UnsupportedModelError):
        fit_segpc(basis, plan, NoGrad(space))


def test_fit_segpc_plan_too_small():
    space = StochasticSpace([Gaussian()])
    basis, plan = make_plan(space, 6)
    model = PolynomialModel(space, basis, np.zeros(basis.n_terms))
    short = type(plan)(
        selected=plan.selected[:2],
        points=plan.points[:2],
        w_sqrt=plan.w_sqrt[:2],
        r_diag=plan.r_diag[:2],
        cond_number=plan.cond_number,
    )
    with pytest.raises(ValueError):
        fit_segpc(basis, short, model)


def test_fit_segpc_rank_deficient_minimum_norm():
    # p=2 with fewer than m+1 points: structural rank deficit C(m-n+2, 2)
    space = StochasticSpace([Gaussian()] * 6)
    basis, plan = make_plan(space, 2, q=5000)
    n_pts = segpc_point_count(basis.n_terms, 6)  # 4 points, 28 equations
    coeffs = np.zeros(basis.n_terms)
    coeffs[0] = 2.0
    coeffs[1] = 1.0
    model = PolynomialModel(space, basis, coeffs)
    sur = fit_segpc(basis, plan, model)
    expected_deficit = math.comb(6 - (n_pts - 1) + 1, 2)
    assert sur.fit_report.rank == basis.n_terms - expected_deficit
    # the minimum-norm solution still reproduces values and gradients at the
    # fitted points (it interpolates within the resolvable subspace)
    pts = plan.points[:n_pts]
    assert np.allclose(sur.eval(pts), model.values(pts), atol=1e-9)
    for xi in pts:
        assert np.allclose(sur.grad(xi), basis.grad(xi) @ coeffs, atol=1e-9)


def test_surrogate_eval_and_grad():
    space = StochasticSpace([Gaussian(), Uniform()])
    basis, plan = make_plan(space, 3)
    rng = np.random.default_rng(1)
    coeffs = rng.standard_normal(basis.n_terms)
    model = PolynomialModel(space, basis, coeffs)
    sur = fit_segpc(basis, plan, model, n_points=basis.n_terms)
    pts = np.column_stack([rng.standard_normal(5), rng.uniform(-1, 1, 5)])
    assert np.allclose(sur.eval(pts), model.values(pts))
    grads = sur.grad(pts)
    for i, xi in enumerate(pts):
        assert np.allclose(grads[i], basis.grad(xi) @ coeffs)


def test_surrogate_json_roundtrip(tmp_path):
    space = StochasticSpace([Gaussian(1.0, 2.0), Uniform(-3.0, 4.0)])
    basis, plan = make_plan(space, 2)
    values = np.ones(plan.n_selected)
    sur = fit_wlsq(basis, plan.points, plan.w_sqrt, values)
    path = tmp_path / "surrogate.json"
    sur.save_json(path)
    loaded = type(sur).load_json(path)
    assert np.array_equal(loaded.coefficients, sur.coefficients)
    assert loaded.basis.families == sur.basis.families
    assert loaded.order == sur.order
    pts = np.array([[0.3, -0.4], [1.2, 0.9]])
    assert np.allclose(loaded.eval(pts), sur.eval(pts))

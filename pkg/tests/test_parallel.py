import numpy as np

from segpc import ishigami_model, monte_carlo_moments
from segpc.parallel import evaluate_values, evaluate_with_gradients


def test_values_worker_invariance():
    model = ishigami_model()
    pts = model.space.sample_pool(64, seed=0).points
    serial = evaluate_values(model, pts, workers=1)
    parallel = evaluate_values(model, pts, workers=2)
    assert np.array_equal(serial, parallel)


def test_gradients_worker_invariance():
    model = ishigami_model()
    pts = model.space.sample_pool(16, seed=1).points
    v1, g1 = evaluate_with_gradients(model, pts, workers=1)
    v2, g2 = evaluate_with_gradients(model, pts, workers=2)
    assert np.array_equal(v1, v2)
    assert np.array_equal(g1, g2)


def test_monte_carlo_worker_invariance():
    model = ishigami_model()
    rep1, trace1 = monte_carlo_moments(model.space, model, 4000, seed=2, workers=1)
    rep2, trace2 = monte_carlo_moments(model.space, model, 4000, seed=2, workers=2)
    assert np.array_equal(trace1, trace2)
    assert rep1.mean == rep2.mean
    assert rep1.kurtosis == rep2.kurtosis

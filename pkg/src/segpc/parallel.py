"""Worker-pool helpers for independent model evaluations.

Model evaluations at distinct sample points are independent, so they may run
across processes.  Results are always reassembled in submission order, which
keeps every downstream quantity identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np


def _value_chunk(args):
    model, chunk = args
    return np.asarray(model.values(chunk), dtype=float)


def _grad_chunk(args):
    model, chunk = args
    vals = np.empty(chunk.shape[0])
    grads = np.empty_like(chunk)
    for i, xi in enumerate(chunk):
        ev = model.value_and_grad(xi)
        vals[i] = ev.value
        grads[i] = ev.gradient
    return vals, grads


def _split(points, workers):
    n = points.shape[0]
    n_chunks = min(n, max(workers * 4, 1))
    return [c for c in np.array_split(points, n_chunks) if c.shape[0] > 0]


def evaluate_values(model, points, workers=1):
    """Evaluate ``model.values`` over rows of ``points``, optionally in parallel."""
    points = np.asarray(points, dtype=float)
    if workers <= 1 or points.shape[0] <= 1:
        return np.asarray(model.values(points), dtype=float)
    chunks = _split(points, workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_value_chunk, [(model, c) for c in chunks]))
    return np.concatenate(parts)


def evaluate_with_gradients(model, points, workers=1):
    """Evaluate value and gradient per point; returns (values (n,), grads (n, m))."""
    points = np.asarray(points, dtype=float)
    if workers <= 1 or points.shape[0] <= 1:
        vals, grads = _grad_chunk((model, points))
        return vals, grads
    chunks = _split(points, workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_grad_chunk, [(model, c) for c in chunks]))
    vals = np.concatenate([p[0] for p in parts])
    grads = np.concatenate([p[1] for p in parts])
    return vals, grads

"""Shared builders for the test suite."""

import numpy as np

from bwflow import Graph, GraphMRF, er_sample, is_connected, mrf_from_graph


def pair_graph(w: float) -> Graph:
    """Two nodes joined by a single edge of weight w."""
    m = np.zeros((2, 2))
    m[0, 1] = m[1, 0] = float(w)
    return Graph(n=2, w=m)


def pair_mrfs(w0: float = 1.0, w1: float = 4.0, nu: float = 0.0, beta: float = 1.0):
    return (
        mrf_from_graph(pair_graph(w0), nu=nu, beta=beta),
        mrf_from_graph(pair_graph(w1), nu=nu, beta=beta),
    )


def weighted_graph(n: int, rng: np.random.Generator, lo: float = 0.2, hi: float = 1.0) -> Graph:
    """Dense positive weights; connected by construction."""
    w = rng.uniform(lo, hi, (n, n))
    w = (w + w.T) / 2.0
    np.fill_diagonal(w, 0.0)
    return Graph(n=n, w=w)


def weighted_mrf(n: int, rng: np.random.Generator, **kw) -> GraphMRF:
    return mrf_from_graph(weighted_graph(n, rng), **kw)


def connected_er(n: int, p: float, rng: np.random.Generator, classes: int = 0) -> Graph:
    """Binary connected graph, optionally with one-hot features."""
    while True:
        g = er_sample(n, p, rng)
        if is_connected(g):
            break
    if classes <= 0:
        return g
    labels = rng.integers(0, classes, n)
    x = np.zeros((n, classes))
    x[np.arange(n), labels] = 1.0
    return Graph(n=n, w=g.w, x=x, discrete=True)


def circulant_laplacian(n: int, ring: float, chord: float) -> np.ndarray:
    """Laplacian of a circulant graph (ring edges plus distance-2 chords).
    Any two of these commute, giving closed-form geodesic oracles."""
    w = np.zeros((n, n))
    for i in range(n):
        w[i, (i + 1) % n] = w[(i + 1) % n, i] = ring
        w[i, (i + 2) % n] = w[(i + 2) % n, i] = chord
    return np.diag(w.sum(axis=1)) - w


def uniform_complete(n: int, weight: float) -> Graph:
    w = np.full((n, n), float(weight))
    np.fill_diagonal(w, 0.0)
    return Graph(n=n, w=w)

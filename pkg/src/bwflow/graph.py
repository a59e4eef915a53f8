"""
Graph data model: weighted adjacency + optional node features, the Markov
random field view of a graph (mean features, Laplacian precision), and
structural validation. The edge-list JSON schema here is the canonical
on-disk form; dense matrices are in-memory only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    RankTolerance,
    check_symmetric,
    eig_sym,
    symmetrize,
)


class DisconnectedGraph(ValueError):
    """Laplacian null space has dimension > 1 and no regularizer was set."""


class SingularCovariance(ValueError):
    """Feature covariance is singular beyond the one allowed zero mode."""


@dataclass
class Graph:
    """A realized graph: node count, symmetric nonnegative adjacency with a
    zero diagonal, optional (n, K) node features.

    In the discrete regime features are one-hot rows and edge weights are
    binary; `discrete` records which regime produced the graph.
    """

    n: int
    w: np.ndarray
    x: Optional[np.ndarray] = None
    discrete: bool = False

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        if self.w.shape != (self.n, self.n):
            raise ValueError(f"adjacency shape {self.w.shape} != ({self.n}, {self.n})")
        if self.x is not None:
            self.x = np.asarray(self.x, dtype=float)
            if self.x.ndim != 2 or self.x.shape[0] != self.n:
                raise ValueError("features must be an (n, K) matrix")

    def copy(self) -> "Graph":
        return Graph(self.n, self.w.copy(), None if self.x is None else self.x.copy(), self.discrete)


@dataclass
class GraphMRF:
    """Random-graph distribution parameters: latent feature mean, Laplacian,
    covariance regularizer nu and feature-gram scale beta.

    With nu = 0 geodesic operations require a connected graph (exactly one
    zero Laplacian eigenvalue). nu > 0 substitutes (L + nu I)^{-1} for the
    pseudoinverse everywhere, lifting the restriction; nu should stay above
    the rank threshold (>= 1e-8 at these sizes) or it is indistinguishable
    from zero. The feature emission map is never materialized, only its
    scale beta enters distances.
    """

    mean: np.ndarray
    laplacian: np.ndarray
    nu: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        self.mean = np.atleast_2d(np.asarray(self.mean, dtype=float))
        self.laplacian = check_symmetric(self.laplacian)
        if self.mean.shape[0] != self.laplacian.shape[0]:
            raise ValueError("mean rows must match the Laplacian dimension")
        if self.nu < 0:
            raise ValueError("nu must be >= 0")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")

    @property
    def n(self) -> int:
        return self.laplacian.shape[0]


@dataclass(frozen=True)
class GraphValidity:
    symmetric: bool
    nonnegative: bool
    connected: bool
    zero_eigs: int


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian L = D - W with D = diag(W 1)."""
    w = symmetrize(g.w)
    return np.diag(w.sum(axis=1)) - w


def adjacency_from_laplacian(l: np.ndarray) -> np.ndarray:
    """Inverse of laplacian(): W = diag(L) - L, zero diagonal by construction.

    Negative off-diagonal magnitudes pass through untouched; validity is a
    separate check.
    """
    l = check_symmetric(l, atol=1e-8)
    return np.diag(np.diag(l)) - l


def zero_eig_count(l: np.ndarray, tol: RankTolerance = DEFAULT_TOL) -> int:
    """Number of Laplacian eigenvalues at or below the rank threshold."""
    lam = eig_sym(l, atol=1e-8).eigenvalues
    return int(np.sum(lam <= tol.threshold(lam)))


def validate(g: Graph, tol: RankTolerance = DEFAULT_TOL) -> GraphValidity:
    """Diagnostic structural check; never raises.

    connected is computed from the Laplacian null-space dimension, so for a
    valid graph connected <=> zero_eigs == 1.
    """
    w = np.asarray(g.w, dtype=float)
    gap = float(np.max(np.abs(w - w.T))) if w.size else 0.0
    symmetric = gap <= 1e-12 and float(np.max(np.abs(np.diag(w)))) <= 1e-12
    nonnegative = bool(np.min(w) >= 0.0) if w.size else True
    zero_eigs = zero_eig_count(laplacian(g), tol)
    return GraphValidity(
        symmetric=symmetric,
        nonnegative=nonnegative,
        connected=zero_eigs == 1,
        zero_eigs=zero_eigs,
    )


def mrf_from_graph(g: Graph, nu: float = 0.0, beta: float = 1.0) -> GraphMRF:
    """Wrap a graph as its MRF parameters; featureless graphs get an (n, 0)
    mean so the mean term contributes nothing."""
    mean = g.x if g.x is not None else np.zeros((g.n, 0))
    return GraphMRF(mean=mean, laplacian=laplacian(g), nu=nu, beta=beta)


def one_hot_features(g: Graph) -> np.ndarray:
    """Features as categorical rows; missing features become a single-class
    one-hot column so every pipeline sees K >= 1."""
    if g.x is None:
        return np.ones((g.n, 1))
    return np.asarray(g.x, dtype=float)


def sample_features(mrf: GraphMRF, rng: np.random.Generator) -> np.ndarray:
    """Draw node features from the colored Gaussian around the mean.

    The covariance factorizes over feature channels as beta * (nu I + L)^+,
    realized by spectral coloring: E = U diag((nu + lam_i)^{-1/2}) U^T Z
    with Z standard normal. At nu = 0 the zero mode carries no noise
    (sampling restricted to the range of L); a disconnected Laplacian at
    nu = 0 raises SingularCovariance.
    """
    spec = eig_sym(mrf.laplacian, atol=1e-8)
    lam = np.clip(spec.eigenvalues, 0.0, None)
    cut = DEFAULT_TOL.threshold(lam)
    null_dim = int(np.sum(lam <= cut))
    if mrf.nu == 0.0 and null_dim > 1:
        raise SingularCovariance(f"nu=0 with {null_dim} zero eigenvalues")
    shifted = lam + mrf.nu
    scale = np.where(shifted > cut, 1.0 / np.sqrt(np.where(shifted > cut, shifted, 1.0)), 0.0)
    k = mrf.mean.shape[1]
    z = rng.standard_normal((mrf.n, k))
    u = spec.eigenvectors
    colored = u @ (scale[:, None] * (u.T @ z)) * np.sqrt(mrf.beta)
    return mrf.mean + colored


def graph_to_dict(g: Graph) -> dict:
    """Graph as its JSON-schema dict: edge list with u < v, optional
    features, discrete flag."""
    edges = []
    for u in range(g.n):
        for v in range(u + 1, g.n):
            wt = float(g.w[u, v])
            if wt != 0.0:
                edges.append([u, v, wt])
    out = {"n": g.n, "edges": edges, "discrete": g.discrete}
    if g.x is not None:
        out["features"] = [[float(v) for v in row] for row in g.x]
    return out


def graph_from_dict(d: dict) -> Graph:
    n = int(d["n"])
    w = np.zeros((n, n))
    for u, v, wt in d.get("edges", []):
        u, v = int(u), int(v)
        if not 0 <= u < v < n:
            raise ValueError(f"edge ({u}, {v}) violates 0 <= u < v < n")
        w[u, v] = w[v, u] = float(wt)
    x = d.get("features")
    if x is not None:
        x = np.asarray(x, dtype=float)
    return Graph(n=n, w=w, x=x, discrete=bool(d.get("discrete", False)))


def save_graph(g: Graph, path) -> None:
    with open(path, "w") as f:
        json.dump(graph_to_dict(g), f, indent=1)


def load_graph(path) -> Graph:
    with open(path) as f:
        return graph_from_dict(json.load(f))


def save_graphs(graphs, path) -> None:
    with open(path, "w") as f:
        json.dump([graph_to_dict(g) for g in graphs], f, indent=1)


def load_graphs(path) -> list:
    with open(path) as f:
        return [graph_from_dict(d) for d in json.load(f)]

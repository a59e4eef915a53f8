"""
x-prediction denoisers: given a noisy interpolant G_t, predict the clean
endpoint as per-node class probabilities and per-edge Bernoulli
probabilities.

Two built-ins, neither trained: an oracle that always answers a fixed
target (for exactness tests of the samplers) and a nearest-neighbor
memorizer over a training set. Both ignore t, but every denoiser receives
it so a learned model can be slotted into the same interface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import Graph, one_hot_features

ROW_SUM_ATOL = 1e-9


@dataclass(frozen=True)
class DenoiserOutput:
    """Predicted endpoint distribution: node_probs rows on the simplex,
    edge_probs symmetric in [0, 1] with zero diagonal."""

    node_probs: np.ndarray
    edge_probs: np.ndarray

    def __post_init__(self):
        node = np.asarray(self.node_probs, dtype=float)
        edge = np.asarray(self.edge_probs, dtype=float)
        if node.ndim != 2 or edge.ndim != 2 or edge.shape[0] != edge.shape[1]:
            raise ValueError("node_probs must be n x K, edge_probs n x n")
        if node.shape[0] != edge.shape[0]:
            raise ValueError("node/edge size mismatch")
        if np.abs(node.sum(axis=1) - 1.0).max() > ROW_SUM_ATOL:
            raise ValueError("node probability rows must sum to 1")
        if edge.min() < 0.0 or edge.max() > 1.0:
            raise ValueError("edge probabilities must lie in [0, 1]")
        if np.abs(edge - edge.T).max() > ROW_SUM_ATOL:
            raise ValueError("edge probabilities must be symmetric")
        object.__setattr__(self, "node_probs", node)
        object.__setattr__(self, "edge_probs", edge)

    @property
    def n(self) -> int:
        return self.edge_probs.shape[0]


def encode_graph(g: Graph) -> DenoiserOutput:
    """Probability encoding of a concrete graph: one-hot rows at the
    feature argmax, edges thresholded at 1/2. Featureless graphs encode
    as the single-class column of ones."""
    x = one_hot_features(g)
    classes = np.argmax(x, axis=1)
    node = np.zeros_like(x, dtype=float)
    node[np.arange(g.n), classes] = 1.0
    edge = (g.w > 0.5).astype(float)
    np.fill_diagonal(edge, 0.0)
    return DenoiserOutput(node_probs=node, edge_probs=(edge + edge.T) / 2.0)


def _binarized(w: np.ndarray) -> np.ndarray:
    e = (w > 0.5).astype(float)
    np.fill_diagonal(e, 0.0)
    return e


def graph_distance(a: Graph, b: Graph) -> int:
    """Hamming distance on thresholded edges plus feature-argmax mismatches.

    Thresholding makes binary and weighted graphs comparable with one rule;
    the discrete samplers feed binary states anyway.
    """
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n}")
    ea, eb = _binarized(a.w), _binarized(b.w)
    iu = np.triu_indices(a.n, k=1)
    d = int(np.sum(ea[iu] != eb[iu]))
    xa, xb = one_hot_features(a), one_hot_features(b)
    if xa.shape[1] != xb.shape[1]:
        raise ValueError("feature dimension mismatch")
    d += int(np.sum(np.argmax(xa, axis=1) != np.argmax(xb, axis=1)))
    return d


def oracle_predict(target: Graph, g_t: Graph, t: float) -> DenoiserOutput:
    """Ideal denoiser: the target with probability one, whatever the input."""
    if g_t.n != target.n:
        raise ValueError(f"size mismatch: {g_t.n} vs {target.n}")
    return encode_graph(target)


def knn_predict(train_set: Sequence[Graph], g_t: Graph, t: float, k: int = 1) -> DenoiserOutput:
    """Average of the one-hot encodings of the k nearest training graphs.

    Ties broken by training-set index (stable sort), so the result is
    deterministic given the set's order.
    """
    if len(train_set) == 0:
        raise ValueError("empty train_set")
    if not 1 <= k <= len(train_set):
        raise ValueError(f"k={k} outside [1, {len(train_set)}]")
    dists = np.array([graph_distance(g, g_t) for g in train_set])
    nearest = np.argsort(dists, kind="stable")[:k]
    encoded = [encode_graph(train_set[i]) for i in nearest]
    node = np.mean([e.node_probs for e in encoded], axis=0)
    edge = np.mean([e.edge_probs for e in encoded], axis=0)
    return DenoiserOutput(node_probs=node, edge_probs=edge)


@dataclass(frozen=True)
class OracleDenoiser:
    """predict() ignores its inputs and encodes the fixed target."""

    target: Graph

    def predict(self, g_t: Graph, t: float) -> DenoiserOutput:
        return oracle_predict(self.target, g_t, t)


@dataclass(frozen=True)
class KnnDenoiser:
    """Memorizing denoiser over an immutable training set."""

    train_set: tuple
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "train_set", tuple(self.train_set))
        if len(self.train_set) == 0:
            raise ValueError("empty train_set")
        if not 1 <= self.k <= len(self.train_set):
            raise ValueError(f"k={self.k} outside [1, {len(self.train_set)}]")

    def predict(self, g_t: Graph, t: float) -> DenoiserOutput:
        return knn_predict(self.train_set, g_t, t, self.k)

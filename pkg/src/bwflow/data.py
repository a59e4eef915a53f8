"""Synthetic graph generators and reference distributions for sampling."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graph import Graph


def symmetric_bernoulli(p: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw the upper triangle and mirror it."""
    n = p.shape[0]
    draw = (rng.random((n, n)) < p).astype(float)
    out = np.triu(draw, k=1)
    return out + out.T


def sbm_sample(block_sizes: Sequence[int], p_in: float, p_out: float,
               rng: np.random.Generator) -> Graph:
    """Stochastic block model draw: within-block edges with probability
    p_in, cross-block with p_out."""
    if not 0.0 <= p_in <= 1.0 or not 0.0 <= p_out <= 1.0:
        raise ValueError("probabilities must lie in [0, 1]")
    labels = np.repeat(np.arange(len(block_sizes)), list(block_sizes))
    n = labels.size
    same = labels[:, None] == labels[None, :]
    p = np.where(same, p_in, p_out)
    return Graph(n=n, w=symmetric_bernoulli(p, rng), discrete=True)


def tree_sample(n: int, rng: np.random.Generator) -> Graph:
    """Uniform labeled tree on n nodes via a random Pruefer sequence."""
    if n < 2:
        raise ValueError("a tree needs n >= 2")
    w = np.zeros((n, n))
    if n == 2:
        w[0, 1] = w[1, 0] = 1.0
        return Graph(n=2, w=w, discrete=True)
    seq = rng.integers(0, n, size=n - 2)
    degree = np.ones(n, dtype=int)
    for v in seq:
        degree[v] += 1
    # repeatedly attach the smallest-index leaf to the next sequence entry
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for v in seq:
        leaf = heapq.heappop(leaves)
        w[leaf, v] = w[v, leaf] = 1.0
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    w[u, v] = w[v, u] = 1.0
    return Graph(n=n, w=w, discrete=True)


def er_sample(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Erdos-Renyi draw: each edge independent Bernoulli(p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return Graph(n=n, w=symmetric_bernoulli(np.full((n, n), p), rng), discrete=True)


@dataclass(frozen=True)
class ReferenceDistribution:
    """Initial distribution p0 for sampling chains.

    marginal: edges iid Bernoulli(edge_marginal), node classes iid
    Categorical(node_marginal). absorbing: the empty graph with every node
    in the mask category (index 0). node_marginal None means featureless.
    """

    kind: str = "marginal"
    edge_marginal: float = 0.5
    node_marginal: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("marginal", "absorbing"):
            raise ValueError(f"unknown reference kind {self.kind!r}")
        if not 0.0 <= self.edge_marginal <= 1.0:
            raise ValueError("edge_marginal must lie in [0, 1]")
        if self.node_marginal is not None:
            nm = tuple(float(p) for p in self.node_marginal)
            if any(p < 0 for p in nm) or abs(sum(nm) - 1.0) > 1e-9:
                raise ValueError("node_marginal must be a probability vector")
            object.__setattr__(self, "node_marginal", nm)


def draw_reference(ref: ReferenceDistribution, n: int, k: int,
                   rng: np.random.Generator) -> Graph:
    """One reference graph. k is the node-class count; k == 0 means
    featureless. Continuous chains reuse the same draw, reading the binary
    values as real-valued starting weights."""
    if ref.kind == "absorbing":
        w = np.zeros((n, n))
        x = None
        if k > 0:
            x = np.zeros((n, k))
            x[:, 0] = 1.0
        return Graph(n=n, w=w, x=x, discrete=True)
    w = symmetric_bernoulli(np.full((n, n), ref.edge_marginal), rng)
    x = None
    if k > 0:
        probs = ref.node_marginal
        if probs is None:
            probs = tuple(1.0 / k for _ in range(k))
        if len(probs) != k:
            raise ValueError(f"node_marginal length {len(probs)} != k={k}")
        classes = rng.choice(k, size=n, p=np.asarray(probs) / np.sum(probs))
        x = np.zeros((n, k))
        x[np.arange(n), classes] = 1.0
    return Graph(n=n, w=w, x=x, discrete=True)


def estimate_marginal(train: Sequence[Graph]) -> ReferenceDistribution:
    """Fit a marginal reference to a training set: mean off-diagonal edge
    value (clipped into [0,1]) and empirical node-class frequencies."""
    if len(train) == 0:
        raise ValueError("empty training set")
    total, slots = 0.0, 0
    counts = None
    for g in train:
        iu = np.triu_indices(g.n, k=1)
        total += float(np.clip(g.w[iu], 0.0, 1.0).sum())
        slots += iu[0].size
    edge_marginal = total / max(slots, 1)
    if all(g.x is not None for g in train):
        kk = train[0].x.shape[1]
        counts = np.zeros(kk)
        for g in train:
            if g.x.shape[1] != kk:
                raise ValueError("inconsistent feature dimensions in train set")
            classes = np.argmax(g.x, axis=1)
            counts += np.bincount(classes, minlength=kk)
        node_marginal = tuple(counts / counts.sum())
    else:
        node_marginal = None
    return ReferenceDistribution(kind="marginal", edge_marginal=edge_marginal,
                                 node_marginal=node_marginal)

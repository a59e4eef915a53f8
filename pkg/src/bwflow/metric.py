"""
Closed-form optimal-transport distances between Gaussian measures and
between graph distributions with Laplacian-structured precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import DisconnectedGraph, GraphMRF, zero_eig_count
from .linalg import DEFAULT_TOL, RankTolerance, psd_pinv, psd_sqrt, symmetrize


@dataclass(frozen=True)
class GaussianMeasure:
    """A Gaussian N(mean, cov) with PSD covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float).ravel())
        object.__setattr__(self, "cov", np.asarray(self.cov, dtype=float))
        if self.cov.shape != (self.mean.size, self.mean.size):
            raise ValueError("cov shape must match mean dimension")


def _cross_sqrt_trace(s0: np.ndarray, s1: np.ndarray, tol: RankTolerance) -> float:
    # Tr((S0^{1/2} S1 S0^{1/2})^{1/2}), the coupling term of the squared
    # 2-Wasserstein distance between centered Gaussians.
    r0 = psd_sqrt(s0, tol)
    inner = symmetrize(r0 @ s1 @ r0)
    return float(np.trace(psd_sqrt(inner, tol)))


def gaussian_w2_sq(a: GaussianMeasure, b: GaussianMeasure, tol: RankTolerance = DEFAULT_TOL) -> float:
    """Squared 2-Wasserstein distance between two Gaussians.

    ||mu0 - mu1||^2 + Tr(S0 + S1 - 2 (S0^{1/2} S1 S0^{1/2})^{1/2}),
    clamped at 0 against round-off.
    """
    if a.mean.size != b.mean.size:
        raise ValueError("dimension mismatch")
    mean_term = float(np.sum((a.mean - b.mean) ** 2))
    trace_term = float(np.trace(a.cov) + np.trace(b.cov)) - 2.0 * _cross_sqrt_trace(a.cov, b.cov, tol)
    return max(mean_term + trace_term, 0.0)


def bures_psd(s0: np.ndarray, s1: np.ndarray, tol: RankTolerance = DEFAULT_TOL) -> float:
    """Squared Frobenius distance between PSD square roots,
    ||S0^{1/2} - S1^{1/2}||_F^2. A proper distance on PSD matrices."""
    d = psd_sqrt(s0, tol) - psd_sqrt(s1, tol)
    return float(np.sum(d * d))


def mrf_covariance(mrf: GraphMRF, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Per-channel feature covariance of an MRF.

    nu = 0: pseudoinverse of the Laplacian, requiring a connected graph
    (one zero eigenvalue). nu > 0: (L + nu I)^{-1}, no restriction.
    """
    if mrf.nu > 0.0:
        return psd_pinv(mrf.laplacian + mrf.nu * np.eye(mrf.n), tol)
    zeros = zero_eig_count(mrf.laplacian, tol)
    if zeros > 1:
        raise DisconnectedGraph(f"{zeros} zero Laplacian eigenvalues at nu=0")
    return psd_pinv(mrf.laplacian, tol)


def graph_bw_terms(g0: GraphMRF, g1: GraphMRF, tol: RankTolerance = DEFAULT_TOL) -> tuple[float, float]:
    """Mean and trace parts of the graph BW distance, before the beta scale.

    The trace part is Tr(S0 + S1 - 2 (S0^{1/2} S1 S0^{1/2})^{1/2}) on the
    per-channel covariances from mrf_covariance.
    """
    if g0.n != g1.n:
        raise ValueError("size mismatch")
    if g0.mean.shape != g1.mean.shape:
        raise ValueError("feature dimensions differ")
    mean_term = float(np.sum((g0.mean - g1.mean) ** 2))
    s0 = mrf_covariance(g0, tol)
    s1 = mrf_covariance(g1, tol)
    trace_term = float(np.trace(s0) + np.trace(s1)) - 2.0 * _cross_sqrt_trace(s0, s1, tol)
    return mean_term, trace_term


def graph_bw_distance(g0: GraphMRF, g1: GraphMRF, tol: RankTolerance = DEFAULT_TOL) -> float:
    """Squared Bures-Wasserstein distance between two graph distributions.

    mean term + beta * trace term; beta multiplies the covariance part as a
    single scalar that absorbs the feature-map scale (default 1). Both
    inputs must share n and beta; round-off negatives clamp to 0.
    """
    if g0.beta != g1.beta:
        raise ValueError("beta mismatch")
    mean_term, trace_term = graph_bw_terms(g0, g1, tol)
    return max(mean_term + g0.beta * trace_term, 0.0)

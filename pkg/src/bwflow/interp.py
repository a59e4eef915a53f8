"""
Probability-path interpolants between two graphs.

The primary path is the optimal-transport geodesic on the graphs' feature
covariances (Laplacian pseudoinverses), with the mean interpolated
linearly. Three baseline schemes (linear, geometric, harmonic on the
adjacency) are kept for comparison; they are expected to leave the valid
graph domain and are not repaired beyond the documented spectral floor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import DisconnectedGraph, GraphMRF, adjacency_from_laplacian, zero_eig_count
from .linalg import (
    DEFAULT_TOL,
    RankTolerance,
    center,
    eig_sym,
    psd_pinv,
    psd_power,
    psd_sqrt,
    symmetrize,
)
from .metric import mrf_covariance

SCHEME_KINDS = ("bw", "linear", "geometric", "harmonic")


@dataclass(frozen=True)
class InterpScheme:
    """Interpolation choice plus the spectral floor used by the schemes
    that invert or take powers of the adjacency."""

    kind: str = "bw"
    eps: float = 1e-6

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"kind must be one of {SCHEME_KINDS}")
        if self.eps <= 0:
            raise ValueError("eps must be > 0")


@dataclass(frozen=True)
class PathPoint:
    """One point of a probability path: time, interpolated mean, Laplacian
    and the adjacency read off it (zero diagonal, symmetric)."""

    t: float
    x_t: np.ndarray
    l_t: np.ndarray
    w_t: np.ndarray

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "w_t": [[float(v) for v in row] for row in self.w_t],
            "x_t": [[float(v) for v in row] for row in self.x_t],
        }


def _check_time(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t={t} outside [0, 1]")
    return t


def _require_invertible(l: np.ndarray, tol: RankTolerance) -> None:
    zeros = zero_eig_count(l, tol)
    if zeros > 1:
        raise DisconnectedGraph(f"{zeros} zero Laplacian eigenvalues")


def transport_map(l0: np.ndarray, l1: np.ndarray, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Linear map pushing the source covariance onto the target one,
    T = L0^{1/2} (L0^{+/2} L1^{+} L0^{+/2})^{1/2} L0^{1/2}.

    Both arguments must be connected Laplacians or regularized (at most one
    zero eigenvalue); T satisfies T L0^{+} T = L1^{+} on the range of L0.
    """
    _require_invertible(l0, tol)
    _require_invertible(l1, tol)
    sqrt_l0 = psd_sqrt(l0, tol)
    r0 = psd_power(l0, -0.5, tol)
    mid = symmetrize(r0 @ psd_pinv(l1, tol) @ r0)
    return symmetrize(sqrt_l0 @ psd_sqrt(mid, tol) @ sqrt_l0)


def _sigma_geodesic(g0: GraphMRF, g1: GraphMRF, t: float, tol: RankTolerance) -> np.ndarray:
    """Covariance-side geodesic point,
    S_t = M0^{1/2} ((1-t) S0 + t (S0^{1/2} S1 S0^{1/2})^{1/2})^2 M0^{1/2}
    with M0 the (possibly regularized) precision of g0."""
    s0 = mrf_covariance(g0, tol)
    s1 = mrf_covariance(g1, tol)
    m0 = g0.laplacian + g0.nu * np.eye(g0.n) if g0.nu > 0 else g0.laplacian
    sqrt_m0 = psd_sqrt(m0, tol)
    r0 = psd_sqrt(s0, tol)
    mid = symmetrize(r0 @ s1 @ r0)
    b = (1.0 - t) * s0 + t * psd_sqrt(mid, tol)
    sig = symmetrize(sqrt_m0 @ b @ b @ sqrt_m0)
    if g0.nu == 0.0:
        # the null mode of a connected Laplacian must stay exactly null
        sig = symmetrize(center(sig))
    return sig


def _laplacian_from_sigma(sig: np.ndarray, nu: float, n: int, tol: RankTolerance) -> np.ndarray:
    l = psd_pinv(sig, tol)
    if nu > 0.0:
        l = l - nu * np.eye(n)
    return symmetrize(l)


def bw_interpolate(g0: GraphMRF, g1: GraphMRF, t: float, tol: RankTolerance = DEFAULT_TOL) -> PathPoint:
    """Geodesic interpolant between two graph distributions.

    The mean is exactly linear; the Laplacian is recovered from the
    covariance geodesic via the shared rank tolerance. Endpoints reproduce
    (X0, L0) and (X1, L1) up to chained matrix-function round-off.
    """
    t = _check_time(t)
    if g0.n != g1.n:
        raise ValueError("size mismatch")
    if g0.nu != g1.nu:
        raise ValueError("nu mismatch")
    x_t = (1.0 - t) * g0.mean + t * g1.mean
    sig = _sigma_geodesic(g0, g1, t, tol)
    l_t = _laplacian_from_sigma(sig, g0.nu, g0.n, tol)
    return PathPoint(t=t, x_t=x_t, l_t=l_t, w_t=adjacency_from_laplacian(l_t))


def _spectral_floor(w: np.ndarray, eps: float) -> np.ndarray:
    spec = eig_sym(w, atol=1e-8)
    return symmetrize((spec.eigenvectors * np.maximum(spec.eigenvalues, eps)) @ spec.eigenvectors.T)


def _zero_diag(w: np.ndarray) -> np.ndarray:
    out = w.copy()
    np.fill_diagonal(out, 0.0)
    return out


def baseline_interpolate(g0: GraphMRF, g1: GraphMRF, t: float, scheme: InterpScheme,
                         tol: RankTolerance = DEFAULT_TOL) -> PathPoint:
    """Interpolate adjacencies by the requested scheme; features stay linear.

    linear:    W_t = (1-t) W0 + t W1
    geometric: F0^{1/2} (F0^{-1/2} F1 F0^{-1/2})^t F0^{1/2}
    harmonic:  ((1-t) F0^{-1} + t F1^{-1})^{-1}

    where F floors the adjacency eigenvalues at scheme.eps so the inverses
    and powers exist. The floored result keeps whatever off-domain values
    it produces (that failure mode is the point of the baselines); only the
    diagonal is zeroed when read back as an adjacency. kind="bw" dispatches
    to bw_interpolate.
    """
    if scheme.kind == "bw":
        return bw_interpolate(g0, g1, t, tol)
    t = _check_time(t)
    if g0.n != g1.n:
        raise ValueError("size mismatch")
    w0 = adjacency_from_laplacian(g0.laplacian)
    w1 = adjacency_from_laplacian(g1.laplacian)
    if scheme.kind == "linear":
        w_t = (1.0 - t) * w0 + t * w1
    elif scheme.kind == "geometric":
        f0 = _spectral_floor(w0, scheme.eps)
        f1 = _spectral_floor(w1, scheme.eps)
        rf0 = psd_power(f0, -0.5, tol)
        sf0 = psd_sqrt(f0, tol)
        core = psd_power(symmetrize(rf0 @ f1 @ rf0), t, tol)
        w_t = symmetrize(sf0 @ core @ sf0)
    else:  # harmonic
        f0 = _spectral_floor(w0, scheme.eps)
        f1 = _spectral_floor(w1, scheme.eps)
        mix = (1.0 - t) * psd_power(f0, -1.0, tol) + t * psd_power(f1, -1.0, tol)
        w_t = psd_power(mix, -1.0, tol)
    w_t = _zero_diag(symmetrize(w_t))
    x_t = (1.0 - t) * g0.mean + t * g1.mean
    l_t = np.diag(w_t.sum(axis=1)) - w_t
    return PathPoint(t=t, x_t=x_t, l_t=l_t, w_t=w_t)


def path_sweep(g0: GraphMRF, g1: GraphMRF, scheme: InterpScheme, steps: int,
               tol: RankTolerance = DEFAULT_TOL) -> list[PathPoint]:
    """PathPoints at t = i/(steps-1), i = 0..steps-1. steps >= 2."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    ts = [i / (steps - 1) for i in range(steps)]
    return [baseline_interpolate(g0, g1, t, scheme, tol) for t in ts]

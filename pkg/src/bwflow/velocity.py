"""
Conditional velocity fields along the interpolation paths.

Continuous side: the time derivative of the geodesic Laplacian, computed in
closed form from the spectrum of the endpoint transport map. Discrete side:
per-edge flip rates and per-node categorical rates that realize the
marginal trajectory, plus a finite-difference fallback usable with any
interpolation scheme.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import GraphMRF, adjacency_from_laplacian
from .interp import InterpScheme, baseline_interpolate, bw_interpolate, transport_map
from .linalg import DEFAULT_TOL, RankTolerance, center, eig_sym, symmetrize

# Velocities diverge as 1/(1-t); beyond this point callers must switch to
# the terminal rule of their sampler instead of asking for a rate.
TIME_EPS = 1e-6


class TimeSingularity(Exception):
    """Velocity requested too close to t = 1."""


@dataclass(frozen=True)
class GraphVelocity:
    """Rates of change of a path point: edge weights, features, and the
    Laplacian they came from. transport keeps the endpoint map when the
    closed form produced it (None for finite differences)."""

    w_dot: np.ndarray
    x_dot: np.ndarray
    l_dot: np.ndarray
    transport: Optional[np.ndarray] = None


@dataclass(frozen=True)
class DiscreteVelocity:
    """Transition rates for the discrete regime. edge_rates[u, v] is the
    signed rate of flipping the current state of edge (u, v); node_rates
    rows sum to zero over the K classes."""

    edge_rates: Optional[np.ndarray] = None
    node_rates: Optional[np.ndarray] = None


def _check_velocity_time(t: float) -> float:
    t = float(t)
    if t < 0.0:
        raise ValueError(f"t={t} outside [0, 1)")
    if t >= 1.0 - TIME_EPS:
        raise TimeSingularity(f"velocity undefined at t={t} (limit 1-{TIME_EPS:g})")
    return t


def _precision(g: GraphMRF) -> np.ndarray:
    return g.laplacian + g.nu * np.eye(g.n) if g.nu > 0 else g.laplacian


def path_operator(g0: GraphMRF, g1: GraphMRF, t: float, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Symmetric operator S_t with L_dot = -(S_t L + L S_t) along the
    geodesic from g0 to g1.

    With T the endpoint transport map, S_t = (T - I)((1-t)I + tT)^{-1};
    both factors are functions of T so this is evaluated on T's spectrum.
    The map is exact for every t in [0, 1), not only at t = 0, and can be
    applied to a Laplacian other than the geodesic's own (the sampler does
    exactly that with an estimated endpoint).
    """
    t = _check_velocity_time(t)
    tmap = transport_map(_precision(g0), _precision(g1), tol)
    spec = eig_sym(tmap)
    lam = spec.eigenvalues
    gains = (lam - 1.0) / ((1.0 - t) + t * lam)
    return symmetrize((spec.eigenvectors * gains) @ spec.eigenvectors.T)


def apply_path_operator(s: np.ndarray, l: np.ndarray, nu: float = 0.0) -> np.ndarray:
    """L_dot = -(S L + L S), re-centered when the null direction is exact."""
    l_dot = -symmetrize(s @ l + l @ s)
    if nu == 0.0:
        l_dot = symmetrize(center(l_dot))
    return l_dot


def bw_velocity(g0: GraphMRF, g1: GraphMRF, t: float, tol: RankTolerance = DEFAULT_TOL) -> GraphVelocity:
    """Closed-form velocity of the geodesic path at time t.

    w_dot reads the edge rates off l_dot (diag(L_dot) - L_dot); x_dot is
    the constant derivative of the linear mean path. The feature velocity
    deliberately drops the covariance coupling term, which is negligible
    when mean displacement dominates the noise scale; the sampler relies
    on the same simplification.
    """
    t = _check_velocity_time(t)
    point = bw_interpolate(g0, g1, t, tol)
    s = path_operator(g0, g1, t, tol)
    l_dot = apply_path_operator(s, point.l_t, g0.nu)
    w_dot = adjacency_from_laplacian(l_dot)
    x_dot = g1.mean - g0.mean
    tmap = transport_map(_precision(g0), _precision(g1), tol)
    return GraphVelocity(w_dot=w_dot, x_dot=x_dot, l_dot=l_dot, transport=tmap)


def discrete_edge_velocity(e_t: np.ndarray, w_t: np.ndarray, w_dot: np.ndarray,
                           clamp_eps: float = 1e-6) -> np.ndarray:
    """Signed flip rate per edge for a binary state E_t on the path:

        rate = (1 - 2 E_t) * W_dot / (W_t (1 - W_t))

    W_t is clipped into [clamp_eps, 1-clamp_eps] before dividing; the
    marginal path touches 0 and 1 at its endpoints, where the raw rate
    diverges. Positive rate at E=0 pushes toward 1; negative rate at E=1
    pushes toward 0. The per-channel decomposition that balances the
    marginal exactly is edge_channel_rates."""
    w = np.clip(w_t, clamp_eps, 1.0 - clamp_eps)
    return (1.0 - 2.0 * np.asarray(e_t, dtype=float)) * w_dot / (w * (1.0 - w))


def edge_channel_rates(w_t: np.ndarray, w_dot: np.ndarray,
                       clamp_eps: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric split of the flip rate into its two channels,

        v01 = W_dot / (2 (1 - W_t)),   v10 = -W_dot / (2 W_t),

    the unique equal-share solution of the per-edge balance
    (1 - W) v01 - W v10 = W_dot. Equivalently v01 = W*rate(E=0)/2 and
    v10 = (1-W)*rate(E=1)/2 in terms of discrete_edge_velocity. With
    clamp_eps = 0 the identity holds to machine precision; a positive
    floor trades exactness for bounded rates near saturation."""
    w = np.asarray(w_t, dtype=float)
    if clamp_eps > 0.0:
        w = np.clip(w, clamp_eps, 1.0 - clamp_eps)
    v01 = w_dot / (2.0 * (1.0 - w))
    v10 = -w_dot / (2.0 * w)
    return v01, v10


def discrete_node_velocity(x_t: np.ndarray, x1: np.ndarray, t: float) -> np.ndarray:
    """Categorical rates (x1 - x_t)/(1 - t) for one-hot states.

    Rows sum to zero; rows where x_t already equals x1 are zero.
    """
    t = float(t)
    if t >= 1.0 - TIME_EPS:
        raise TimeSingularity(f"node velocity undefined at t={t}")
    x_t = np.asarray(x_t, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    if x_t.shape != x1.shape:
        raise ValueError(f"shape mismatch: {x_t.shape} vs {x1.shape}")
    return (x1 - x_t) / (1.0 - t)


def numerical_velocity(g0: GraphMRF, g1: GraphMRF, t: float, h: float,
                       scheme: InterpScheme, tol: RankTolerance = DEFAULT_TOL) -> GraphVelocity:
    """Central finite difference (P_{t+h} - P_{t-h}) / 2h of any scheme's path.

    Second-order accurate; the closed form should be preferred for the
    geodesic, this exists for baselines and as an independent check.
    """
    t = float(t)
    h = float(h)
    if h <= 0.0:
        raise ValueError("h must be > 0")
    if t - h < 0.0 or t + h > 1.0:
        raise ValueError(f"central difference at t={t} with h={h} leaves [0, 1]")
    hi = baseline_interpolate(g0, g1, t + h, scheme, tol)
    lo = baseline_interpolate(g0, g1, t - h, scheme, tol)
    return GraphVelocity(
        w_dot=(hi.w_t - lo.w_t) / (2.0 * h),
        x_dot=(hi.x_t - lo.x_t) / (2.0 * h),
        l_dot=(hi.l_t - lo.l_t) / (2.0 * h),
        transport=None,
    )

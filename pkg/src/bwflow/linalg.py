"""
Spectral primitives for symmetric matrices.

Every matrix function in the toolkit (square roots, pseudoinverses, real
powers) is computed through one eigendecomposition path so that rank
decisions and clamping behave identically everywhere. Outputs are
re-symmetrized to stop asymmetry drift across chained calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, lsqr

SYM_ATOL = 1e-12


class SymmetryViolation(ValueError):
    """Input matrix is not symmetric within tolerance."""


class NotPSD(ValueError):
    """Input matrix has an eigenvalue below the allowed negative slack."""


@dataclass(frozen=True)
class RankTolerance:
    """Decides which eigenvalues count as zero.

    The effective threshold is max(abs_tol, rel_tol * lambda_max), which is
    scale-free across graph sizes and edge-weight magnitudes.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12

    def __post_init__(self):
        if self.rel_tol < 0 or self.abs_tol < 0:
            raise ValueError("tolerances must be nonnegative")

    def threshold(self, eigenvalues: np.ndarray) -> float:
        lam_max = float(np.max(eigenvalues)) if eigenvalues.size else 0.0
        return max(self.abs_tol, self.rel_tol * max(lam_max, 0.0))


DEFAULT_TOL = RankTolerance()


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a symmetric matrix.

    eigenvalues are ascending; eigenvectors are orthonormal columns, so
    V diag(lam) V^T reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return symmetrize(v @ np.diag(self.eigenvalues) @ v.T)


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Return (M + M^T)/2."""
    return (m + m.T) / 2.0


def center(m: np.ndarray) -> np.ndarray:
    """Double-center: project the constant vector out of rows and columns.

    For matrices that should annihilate the all-ones vector (Laplacians and
    their derivatives, covariances of centered fields), this removes the
    round-off drift that accumulates along chained matrix products.
    """
    row = m.mean(axis=1, keepdims=True)
    col = m.mean(axis=0, keepdims=True)
    return m - row - col + m.mean()


def check_symmetric(m: np.ndarray, atol: float = SYM_ATOL) -> np.ndarray:
    """Validate a square symmetric matrix with finite entries.

    Raises SymmetryViolation if any |m_ij - m_ji| exceeds atol, ValueError
    on shape or non-finite problems. Returns the input as float ndarray.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    gap = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if gap > atol:
        raise SymmetryViolation(f"asymmetry {gap:.3e} exceeds {atol:.3e}")
    return m


def eig_sym(m: np.ndarray, atol: float = SYM_ATOL) -> Spectrum:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending.

    Parameters
    ----------
    m : (n, n) array, symmetric within atol
    atol : absolute symmetry tolerance

    Returns
    -------
    Spectrum
    """
    m = check_symmetric(m, atol)
    lam, v = np.linalg.eigh(symmetrize(m))
    return Spectrum(eigenvalues=lam, eigenvectors=v)


def _checked_spectrum(m: np.ndarray, tol: RankTolerance) -> Spectrum:
    # Shared PSD gate: eigenvalues below -abs_tol are an error, round-off
    # negatives in [-abs_tol, 0) are clamped to zero.
    spec = eig_sym(m)
    lam = spec.eigenvalues
    lam_min = float(lam[0]) if lam.size else 0.0
    if lam_min < -tol.abs_tol:
        raise NotPSD(f"eigenvalue {lam_min:.3e} below -abs_tol {-tol.abs_tol:.3e}")
    return Spectrum(np.clip(lam, 0.0, None), spec.eigenvectors)


def _apply_spectral(spec: Spectrum, mapped: np.ndarray) -> np.ndarray:
    v = spec.eigenvectors
    return symmetrize((v * mapped) @ v.T)


def psd_sqrt(m: np.ndarray, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Symmetric PSD square root, result @ result == m up to rank truncation.

    Negative eigenvalues within -abs_tol are clamped to zero; anything
    lower raises NotPSD. Eigenvalues at or below the rank threshold map to
    0 like in psd_pinv: a numerically-null mode of magnitude eps would
    otherwise come back as sqrt(eps) and dominate the round-off budget of
    every caller.
    """
    spec = _checked_spectrum(m, tol)
    lam = spec.eigenvalues
    cut = tol.threshold(lam)
    return _apply_spectral(spec, np.where(lam > cut, np.sqrt(lam), 0.0))


def psd_pinv(m: np.ndarray, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a symmetric PSD matrix.

    Eigenvalues at or below the rank threshold map to 0, the rest to
    1/lambda.
    """
    spec = _checked_spectrum(m, tol)
    lam = spec.eigenvalues
    cut = tol.threshold(lam)
    inv = np.where(lam > cut, 1.0 / np.where(lam > cut, lam, 1.0), 0.0)
    return _apply_spectral(spec, inv)


def psd_power(m: np.ndarray, p: float, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Real matrix power of a symmetric PSD matrix.

    Eigenvalues below the rank threshold map to 0 (pseudo-power), the rest
    to lambda^p. Negative p therefore never divides by a zero mode.
    """
    spec = _checked_spectrum(m, tol)
    lam = spec.eigenvalues
    cut = tol.threshold(lam)
    kept = lam > cut
    powered = np.where(kept, np.power(np.where(kept, lam, 1.0), p), 0.0)
    return _apply_spectral(spec, powered)


@dataclass(frozen=True)
class LsqrResult:
    """Solution report of lsqr_solve.

    applications counts operator-vector products actually performed, so the
    iteration cost is observable rather than assumed.
    """

    x: np.ndarray
    converged: bool
    iterations: int
    residual_norm: float
    applications: int


def lsqr_solve(apply, b: np.ndarray, max_iter: int = 200, atol: float = 1e-10) -> LsqrResult:
    """Minimize ||A x - b|| with a matrix-free iterative solver.

    Parameters
    ----------
    apply : callable v -> A v for a fixed symmetric operator, or (n, n) array
    b : (n,) right-hand side
    max_iter : iteration cap, >= 1
    atol : residual tolerance

    Returns
    -------
    LsqrResult; converged is False when the cap was hit first, the best
    iterate is still returned (never aborts).
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if callable(apply):
        op = apply
    else:
        mat = np.asarray(apply, dtype=float)
        op = lambda v: mat @ v

    count = [0]

    def counted(v):
        count[0] += 1
        return op(v)

    # The operator is symmetric, so matvec and rmatvec coincide.
    linop = LinearOperator((n, n), matvec=counted, rmatvec=counted, dtype=float)
    x, istop, itn, r1norm = lsqr(linop, b, atol=atol, btol=atol, iter_lim=max_iter)[:4]
    converged = istop in (0, 1, 2, 4, 5)
    return LsqrResult(
        x=x,
        converged=converged,
        iterations=int(itn),
        residual_norm=float(r1norm),
        applications=count[0],
    )


@dataclass(frozen=True)
class PinvViaLsqrResult:
    matrix: np.ndarray
    converged: bool
    applications: int
    iterations: int = 0
    columns_failed: tuple = field(default_factory=tuple)


def pinv_via_lsqr(l: np.ndarray, max_iter: int = 500, atol: float = 1e-12) -> PinvViaLsqrResult:
    """Laplacian pseudoinverse via column-by-column least squares.

    Solves L c_j = e_j - mean(e_j) for each j; the right-hand side is
    projected onto range(L) first because the constant vector spans the
    null space of a connected Laplacian. Solutions are centered the same
    way and the assembled matrix re-symmetrized.

    Returns PinvViaLsqrResult with the total operator-application count and
    a converged flag that is the AND over columns.
    """
    l = check_symmetric(l)
    n = l.shape[0]
    cols = np.zeros((n, n))
    ok = True
    apps = 0
    iters = 0
    failed = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        rhs = e - e.mean()
        res = lsqr_solve(l, rhs, max_iter=max_iter, atol=atol)
        c = res.x - res.x.mean()
        cols[:, j] = c
        apps += res.applications
        iters += res.iterations
        if not res.converged:
            ok = False
            failed.append(j)
    return PinvViaLsqrResult(
        matrix=symmetrize(cols),
        converged=ok,
        applications=apps,
        iterations=iters,
        columns_failed=tuple(failed),
    )

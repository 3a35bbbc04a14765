"""Dense complex-matrix foundation: PSD verdicts, factorizations, direct solves.

Everything downstream funnels its positivity and rank questions through this
module so that one tolerance policy (relative, scaled by the spectral norm,
always recorded in the verdict) governs the whole package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .util import (
    DEFAULT_TOL,
    DimensionError,
    IndefiniteError,
    NotHermitianError,
    effective_tol,
)


def as_matrix(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {A.shape}")
    return A


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=complex).reshape(-1)
    return v


def spectral_norm(M) -> float:
    A = np.atleast_2d(np.asarray(M, dtype=complex))
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def hermitian_part(M) -> np.ndarray:
    A = as_matrix(M)
    return (A + A.conj().T) / 2


@dataclass
class HermitianVerdict:
    """Outcome of a PSD test: minimum eigenvalue, witness, tolerance used."""

    is_psd: bool
    min_eigenvalue: float
    tolerance: float
    witness: Optional[np.ndarray] = None
    hermiticity_defect: float = 0.0

    def __bool__(self) -> bool:  # allows `if psd_check(M):`
        return self.is_psd


def psd_check(M, tol: float = DEFAULT_TOL) -> HermitianVerdict:
    """Hermitian eigendecomposition test of (M + M*)/2.

    Eigen-based rather than Cholesky so the verdict carries the minimum
    eigenvalue and a witness vector.  Inputs non-Hermitian beyond the scaled
    tolerance are rejected.
    """
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"psd_check needs a square matrix, got {A.shape}")
    H = hermitian_part(A)
    scale = spectral_norm(H)
    defect = float(np.abs(A - H).max()) if A.size else 0.0
    tol_used = effective_tol(tol, scale)
    if defect > tol_used:
        raise NotHermitianError(f"non-Hermitian beyond tolerance: defect {defect:.3e}")
    vals, vecs = np.linalg.eigh(H)
    min_eig = float(vals[0])
    return HermitianVerdict(
        is_psd=min_eig >= -tol_used,
        min_eigenvalue=min_eig,
        tolerance=tol_used,
        witness=vecs[:, 0],
        hermiticity_defect=defect,
    )


def hermitian_factor(H, tol: float = DEFAULT_TOL) -> np.ndarray:
    """A factor S with S*S = H for positive semidefinite H.

    Built from the eigendecomposition, so S is invertible exactly when H is
    strictly positive definite.  Indefinite input raises.
    """
    A = hermitian_part(as_matrix(H))
    verdict = psd_check(H, tol)
    if not verdict.is_psd:
        raise IndefiniteError(
            f"matrix is not PSD (min eigenvalue {verdict.min_eigenvalue:.3e})"
        )
    vals, vecs = np.linalg.eigh(A)
    vals = np.clip(vals, 0.0, None)
    return np.sqrt(vals)[:, None] * vecs.conj().T


@dataclass
class SteinSolveReport:
    """Direct vectorized solve of H - sum_j A_j* H A_j = rhs."""

    solution: np.ndarray
    residual: float
    nullspace_dim: int
    singular: bool
    nullspace: Optional[np.ndarray] = None  # columns = vec'd homogeneous solutions


def solve_sylvester_vectorized(
    a_tuple: Sequence[np.ndarray], rhs, tol: float = DEFAULT_TOL
) -> SteinSolveReport:
    """Solve H - sum_j A_j* H A_j = rhs by vectorizing the linear map.

    A singular map is reported (null-space dimension attached), not raised:
    non-uniqueness is informative for non-stable tuples.  The returned
    solution is the least-squares representative in that case.
    """
    A = [as_matrix(Aj) for Aj in a_tuple]
    B = as_matrix(rhs)
    m = B.shape[0]
    if B.shape != (m, m) or any(Aj.shape != (m, m) for Aj in A):
        raise DimensionError("rhs and all A_j must be square of equal size")
    L = np.eye(m * m, dtype=complex)
    for Aj in A:
        L -= np.kron(Aj.T, Aj.conj().T)  # vec(A* H A) = kron(A^T, A*) vec(H)
    b = B.reshape(-1, order="F")
    U, s, Vh = np.linalg.svd(L)
    cutoff = effective_tol(tol, s[0] if s.size else 1.0)
    rank = int(np.sum(s > cutoff))
    null_dim = m * m - rank
    s_inv = np.where(s > cutoff, 1 / np.where(s > cutoff, s, 1.0), 0.0)
    x = Vh.conj().T @ (s_inv * (U.conj().T @ b))
    H = x.reshape((m, m), order="F")
    resid = float(np.linalg.norm(L @ x - b) / max(1.0, np.linalg.norm(b)))
    nullspace = Vh[rank:].conj().T if null_dim else None
    return SteinSolveReport(
        solution=H,
        residual=resid,
        nullspace_dim=null_dim,
        singular=null_dim > 0,
        nullspace=nullspace,
    )


def row_space_basis(R, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of the row space of R."""
    A = np.atleast_2d(np.asarray(R, dtype=complex))
    if A.size == 0:
        return np.zeros((0, A.shape[1]), dtype=complex)
    _, s, Vh = np.linalg.svd(A, full_matrices=False)
    if s.size == 0:
        return np.zeros((0, A.shape[1]), dtype=complex)
    rank = int(np.sum(s > effective_tol(tol, s[0])))
    return Vh[:rank]


def nullspace_basis(R, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal columns spanning the (right) null space of R."""
    A = np.atleast_2d(np.asarray(R, dtype=complex))
    n = A.shape[1]
    if A.size == 0:
        return np.eye(n, dtype=complex)
    _, s, Vh = np.linalg.svd(A)
    cutoff = effective_tol(tol, s[0]) if s.size else tol
    rank = int(np.sum(s > cutoff))
    return Vh[rank:].conj().T


def orthonormal_columns(X, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of X."""
    A = np.atleast_2d(np.asarray(X, dtype=complex))
    if A.size == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    rank = int(np.sum(s > effective_tol(tol, s[0])))
    return U[:, :rank]


def tensor_poly_interpolate(
    f: Callable[[np.ndarray], complex], d: int, deg: int
) -> np.ndarray:
    """Coefficients of a d-variate polynomial of degree <= deg per variable.

    Evaluates f on the tensor grid linspace(-1, 1, deg+1)^d and inverts the
    Vandermonde system along each axis.  Output index [i1, ..., id] is the
    coefficient of x1^i1 ... xd^id.
    """
    pts = np.linspace(-1.0, 1.0, deg + 1)
    V = np.vander(pts, deg + 1, increasing=True)
    grid_shape = (deg + 1,) * d
    F = np.empty(grid_shape, dtype=complex)
    for idx in np.ndindex(*grid_shape):
        F[idx] = f(pts[list(idx)])
    coeffs = F
    for axis in range(d):
        moved = np.moveaxis(coeffs, axis, 0)
        flat = moved.reshape(deg + 1, -1)
        solved = np.linalg.solve(V, flat)
        coeffs = np.moveaxis(solved.reshape(moved.shape), 0, axis)
    return coeffs


def taylor_coeffs_fft(
    f: Callable[[np.ndarray], np.ndarray],
    d: int,
    max_total: int,
    radius: float = 0.4,
    grid: int = 32,
) -> dict[tuple[int, ...], np.ndarray]:
    """Taylor coefficients of an analytic map on a polydisk, by tensor FFT.

    Independent quadrature oracle: samples f on the torus of the given radius
    and reads coefficients from the inverse FFT.  Requires f analytic on the
    closed polydisk of that radius.
    """
    if grid <= max_total:
        raise ValueError("grid must exceed max_total")
    angles = 2 * np.pi * np.arange(grid) / grid
    probe = f(np.array([radius + 0j] * d))
    out_shape = np.shape(probe)
    samples = np.empty((grid,) * d + out_shape, dtype=complex)
    for idx in np.ndindex(*([grid] * d)):
        lam = radius * np.exp(1j * angles[list(idx)])
        samples[idx] = f(lam)
    axes = tuple(range(d))
    # c_n = (1/M^d) sum_k f(r e^{i theta_k}) e^{-2 pi i n.k / M} / r^{|n|}
    hat = np.fft.fftn(samples, axes=axes) / grid**d
    coeffs: dict[tuple[int, ...], np.ndarray] = {}
    from .words import multi_indices_up_to

    for n in multi_indices_up_to(d, max_total):
        coeffs[n] = np.asarray(hat[n]) / radius ** sum(n)
    return coeffs

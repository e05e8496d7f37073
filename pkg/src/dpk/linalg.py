"""Deterministic dense linear-algebra helpers.

All eigen/SVD work on model blocks funnels through these wrappers so that
runs are reproducible: Hermitian eigenvalues come out ascending from LAPACK,
singular values descending, and matrix functions of normal matrices are
assembled from a complex Schur form with the off-diagonal discarded.
"""

import numpy as np
import scipy.linalg

RANK_TOL = 1e-8


def herm(a):
    """Hermitian part (a + a*)/2."""
    return (a + a.conj().T) / 2.0


def svdvals(a):
    """Singular values, descending; empty matrices give an empty array."""
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def svmax(a):
    s = svdvals(a)
    return float(s[0]) if s.size else 0.0


def svmin(a):
    s = svdvals(a)
    return float(s[-1]) if s.size else float("inf")


def matrix_rank_tol(a, tol=RANK_TOL):
    return int(np.count_nonzero(svdvals(a) > tol))


def nullity(a, tol=RANK_TOL):
    n = min(a.shape) if a.size else 0
    return n - matrix_rank_tol(a, tol)


def eigh_sorted(a):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    if a.size == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    return np.linalg.eigh(a)


def expi_hermitian(h):
    """exp(i*h) for Hermitian h via its eigendecomposition."""
    if h.size == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def log_hermitian_pd(a):
    """Principal logarithm of a Hermitian positive-definite matrix."""
    if a.size == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    w, v = np.linalg.eigh(a)
    if w[0] <= 0.0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return herm((v * np.log(w)) @ v.conj().T)


def principal_phases(vals):
    """Phases of unit-modulus values on the branch [-pi, pi)."""
    theta = np.angle(vals)
    theta = np.where(theta >= np.pi, -np.pi, theta)
    return theta


def log_unitary_matrix(u):
    """Hermitian x with exp(i*x) = u for a (numerically) unitary u.

    Uses the complex Schur form; for a unitary matrix the triangular factor
    is diagonal up to roundoff, so dropping its off-diagonal part is exact.
    Eigenphases are taken in [-pi, pi), sending the eigenvalue -1 to -pi.
    """
    if u.size == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    t, q = scipy.linalg.schur(np.ascontiguousarray(u), output="complex")
    theta = principal_phases(np.diagonal(t))
    return herm((q * theta) @ q.conj().T)


def polar_unitary(w):
    """Unitary factor of the polar decomposition w = u * (w*w)^(1/2)."""
    if w.size == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    u, _, vh = np.linalg.svd(w)
    return u @ vh


def dedup_complex(vals, tol=1e-10):
    """Cluster near-equal complex values, keeping the first of each cluster.

    Values are lexicographically sorted by (real, imag) first, so the result
    is deterministic.
    """
    vals = np.asarray(vals, dtype=np.complex128).ravel()
    if vals.size == 0:
        return vals
    order = np.lexsort((vals.imag, vals.real))
    vals = vals[order]
    kept = []
    for z in vals:
        if all(abs(z - k) > tol for k in kept):
            kept.append(z)
    return np.array(kept, dtype=np.complex128)

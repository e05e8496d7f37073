"""Test-side oracles, implemented independently of the library internals."""

import numpy as np


def dense_embed(op, n):
    """Top-left n x n corner of the infinite matrix, built entry by entry."""
    m, p = op.m, op.p
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if i < m and j < m:
                out[i, j] = op.head[i, j]
            elif i >= m and j >= m and (i - m) // p == (j - m) // p:
                out[i, j] = op.tail[(i - m) % p, (j - m) % p]
    return out


def dense_operator_norm(op, n):
    d = dense_embed(op, n)
    return float(np.linalg.svd(d, compute_uv=False)[0]) if d.size else 0.0


def dense_null_dim(op, n, tol=1e-10):
    d = dense_embed(op, n)
    if d.size == 0:
        return 0
    s = np.linalg.svd(d, compute_uv=False)
    return int(np.count_nonzero(s <= tol))


def commutator_probe(op):
    """True iff every residue diagonal projection commutes with op mod tail.

    The tail of the commutator with the r-th residue projection vanishes
    exactly when row and column r of the tail block are diagonal.
    """
    p = op.p
    for r in range(p):
        proj_tail = np.zeros((p, p), dtype=complex)
        proj_tail[r, r] = 1.0
        lhs = op.tail @ proj_tail - proj_tail @ op.tail
        if np.any(lhs != 0):
            return False
    return True


def principal_angles(p_head, q_head):
    """Angles between the ranges of two projection matrices (ascending)."""
    wp, vp = np.linalg.eigh((p_head + p_head.conj().T) / 2)
    wq, vq = np.linalg.eigh((q_head + q_head.conj().T) / 2)
    bp = vp[:, wp > 0.5]
    bq = vq[:, wq > 0.5]
    if bp.shape[1] == 0 or bq.shape[1] == 0:
        return np.zeros(0)
    s = np.linalg.svd(bp.conj().T @ bq, compute_uv=False)
    return np.sort(np.arccos(np.clip(s, 0.0, 1.0)))


def grid_chebyshev_value(points, step=1e-4, refine_from=1e-2):
    """Two-stage grid minimization of max distance to a point set."""
    pts = np.asarray(points, dtype=complex).ravel()
    radius = float(np.max(np.abs(pts))) + 0.5

    def value(lam):
        return float(np.max(np.abs(pts - lam)))

    def sweep(cx, cy, half, h):
        best_val, best_lam = np.inf, 0j
        for x in np.arange(cx - half, cx + half + h / 2, h):
            for y in np.arange(cy - half, cy + half + h / 2, h):
                v = value(complex(x, y))
                if v < best_val:
                    best_val, best_lam = v, complex(x, y)
        return best_val, best_lam

    _, lam1 = sweep(0.0, 0.0, radius, refine_from)
    best, _ = sweep(lam1.real, lam1.imag, 2 * refine_from, step)
    return best

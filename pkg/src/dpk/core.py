"""Eventually block-periodic operators and their exact algebra.

A model operator acts on l2(N) as a fixed m x m ``head`` matrix on the first
m coordinates followed by a single p x p ``tail`` block repeated forever.
The grid invariant p | m makes any two operators alignable by whole-block
expansion, so the class is closed under *-algebra operations, and norms and
spectra are exact because every operator is block diagonal.

Diagonal-plus-compact membership is structural: an operator belongs to the
model D+K exactly when its tail block is a diagonal matrix.  Arithmetic on
exactly-sparse blocks keeps zero entries exactly zero, so membership is
stable under sums, products and adjoints.
"""

import math

import numpy as np

from .errors import AlignmentError, NonFiniteEntry, NotInDpk
from .linalg import dedup_complex, svmax

EQ_TOL = 1e-12


def _as_square(a, what):
    arr = np.array(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise AlignmentError(f"{what} must be a square matrix, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise NonFiniteEntry(f"{what} contains non-finite entries")
    return arr


def _as_vector(a, what):
    arr = np.array(a, dtype=np.complex128)
    if arr.ndim != 1:
        raise AlignmentError(f"{what} must be a vector, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise NonFiniteEntry(f"{what} contains non-finite entries")
    return arr


def _freeze(arr):
    arr.setflags(write=False)
    return arr


class EopOperator:
    """Head matrix plus an infinitely repeated tail block.

    Instances are immutable; every operation returns a new value, so sharing
    across threads is safe.
    """

    __slots__ = ("head", "tail")

    def __init__(self, head, tail):
        head = _as_square(head, "head")
        tail = _as_square(tail, "tail")
        if tail.shape[0] < 1:
            raise AlignmentError("tail block must be at least 1 x 1")
        if head.shape[0] % tail.shape[0] != 0:
            raise AlignmentError(
                f"period {tail.shape[0]} does not divide head size {head.shape[0]}"
            )
        self.head = _freeze(head)
        self.tail = _freeze(tail)

    @classmethod
    def _new(cls, head, tail):
        # Fast path for freshly computed internal arrays; skips validation.
        self = object.__new__(cls)
        head.setflags(write=False)
        tail.setflags(write=False)
        self.head = head
        self.tail = tail
        return self

    @property
    def m(self):
        return self.head.shape[0]

    @property
    def p(self):
        return self.tail.shape[0]

    def __repr__(self):
        return f"EopOperator(m={self.m}, p={self.p})"

    def expand(self, m_new, p_new):
        """Re-represent the same operator on a coarser (m_new, p_new) grid."""
        m, p = self.m, self.p
        if (m_new, p_new) == (m, p):
            return self
        if p_new % p or m_new % p_new or m_new < m:
            raise AlignmentError(f"cannot expand ({m},{p}) to ({m_new},{p_new})")
        head = np.zeros((m_new, m_new), dtype=np.complex128)
        head[:m, :m] = self.head
        for j in range((m_new - m) // p):
            s = m + j * p
            head[s : s + p, s : s + p] = self.tail
        tail = np.zeros((p_new, p_new), dtype=np.complex128)
        for j in range(p_new // p):
            s = j * p
            tail[s : s + p, s : s + p] = self.tail
        return EopOperator._new(head, tail)

    def dense(self, n):
        """Top-left n x n corner of the infinite matrix."""
        out = np.zeros((n, n), dtype=np.complex128)
        k = min(self.m, n)
        out[:k, :k] = self.head[:k, :k]
        pos = self.m
        while pos < n:
            k = min(self.p, n - pos)
            out[pos : pos + k, pos : pos + k] = self.tail[:k, :k]
            pos += self.p
        return out

    def adjoint(self):
        return EopOperator._new(self.head.conj().T.copy(), self.tail.conj().T.copy())

    @property
    def H(self):
        return self.adjoint()

    def __add__(self, other):
        a, b = align(self, other)
        return EopOperator._new(a.head + b.head, a.tail + b.tail)

    def __sub__(self, other):
        a, b = align(self, other)
        return EopOperator._new(a.head - b.head, a.tail - b.tail)

    def __neg__(self):
        return EopOperator._new(-self.head, -self.tail)

    def __mul__(self, scalar):
        lam = complex(scalar)
        return EopOperator._new(lam * self.head, lam * self.tail)

    __rmul__ = __mul__

    def __matmul__(self, other):
        a, b = align(self, other)
        return EopOperator._new(a.head @ b.head, a.tail @ b.tail)

    def isclose(self, other, tol=EQ_TOL):
        return operators_close(self, other, tol)

    def is_hermitian(self, tol=1e-10):
        return (
            float(max(svmax(self.head - self.head.conj().T),
                      svmax(self.tail - self.tail.conj().T))) <= tol
        )

    def is_diagonal(self):
        """True when head and tail are exactly diagonal matrices."""
        h_ok = self.m == 0 or bool(np.all(self.head == np.diag(np.diagonal(self.head))))
        t_ok = bool(np.all(self.tail == np.diag(np.diagonal(self.tail))))
        return h_ok and t_ok

    def normalize(self):
        """Shrink period and head when the representation is redundant.

        Only exact redundancy is removed (a tail that is a block repetition
        of a smaller-period block, trailing head blocks bit-equal to the
        tail), so normalizing never changes the operator.
        """
        tail = np.asarray(self.tail)
        p = self.p
        for q in range(1, p + 1):
            if p % q:
                continue
            if _is_block_repetition(tail, q):
                tail = tail[:q, :q]
                p = q
                break
        head = np.asarray(self.head)
        m = self.m
        while m >= p:
            s = m - p
            if (
                np.all(head[s:m, s:m] == tail)
                and np.all(head[:s, s:m] == 0)
                and np.all(head[s:m, :s] == 0)
            ):
                m = s
            else:
                break
        return EopOperator(head[:m, :m].copy(), tail.copy())


def _is_block_repetition(tail, q):
    p = tail.shape[0]
    for a in range(p // q):
        for b in range(p // q):
            block = tail[a * q : (a + 1) * q, b * q : (b + 1) * q]
            ref = tail[:q, :q] if a == b else 0.0
            if not np.all(block == ref):
                return False
    return True


class Diagonal:
    """Eventually periodic diagonal: head entries plus a repeating pattern."""

    __slots__ = ("head_entries", "tail_pattern")

    def __init__(self, head_entries, tail_pattern):
        head = _as_vector(head_entries, "head entries")
        tail = _as_vector(tail_pattern, "tail pattern")
        if tail.size < 1:
            raise AlignmentError("tail pattern must have length >= 1")
        if head.size % tail.size != 0:
            raise AlignmentError(
                f"period {tail.size} does not divide head size {head.size}"
            )
        self.head_entries = _freeze(head)
        self.tail_pattern = _freeze(tail)

    @property
    def m(self):
        return self.head_entries.size

    @property
    def p(self):
        return self.tail_pattern.size

    def __repr__(self):
        return f"Diagonal(m={self.m}, p={self.p})"

    def to_operator(self):
        return EopOperator(np.diag(self.head_entries), np.diag(self.tail_pattern))

    def expand(self, m_new, p_new):
        if (m_new, p_new) == (self.m, self.p):
            return self
        if p_new % self.p or m_new % p_new or m_new < self.m:
            raise AlignmentError(
                f"cannot expand diagonal ({self.m},{self.p}) to ({m_new},{p_new})"
            )
        reps = (m_new - self.m) // self.p
        head = np.concatenate([self.head_entries, np.tile(self.tail_pattern, reps)])
        return Diagonal(head, np.tile(self.tail_pattern, p_new // self.p))

    def conj(self):
        return Diagonal(self.head_entries.conj(), self.tail_pattern.conj())

    def all_entries(self):
        return np.concatenate([self.head_entries, self.tail_pattern])

    def __mul__(self, other):
        a, b = align_diagonals(self, other)
        return Diagonal(a.head_entries * b.head_entries,
                        a.tail_pattern * b.tail_pattern)


class DpkElement:
    """Canonical pair: diagonal part plus a zero-diagonal, zero-tail compact part."""

    __slots__ = ("diagonal_part", "compact_part")

    def __init__(self, diagonal_part, compact_part):
        self.diagonal_part = diagonal_part
        self.compact_part = compact_part

    def total(self):
        return self.diagonal_part.to_operator() + self.compact_part


def construct(head, tail_block):
    """Validated constructor; see EopOperator."""
    return EopOperator(head, tail_block)


def identity(m=0, p=1):
    return EopOperator(np.eye(m, dtype=np.complex128), np.eye(p, dtype=np.complex128))


def zero(m=0, p=1):
    return EopOperator(
        np.zeros((m, m), dtype=np.complex128), np.zeros((p, p), dtype=np.complex128)
    )


def align(a, b):
    """Re-represent both operators on the common (lcm-period) grid."""
    p_new = math.lcm(a.p, b.p)
    m_new = -(-max(a.m, b.m) // p_new) * p_new
    return a.expand(m_new, p_new), b.expand(m_new, p_new)


def align_diagonals(a, b):
    p_new = math.lcm(a.p, b.p)
    m_new = -(-max(a.m, b.m) // p_new) * p_new
    return a.expand(m_new, p_new), b.expand(m_new, p_new)


def add(a, b):
    return a + b


def mul(a, b):
    return a @ b


def adjoint(a):
    return a.adjoint()


def scale(lam, a):
    return a * lam


def operators_close(a, b, tol=EQ_TOL):
    x, y = align(a, b)
    dh = float(np.max(np.abs(x.head - y.head))) if x.m else 0.0
    dt = float(np.max(np.abs(x.tail - y.tail)))
    return max(dh, dt) <= tol


def delta(t):
    """Conditional expectation onto diagonals: zero out off-diagonal entries."""
    return Diagonal(np.diagonal(t.head).copy(), np.diagonal(t.tail).copy())


def is_dpk_member(s):
    """True exactly when the tail block is a diagonal matrix."""
    return bool(np.all(s.tail == np.diag(np.diagonal(s.tail))))


def require_member(t, what="operator"):
    if not is_dpk_member(t):
        raise NotInDpk(f"{what} has a non-diagonal tail block")
    return t


def canonical_decompose(t):
    """Split t = D + K with the compact part having exactly zero diagonal."""
    if not is_dpk_member(t):
        raise NotInDpk("tail block of T - delta(T) is nonzero")
    d = delta(t)
    k_head = t.head - np.diag(d.head_entries)
    compact = EopOperator(k_head, np.zeros((t.p, t.p), dtype=np.complex128))
    return DpkElement(d, compact)


def _block_norm(b):
    if b.size == 0:
        return 0.0
    d = np.diagonal(b)
    # Exactly diagonal blocks need no SVD: the norm is the largest modulus.
    if np.count_nonzero(b) == np.count_nonzero(d):
        return float(np.max(np.abs(d)))
    return svmax(b)


def operator_norm(t):
    """Exact operator norm: max singular value over the two blocks."""
    vals = [_block_norm(t.tail)]
    if t.m:
        vals.append(_block_norm(t.head))
    return float(max(vals))


def spectrum(t, tol=1e-10):
    """(point spectrum, essential spectrum) as deduplicated sorted arrays.

    Every eigenvalue of the tail block repeats in infinitely many blocks, so
    the essential part is exactly the tail eigenvalue set.
    """
    ess = dedup_complex(np.linalg.eigvals(t.tail), tol)
    if t.m:
        pts = np.concatenate([np.linalg.eigvals(t.head), ess])
    else:
        pts = ess
    return dedup_complex(pts, tol), ess


def finite_spectrum_approx(t, eps):
    """Snap the diagonal part onto an eps-grid, keeping the compact part.

    The output diagonal entries take finitely many values and the operator
    moves by at most eps in norm; Hermitian inputs stay Hermitian since real
    entries are snapped to real grid points.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    dec = canonical_decompose(t)
    d = dec.diagonal_part

    def snap(v):
        return np.round(v.real / eps) * eps + 1j * (np.round(v.imag / eps) * eps)

    quant = Diagonal(snap(d.head_entries), snap(d.tail_pattern))
    return quant.to_operator() + dec.compact_part

"""Unitary and positive factorizations.

Every model unitary U in D+K splits as U = D * exp(i X) with D a diagonal
unitary (the entrywise phases of delta(U)) and X Hermitian with exactly zero
tail.  Positive invertible members split as D^(1/2) exp(Z) D^(1/2) with D a
positive diagonal and Z Hermitian, zero-tail and zero-diagonal; the diagonal
factor is found by a damped fixed-point iteration on its logarithm.
"""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .core import Diagonal, EopOperator, delta, identity, is_dpk_member, operator_norm
from .errors import NoConvergence, NotInDpk, NotPositive, NotUnitary
from .linalg import (
    expi_hermitian,
    herm,
    log_hermitian_pd,
    log_unitary_matrix,
    principal_phases,
)

UNITARY_TOL = 1e-10


def exp_ih(x):
    """exp(i*x) for a Hermitian model operator, exact on diagonal tails."""
    head = expi_hermitian(herm(x.head)) if x.m else x.head
    if np.all(x.tail == np.diag(np.diagonal(x.tail))):
        tail = np.diag(np.exp(1j * np.diagonal(x.tail).real))
    else:
        tail = expi_hermitian(herm(x.tail))
    return EopOperator(head, tail)


def unitarity_defect(u):
    return operator_norm(u.adjoint() @ u - identity())


def require_unitary(u, tol=UNITARY_TOL):
    if unitarity_defect(u) > tol:
        raise NotUnitary("operand is not unitary within tolerance")
    return u


def log_unitary(u):
    """Spectral principal logarithm: Hermitian X with exp(iX) = U.

    Eigenphases live on [-pi, pi); the eigenvalue -1 maps to -pi.  Exactly
    diagonal tails are logged entrywise so the result keeps an exactly
    diagonal tail.
    """
    require_unitary(u)
    head = log_unitary_matrix(u.head)
    if np.all(u.tail == np.diag(np.diagonal(u.tail))):
        tail = np.diag(principal_phases(np.diagonal(u.tail)).astype(np.complex128))
    else:
        tail = log_unitary_matrix(u.tail)
    return EopOperator(head, tail)


@dataclass(frozen=True)
class UnitaryFactorization:
    """U = diagonal_unitary * exp(i * exponent), exponent compact Hermitian."""

    diagonal_unitary: Diagonal
    exponent: EopOperator

    def reconstruct(self):
        return self.diagonal_unitary.to_operator() @ exp_ih(self.exponent)


def _phase(values):
    mags = np.abs(values)
    out = np.ones_like(values)
    big = mags >= 1e-12
    out[big] = values[big] / mags[big]
    return out


def unitary_factorize(u):
    """Factor a model unitary as a diagonal unitary times exp(iX), X zero-tail.

    Head diagonal entries below 1e-12 in modulus get phase 1 (angle zero);
    the tail of the exponent is exactly zero by construction.
    """
    require_unitary(u)
    if not is_dpk_member(u):
        raise NotInDpk("unitary is not a model D+K element")
    d = delta(u)
    phases = Diagonal(_phase(np.asarray(d.head_entries)),
                      _phase(np.asarray(d.tail_pattern)))
    w = phases.conj().to_operator() @ u
    x_head = log_unitary_matrix(w.head)
    x = EopOperator(x_head, np.zeros((u.p, u.p), dtype=np.complex128))
    return UnitaryFactorization(phases, x)


def unitary_path(u, t):
    """Point at parameter t of the canonical path from I to u.

    The path D(s) exp(isX) stays unitary and inside the model; its Lipschitz
    constant on [0,1] is at most pi * (1 + norm(X)).
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("path parameter must lie in [0, 1]")
    fac = unitary_factorize(u)
    d = fac.diagonal_unitary
    theta_h = principal_phases(np.asarray(d.head_entries))
    theta_t = principal_phases(np.asarray(d.tail_pattern))
    d_t = Diagonal(np.exp(1j * t * theta_h), np.exp(1j * t * theta_t))
    return d_t.to_operator() @ exp_ih(fac.exponent * t)


@dataclass(frozen=True)
class PortaRechtFactorization:
    """A = diagonal^(1/2) exp(exponent) diagonal^(1/2), exponent zero-diagonal."""

    diagonal: Diagonal
    exponent: EopOperator
    iterations: int
    residual: float
    trace: List[Tuple[int, float, float]] = field(default_factory=list, repr=False)

    def reconstruct(self):
        d = self.diagonal
        root = Diagonal(np.sqrt(np.asarray(d.head_entries).real).astype(complex),
                        np.sqrt(np.asarray(d.tail_pattern).real).astype(complex))
        r = root.to_operator()
        return r @ _exp_hermitian_op(self.exponent) @ r


def _exp_hermitian_op(x):
    if np.all(x.tail == np.diag(np.diagonal(x.tail))):
        tail = np.diag(np.exp(np.diagonal(x.tail).real).astype(complex))
    else:
        w, v = np.linalg.eigh(herm(x.tail))
        tail = (v * np.exp(w)) @ v.conj().T
    if x.m:
        w, v = np.linalg.eigh(herm(x.head))
        head = (v * np.exp(w)) @ v.conj().T
    else:
        head = x.head
    return EopOperator(head, tail)


def porta_recht(a, tol=1e-10, max_iter=500, init_log_diagonal=None, keep_trace=False):
    """Factor a positive invertible member as D^(1/2) exp(Z) D^(1/2).

    The tail equation forces the diagonal's tail to equal the tail of ``a``
    exactly and the exponent's tail to vanish, so the iteration runs on the
    head block only.

    Parameters
    ----------
    a : EopOperator
        Positive definite model member (smallest eigenvalue > 1e-10).
    tol : float
        Stop when the diagonal of Z is below this in sup norm.
    max_iter : int
        Iteration budget; exceeding it raises NoConvergence.
    init_log_diagonal : array or None
        Optional starting log-diagonal for the head (length m); defaults to
        log of the diagonal of ``a``.  A second, different start is how the
        uniqueness of the factorization is probed.
    keep_trace : bool
        Record (iteration, residual, step size) triples.

    Raises
    ------
    NotPositive, NotInDpk, NoConvergence
    """
    if not is_dpk_member(a):
        raise NotInDpk("operand is not a model D+K element")
    if operator_norm(a - a.adjoint()) > 1e-10:
        raise NotPositive("operand is not self-adjoint")
    pattern = np.diagonal(a.tail)
    head = herm(a.head)
    if a.m and (np.linalg.eigvalsh(head)[0] <= 1e-10):
        raise NotPositive("head block is not positive definite")
    if np.min(pattern.real) <= 1e-10:
        raise NotPositive("tail pattern is not positive")
    m, p = a.m, a.p

    if m == 0:
        d = Diagonal(np.zeros(0, dtype=complex), pattern)
        z = EopOperator(np.zeros((0, 0)), np.zeros((p, p)))
        return PortaRechtFactorization(d, z, 0, 0.0, [])

    if init_log_diagonal is None:
        ell = np.log(np.diagonal(head).real.copy())
    else:
        ell = np.array(init_log_diagonal, dtype=float)
        if ell.shape != (m,):
            raise ValueError(f"init_log_diagonal must have length {m}")

    alpha = 1.0
    prev_res = np.inf
    trace = []
    z_head = None
    for it in range(max_iter + 1):
        scale_vec = np.exp(-ell / 2.0)
        mid = herm(scale_vec[:, None] * head * scale_vec[None, :])
        z_head = log_hermitian_pd(mid)
        rho = np.diagonal(z_head).real.copy()
        res = float(np.max(np.abs(rho)))
        if keep_trace:
            trace.append((it, res, alpha))
        if res <= tol:
            d = Diagonal(np.exp(ell).astype(complex), pattern.copy())
            z = EopOperator(z_head, np.zeros((p, p), dtype=np.complex128))
            return PortaRechtFactorization(d, z, it, res, trace)
        if not np.isfinite(res) or res > 1e8:
            raise NoConvergence("iteration diverged", iterations=it, residual=res)
        if res > prev_res:
            alpha = max(alpha / 2.0, 1.0 / 64.0)
        prev_res = res
        ell = ell + alpha * rho
    raise NoConvergence(
        f"no convergence in {max_iter} iterations", iterations=max_iter, residual=prev_res
    )

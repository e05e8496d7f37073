import numpy as np
import pytest

from dpk.core import Diagonal, construct, identity, operator_norm
from dpk.errors import NotInDpk, NotPositive, NotUnitary
from dpk.factor import (
    exp_ih,
    log_unitary,
    porta_recht,
    unitary_factorize,
    unitary_path,
)
from dpk.generate import (
    random_compact_hermitian,
    random_member,
    random_phases,
    random_positive_member,
    random_unitary_member,
    trial_rng,
)


def test_log_unitary_identity_and_minus_identity():
    z = log_unitary(identity(2, 1))
    assert operator_norm(z) == 0.0
    z = log_unitary(-1.0 * identity(2, 1))
    np.testing.assert_allclose(z.head, -np.pi * np.eye(2))
    np.testing.assert_allclose(z.tail, [[-np.pi]])


def test_log_unitary_roundtrip():
    rng = trial_rng(6, 0)
    for _ in range(25):
        h = random_member(rng, 6, 3, hermitian=True)
        h = h * (0.9 * np.pi / max(operator_norm(h), 1e-9) * rng.uniform(0.2, 1.0))
        u = exp_ih(h)
        z = log_unitary(u)
        assert operator_norm(exp_ih(z) - u) <= 1e-9
        assert operator_norm(z - h) <= 1e-8


def test_log_unitary_rejects_nonunitary():
    with pytest.raises(NotUnitary):
        log_unitary(2.0 * identity(2, 1))


def test_factorize_diagonal_unitary():
    rng = trial_rng(6, 1)
    d = Diagonal(random_phases(rng, 4), random_phases(rng, 2)).to_operator()
    fac = unitary_factorize(d)
    assert operator_norm(fac.exponent) <= 1e-12
    assert operator_norm(fac.reconstruct() - d) <= 1e-12


def test_factorize_pure_exponential():
    rng = trial_rng(6, 2)
    x0 = random_compact_hermitian(rng, 6, 3, 2.5)
    # Zero out the diagonal so the phases of delta(U) are not trivially one.
    x0h = x0.head - np.diag(np.diagonal(x0.head))
    u = exp_ih(construct(x0h, np.zeros((3, 3))))
    fac = unitary_factorize(u)
    assert operator_norm(fac.reconstruct() - u) <= 1e-9
    assert np.all(fac.exponent.tail == 0)
    assert operator_norm(fac.exponent) <= np.pi + 1e-9


def test_factorize_zero_diagonal_entry_phase_convention():
    rot = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)
    u = construct(rot, [[1.0]])
    fac = unitary_factorize(u)
    # Zero diagonal entries get phase one.
    np.testing.assert_array_equal(fac.diagonal_unitary.head_entries, [1.0, 1.0])
    assert operator_norm(fac.reconstruct() - u) <= 1e-9


def test_factorize_rejects():
    with pytest.raises(NotUnitary):
        unitary_factorize(2.0 * identity(2, 1))
    swap_tail = construct(np.zeros((0, 0)), [[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(NotInDpk):
        unitary_factorize(swap_tail)


def test_unitary_path_endpoints_and_lipschitz():
    rng = trial_rng(6, 3)
    u = random_unitary_member(rng, 6, 3)
    assert operator_norm(unitary_path(u, 0.0) - identity(6, 3)) <= 1e-9
    assert operator_norm(unitary_path(u, 1.0) - u) <= 1e-9
    fac = unitary_factorize(u)
    lip = np.pi * (1.0 + operator_norm(fac.exponent))
    grid = np.linspace(0.0, 1.0, 101)
    pts = [unitary_path(u, t) for t in grid]
    worst = max(operator_norm(pts[k + 1] - pts[k]) for k in range(100))
    assert worst <= lip / 100.0 + 1e-9
    from dpk.factor import unitarity_defect

    assert max(unitarity_defect(q) for q in pts[:: 10]) <= 1e-9


def test_porta_recht_diagonal_input():
    a = Diagonal([2.0, 0.5, 1.0], [3.0]).to_operator()
    fac = porta_recht(a)
    assert operator_norm(fac.exponent) <= 1e-10
    np.testing.assert_allclose(fac.diagonal.all_entries(), [2.0, 0.5, 1.0, 3.0])
    assert operator_norm(fac.reconstruct() - a) <= 1e-10


def test_porta_recht_recovers_pure_exponential():
    rng = trial_rng(6, 4)
    z0 = random_compact_hermitian(rng, 4, 2, 1.0)
    z0 = construct(z0.head - np.diag(np.diagonal(z0.head)), np.zeros((2, 2)))
    a_head = _expm_hermitian(z0.head)
    a = construct(a_head, np.eye(2))
    fac = porta_recht(a, tol=1e-12)
    assert np.max(np.abs(fac.diagonal.all_entries() - 1.0)) <= 1e-6
    assert operator_norm(fac.exponent - z0) <= 1e-6


def _expm_hermitian(h):
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return (v * np.exp(w)) @ v.conj().T


def test_porta_recht_uniqueness_probe_3x3():
    rng = trial_rng(6, 5)
    for _ in range(20):
        a = random_positive_member(rng, 3, 1)
        first = porta_recht(a)
        second = porta_recht(a, init_log_diagonal=np.zeros(3))
        assert np.max(np.abs(first.diagonal.all_entries()
                             - second.diagonal.all_entries())) <= 1e-6
        assert operator_norm(first.exponent - second.exponent) <= 1e-6
        assert operator_norm(first.reconstruct() - a) <= 1e-8
        assert np.max(np.abs(np.diagonal(first.exponent.head))) <= 1e-8


def test_porta_recht_tail_forced_exactly():
    rng = trial_rng(6, 6)
    a = random_positive_member(rng, 6, 3)
    fac = porta_recht(a)
    np.testing.assert_array_equal(fac.diagonal.tail_pattern, np.diagonal(a.tail))
    assert np.all(fac.exponent.tail == 0)


def test_porta_recht_rejects():
    with pytest.raises(NotPositive):
        porta_recht(identity(2, 1) * -1.0)
    with pytest.raises(NotInDpk):
        porta_recht(construct(np.eye(2), [[0.0, 1.0], [1.0, 0.0]]))
    rng = trial_rng(6, 7)
    sa = random_member(rng, 4, 2, hermitian=True)  # indefinite generically
    if np.linalg.eigvalsh(sa.head)[0] <= 1e-10:
        with pytest.raises(NotPositive):
            porta_recht(sa)


def test_porta_recht_trace_is_recorded():
    rng = trial_rng(6, 8)
    a = random_positive_member(rng, 4, 2)
    fac = porta_recht(a, keep_trace=True)
    assert len(fac.trace) == fac.iterations + 1
    iterations, residuals, steps = zip(*fac.trace)
    assert residuals[-1] <= 1e-10

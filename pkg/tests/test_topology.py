import numpy as np
import pytest

from dpk.core import Diagonal, identity, operator_norm
from dpk.errors import (
    KindMismatch,
    NotInBall,
    NotOrthogonalPatterns,
    StepTooLarge,
)
from dpk.factor import exp_ih, unitarity_defect
from dpk.generate import (
    random_compact_hermitian,
    random_member,
    random_projection,
    trial_rng,
)
from dpk.projections import ModelProjection, diagonal_projection
from dpk.topology import (
    K0Class,
    UnitaryLoop,
    bundle_section,
    k0_add,
    k0_class,
    loop_winding,
)


def _phase_loop(m, p, j, turns=1, samples=64):
    ops = []
    for t in np.linspace(0.0, 1.0, samples, endpoint=False):
        head = np.ones(m, dtype=complex)
        head[j] = np.exp(2j * np.pi * turns * t)
        ops.append(Diagonal(head, np.ones(p, dtype=complex)).to_operator())
    return UnitaryLoop(ops)


def test_section_identity_and_diagonal():
    d, v = bundle_section(identity(4, 2))
    assert np.all(d.all_entries() == 1.0)
    assert operator_norm(v - identity(4, 2)) == 0.0

    rng = trial_rng(14, 0)
    diag_u = Diagonal(np.exp(1j * rng.uniform(-2.0, 2.0, 4)),
                      np.exp(1j * rng.uniform(-2.0, 2.0, 2))).to_operator()
    d, v = bundle_section(diag_u)
    assert operator_norm(d.to_operator() - diag_u) <= 1e-12
    assert operator_norm(v - identity(4, 2)) <= 1e-12


def test_section_roundtrip_random():
    rng = trial_rng(14, 1)
    for _ in range(25):
        h = random_member(rng, 6, 3, hermitian=True)
        h = h * (0.9 * np.pi * rng.uniform(0.1, 1.0) / max(operator_norm(h), 1e-12))
        u = exp_ih(h)
        d, v = bundle_section(u)
        assert operator_norm(d.to_operator() @ v - u) <= 1e-9
        np.testing.assert_array_equal(v.tail, np.eye(3))
        assert unitarity_defect(v) <= 1e-9


def test_section_rejects_antipode():
    with pytest.raises(NotInBall):
        bundle_section(-1.0 * identity(2, 1))


def test_loop_validation():
    far = [identity(2, 1), -1.0 * identity(2, 1)]
    with pytest.raises(StepTooLarge):
        UnitaryLoop(far)
    with pytest.raises(StepTooLarge):
        UnitaryLoop([identity(2, 1)])


def test_constant_loop_winds_zero():
    loop = UnitaryLoop([identity(3, 1)] * 8)
    head_w, tail_w = loop_winding(loop, "diagonal")
    assert np.all(head_w == 0) and np.all(tail_w == 0)


def test_generator_loop_windings():
    loop = _phase_loop(4, 2, j=1)
    head_w, tail_w = loop_winding(loop, "diagonal")
    np.testing.assert_array_equal(head_w, [0, 1, 0, 0])
    np.testing.assert_array_equal(tail_w, [0, 0])

    double = _phase_loop(4, 2, j=0, turns=2, samples=128)
    head_w, _ = loop_winding(double, "diagonal")
    np.testing.assert_array_equal(head_w, [2, 0, 0, 0])


def test_fiber_generator_image():
    # The fiber generator at entry j maps to diagonal winding e_j together
    # with determinant winding -1 of the compact factor.
    loop = _phase_loop(4, 2, j=2)
    head_w, tail_w = loop_winding(loop, "diagonal")
    np.testing.assert_array_equal(head_w, [0, 0, 1, 0])
    conj = UnitaryLoop([s.adjoint() for s in loop.samples])
    assert loop_winding(conj, "compact") == -1


def test_winding_kind_mismatch():
    rng = trial_rng(14, 2)
    x = random_compact_hermitian(rng, 4, 2, 0.05)
    nondiag = [exp_ih(x * t) for t in np.linspace(0, 1, 8)]
    with pytest.raises(KindMismatch):
        loop_winding(UnitaryLoop(nondiag), "diagonal")

    diag_tail_loop = []
    for t in np.linspace(0.0, 1.0, 32, endpoint=False):
        tail = np.exp(1j * 0.3 * np.sin(2 * np.pi * t)) * np.ones(2)
        diag_tail_loop.append(Diagonal(np.ones(4, dtype=complex), tail).to_operator())
    with pytest.raises(KindMismatch):
        loop_winding(UnitaryLoop(diag_tail_loop), "compact")
    with pytest.raises(KindMismatch):
        loop_winding(UnitaryLoop(diag_tail_loop), "nonsense")


def test_winding_additivity_under_concatenation():
    l1 = _phase_loop(4, 2, j=0)
    l2 = _phase_loop(4, 2, j=1)
    both = l1.concatenate(l2)
    head_w, _ = loop_winding(both, "diagonal")
    np.testing.assert_array_equal(head_w, [1, 1, 0, 0])


def test_k0_class_basics():
    zero_proj = diagonal_projection([0, 0], [0])
    assert k0_class(zero_proj) == K0Class((0,), 0)
    e_can = diagonal_projection([1, 0, 1, 0], [1, 0])
    assert k0_class(e_can) == K0Class((1, 0), 0)


def test_k0_invariance_and_flip():
    rng = trial_rng(14, 3)
    for _ in range(20):
        p = random_projection(rng, 6, 3)
        cls = k0_class(p)
        u = exp_ih(random_compact_hermitian(rng, 6, 3, 1.2))
        moved = ModelProjection(u @ p.op @ u.adjoint())
        assert k0_class(moved) == cls

    base = diagonal_projection([1, 0, 0, 0], [1, 0])
    flipped = diagonal_projection([1, 1, 0, 0], [1, 0])
    assert k0_class(flipped).z_part - k0_class(base).z_part == 1


def test_k0_additivity_and_orthogonality():
    pa = diagonal_projection([1, 0, 0, 0], [1, 0])
    pb = diagonal_projection([0, 1, 0, 1], [0, 1])
    summed = ModelProjection(pa.op + pb.op)
    assert k0_add(k0_class(pa), k0_class(pb)) == k0_class(summed)
    with pytest.raises(NotOrthogonalPatterns):
        k0_add(k0_class(pa), k0_class(pa))


def test_k0_add_aligns_periods():
    a = K0Class((1, 0), 2)
    b = K0Class((0, 1, 0, 1), -1)
    combined = k0_add(a, b)
    assert combined.tail_pattern == (1, 1, 1, 1)
    assert combined.z_part == 1

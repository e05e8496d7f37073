"""Bundle section, loop winding invariants, and the projection class invariant.

The product map (D, V) -> DV from diagonal unitaries times compact-unitary
perturbations of the identity onto the model unitary group admits a section
on the open ball of radius two around the identity.  Winding numbers of
closed unitary loops realize the fundamental-group data of the two factors,
and projections carry a (tail pattern, relative index) class that is stable
under inner conjugation and additive over orthogonal sums.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .core import Diagonal, EopOperator, align, identity, is_dpk_member, operator_norm
from .errors import (
    KindMismatch,
    NotInBall,
    NotInDpk,
    NotOrthogonalPatterns,
    StepTooLarge,
)
from .factor import log_unitary, require_unitary
from .projections import ModelProjection, _canonical_diagonal, pair_index

MAX_LOOP_STEP = 0.5


class UnitaryLoop:
    """Closed loop of model unitaries, aligned to a common grid on creation.

    Consecutive samples (wrapping around) must stay closer than 0.5 in norm
    so that every entrywise phase step is well inside (-pi/3, pi/3) and the
    winding numbers below are unambiguous.
    """

    __slots__ = ("samples", "max_step")

    def __init__(self, samples):
        samples = list(samples)
        if len(samples) < 2:
            raise StepTooLarge("a loop needs at least two samples")
        base = samples[0]
        for s in samples[1:]:
            base, _ = align(base, s)
        aligned = []
        for s in samples:
            a, _ = align(s, base)
            require_unitary(a, 1e-9)
            aligned.append(a)
        steps = [
            operator_norm(aligned[(k + 1) % len(aligned)] - aligned[k])
            for k in range(len(aligned))
        ]
        worst = max(steps)
        if worst >= MAX_LOOP_STEP:
            raise StepTooLarge(f"largest sample gap {worst:.3f} >= {MAX_LOOP_STEP}")
        self.samples = tuple(aligned)
        self.max_step = worst

    @property
    def m(self):
        return self.samples[0].m

    @property
    def p(self):
        return self.samples[0].p

    def __len__(self):
        return len(self.samples)

    def concatenate(self, other):
        """Run this loop, then the other; windings add."""
        return UnitaryLoop(list(self.samples) + list(other.samples))


def _phase_increment_sum(values_from, values_to):
    return np.angle(values_to / values_from)


def _round_integer(x, what):
    rounded = np.round(x)
    if np.max(np.abs(x - rounded)) > 1e-6:
        raise StepTooLarge(f"{what} did not close up to an integer")
    return rounded.astype(int)


def loop_winding(loop, kind):
    """Winding data of a closed loop.

    ``kind='diagonal'`` needs exactly diagonal samples and returns one
    integer per head entry and per tail residue (accumulated principal phase
    increments over the loop).  ``kind='compact'`` needs samples with tail
    equal to the identity and returns the winding of det(head), accumulated
    through the eigenphases of each consecutive ratio so no step can alias.
    """
    n = len(loop)
    if kind == "diagonal":
        for s in loop.samples:
            if not s.is_diagonal():
                raise KindMismatch("diagonal winding needs diagonal samples")
        entries = np.stack(
            [
                np.concatenate([np.diagonal(s.head), np.diagonal(s.tail)])
                for s in loop.samples
            ]
        )
        total = np.zeros(entries.shape[1])
        for k in range(n):
            total += _phase_increment_sum(entries[k], entries[(k + 1) % n])
        winding = _round_integer(total / (2.0 * np.pi), "diagonal winding")
        return winding[: loop.m].copy(), winding[loop.m :].copy()
    if kind == "compact":
        eye_t = np.eye(loop.p, dtype=np.complex128)
        for s in loop.samples:
            if float(np.max(np.abs(s.tail - eye_t))) > 1e-9:
                raise KindMismatch("compact winding needs tail = identity")
        total = 0.0
        for k in range(n):
            if loop.m == 0:
                break
            ratio = loop.samples[k].head.conj().T @ loop.samples[(k + 1) % n].head
            total += float(np.sum(np.angle(np.linalg.eigvals(ratio))))
        winding = _round_integer(np.array([total / (2.0 * np.pi)]), "det winding")
        return int(winding[0])
    raise KindMismatch(f"unknown loop kind {kind!r}")


def bundle_section(u):
    """Section of the product fibration on the ball of radius 2 around I.

    Returns (D, V) with D a diagonal unitary, V a unitary whose tail is
    exactly the identity, and D V = U.
    """
    require_unitary(u)
    if not is_dpk_member(u):
        raise NotInDpk("operand is not a model D+K element")
    if operator_norm(u - identity()) >= 2.0 - 1e-9:
        raise NotInBall("unitary is not inside the ball of radius 2 around I")
    z = log_unitary(u)
    d = Diagonal(
        np.exp(1j * np.diagonal(z.head).real),
        np.exp(1j * np.diagonal(z.tail).real),
    )
    v_head = (d.conj().to_operator() @ u).head
    v = EopOperator(v_head, np.eye(u.p, dtype=np.complex128))
    return d, v


@dataclass(frozen=True)
class K0Class:
    """(tail pattern, index against the canonical diagonal representative)."""

    tail_pattern: Tuple[int, ...]
    z_part: int

    def to_obj(self):
        return {"tail_pattern": list(self.tail_pattern), "z_part": self.z_part}


def k0_class(p):
    """Projection class invariant, stable under model inner conjugation."""
    if not p.is_member():
        raise NotInDpk("projection is not a model D+K element")
    pattern = p.pattern()
    e_can = _canonical_diagonal(pattern, p.m)
    z = pair_index(p, ModelProjection(e_can.to_operator()))
    return K0Class(tuple(int(b) for b in pattern), int(z))


def k0_add(a, b):
    """Class of an orthogonal sum; patterns must stay 0/1 entrywise."""
    if len(a.tail_pattern) != len(b.tail_pattern):
        p_new = math.lcm(len(a.tail_pattern), len(b.tail_pattern))
        pat_a = list(a.tail_pattern) * (p_new // len(a.tail_pattern))
        pat_b = list(b.tail_pattern) * (p_new // len(b.tail_pattern))
    else:
        pat_a, pat_b = list(a.tail_pattern), list(b.tail_pattern)
    summed = [x + y for x, y in zip(pat_a, pat_b)]
    if any(s > 1 for s in summed):
        raise NotOrthogonalPatterns("pattern sum leaves 0/1 range")
    return K0Class(tuple(summed), a.z_part + b.z_part)

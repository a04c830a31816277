"""Derived height pairings: worked values, oracles, coincidence, symmetry."""

from __future__ import annotations

import numpy as np
import pytest

from derived_heights import linalg as la
from derived_heights.groupring import RingCtx, graded_classes_equal
from derived_heights.heights import (
    MembershipError,
    PairingData,
    PairingError,
    random_pairing_data,
)
from derived_heights.rng import SplitMix64

R31 = RingCtx(3, 1)
RINGS = [RingCtx(3, 1), RingCtx(3, 2), RingCtx(5, 1)]


def mult_data(ring, x):
    """X = Y = R, ell = multiplication by x."""
    return PairingData(ring, [[x]])


def all_ring_elements(ring):
    from itertools import product

    for coeffs in product(range(ring.m), repeat=ring.m):
        yield ring.elt(np.array(coeffs, dtype=np.int64))


def test_validate_identity_and_zero():
    data = mult_data(R31, R31.one())
    data.validate()
    assert data.s_module().order() == 1
    assert data.complex().h2().order() == 1
    zero = mult_data(R31, R31.zero())
    zero.validate()
    assert zero.s_module().order() == 27
    assert zero.t_module().order() == 27


def test_validate_fuzz_self_injectivity():
    # random R-linear ell always gives an exact dual sequence: the
    # stated volume is 500 seeded instances across the supported rings
    rng = SplitMix64(137)
    for i in range(500):
        random_pairing_data(RINGS[i % 3], rng, max_rank=2).validate()


def test_from_scalar_matrix_rejects_non_equivariant():
    mat = np.zeros((3, 3), dtype=np.int64)
    mat[0, 0] = 1  # projection onto one scalar coordinate: not R-linear
    with pytest.raises(PairingError):
        PairingData.from_scalar_matrix(R31, mat)


def test_membership_rejection():
    data = mult_data(R31, R31.gamma() - R31.one())
    one = np.zeros(3, dtype=np.int64)
    one[0] = 1
    with pytest.raises(MembershipError):
        data.bd_pairing(1, one, one)  # 1 is not in S_0^(1) = N R
    with pytest.raises(MembershipError):
        data.bd_pairing(3, one, one)  # k = p is out of range


def test_worked_example_k1():
    # ell = gamma - 1 at (3,1): S_0^(1) = N R and <N, N>_1 = class of
    # gamma - 1, scalar 1 under the normalization
    ring = R31
    data = mult_data(ring, ring.gamma() - ring.one())
    nvec = ring.norm().coeffs
    piece = data.piece_span("s", 1)
    assert la.spans_equal(
        piece, la.howell_form(nvec.reshape(1, -1), 3, 1), 3, 1
    )
    bd = data.bd_pairing(1, nvec, nvec)
    assert bd.scalar() == 1
    assert graded_classes_equal(ring, 1, bd.raw, ring.gamma() - ring.one())
    boc = data.boc_pairing(1, nvec, nvec)
    assert boc == bd and boc.scalar() == 1


def test_worked_example_k1_exhaustive_oracle():
    # every admissible lift chain in the 27-element ring gives the same
    # class: for all x, y with N x = N y = N, ell(x)(y) = (g-1) x y is
    # congruent to g-1 mod I^2
    ring = R31
    gm1 = ring.gamma() - ring.one()
    norm = ring.norm()
    xs = [x for x in all_ring_elements(ring) if norm * x == norm]
    assert xs
    for x in xs:
        for y in xs:
            val = gm1 * x * y
            assert graded_classes_equal(ring, 1, val, gm1)


def test_worked_example_k2():
    # ell = N at (3,1): S_0^(2) = N R and <N, N>_2 = class of N = (g-1)^2
    ring = R31
    data = mult_data(ring, ring.norm())
    nvec = ring.norm().coeffs
    piece = data.piece_span("s", 2)
    assert la.spans_equal(piece, la.howell_form(nvec.reshape(1, -1), 3, 1), 3, 1)
    bd = data.bd_pairing(2, nvec, nvec)
    assert bd.scalar() == 1
    assert graded_classes_equal(ring, 2, bd.raw, ring.norm())
    boc = data.boc_pairing(2, nvec, nvec)
    assert boc == bd and boc.scalar() == 1


def test_worked_example_k2_exhaustive_oracle():
    # all chains s~ in S with (g-1) s~ = N, x with D^(1) x = s~ (and the
    # same for y) produce N * x * y = N mod I^3 exactly
    ring = R31
    gm1 = ring.gamma() - ring.one()
    norm = ring.norm()
    from derived_heights.groupring import derivative_op

    d1 = derivative_op(ring, 1)
    # S = ker(N) = I
    s_elts = [s for s in all_ring_elements(ring) if (norm * s).is_zero()]
    tildes = [s for s in s_elts if gm1 * s == norm]
    assert tildes
    values = set()
    for tilde in tildes:
        xs = [x for x in all_ring_elements(ring) if d1 * x == tilde]
        assert xs
        for x in xs[:4]:
            for y in xs[:4]:
                val = norm * x * y
                values.add(tuple(val.coeffs))
                assert graded_classes_equal(ring, 2, val, norm)
    assert values == {tuple(norm.coeffs)}  # I^3 = 0 pins the value exactly


def test_zero_arguments_pair_to_zero():
    ring = R31
    data = mult_data(ring, ring.norm())
    zero = np.zeros(3, dtype=np.int64)
    nvec = ring.norm().coeffs
    assert data.bd_pairing(2, zero, nvec).is_zero()
    assert data.bd_pairing(2, nvec, zero).is_zero()
    assert data.boc_pairing(2, zero, nvec).is_zero()


def test_bilinearity_on_filtration_piece():
    ring = R31
    data = mult_data(ring, ring.gamma() - ring.one())
    piece = data.piece_span("s", 1)
    elts = [v for v in la.span_elements(piece, 3, 1)]
    for s1 in elts:
        for s2 in elts:
            for t in elts:
                if not (s1.any() and s2.any() and t.any()):
                    continue
                lhs = data.bd_pairing(1, (s1 + s2) % 3, t, audit=False)
                a = data.bd_pairing(1, s1, t, audit=False)
                b = data.bd_pairing(1, s2, t, audit=False)
                assert graded_classes_equal(ring, 1, lhs.raw, a.raw + b.raw)


def test_symmetry_against_dual_sequence():
    rng = SplitMix64(139)
    for ring in RINGS[:2]:
        for _ in range(6):
            data = random_pairing_data(ring, rng, max_rank=2)
            rep = data.compare(ring.p - 1, rng=rng, max_card=200)
            assert all(r["symmetric"] for r in rep["records"])


def test_generator_substitution_invariance():
    rng = SplitMix64(149)
    ring = RingCtx(3, 2)
    hits = 0
    for _ in range(8):
        data = random_pairing_data(ring, rng, max_rank=2)
        for k in (1, 2):
            span = data.piece_span("s", k)
            tspan = data.piece_span("t", k)
            for s in la.span_elements(span, 3, 2):
                if not s.any():
                    continue
                for t in la.span_elements(tspan, 3, 2):
                    if not t.any():
                        continue
                    base = data.bd_pairing(k, s, t, rng=rng)
                    for u in (2, 4, 5):
                        assert data.bd_pairing(k, s, t, rng=rng, gen_exp=u) == base
                    hits += 1
                    break
                break
    assert hits > 0


def test_coincidence_fuzz_small():
    rng = SplitMix64(151)
    total = 0
    for ring in RINGS:
        for _ in range(10):
            data = random_pairing_data(ring, rng, max_rank=2)
            rep = data.compare(ring.p - 1, rng=rng, max_card=400)
            assert rep["pass"]
            total += len(rep["records"])
    assert total > 30  # the instance mix must actually produce evaluations


def test_membership_iff_lift_chain_exists():
    # s lies in S_0^(k) exactly when the lift chain (s~ in S, then x
    # with D x = s~) is solvable: cross-validation of the filtration
    # membership against the derivative-operator kernel identities
    rng = SplitMix64(211)
    for ring in RINGS[:2]:
        for _ in range(6):
            data = random_pairing_data(ring, rng, max_rank=2)
            s_fixed = data.s_module().fixed_points().num
            for k in range(1, ring.p):
                piece = data.piece_span("s", k)
                for s in la.span_elements(s_fixed, ring.p, ring.n):
                    member = la.in_span(s, piece, ring.p, ring.n)
                    try:
                        data._one_chain("s", k, 1, s, rng)
                        liftable = True
                    except AssertionError:
                        liftable = False
                    assert member == liftable


def test_boc_equals_bd_on_norm_kernel_instance():
    # X = R^2, ell = diag(N, gamma-1): mixes both degeneracies
    ring = R31
    data = PairingData(
        ring,
        [[ring.norm(), ring.zero()], [ring.zero(), ring.gamma() - ring.one()]],
    )
    data.validate()
    rep = data.compare(2, rng=SplitMix64(7), max_card=10 ** 4)
    assert rep["pass"] and rep["records"]

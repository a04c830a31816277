"""Structure recovery against the Smith-form oracle."""

from __future__ import annotations

import pytest

from derived_heights.recovery import (
    IntComplex,
    TauProfile,
    recover_structure,
    snf_oracle,
    tau_sequence,
    verify_recovery,
)
from derived_heights.rng import SplitMix64


def rand_matrix(rng, rows, cols, bound=50):
    return [[rng.below(2 * bound + 1) - bound for _ in range(cols)]
            for _ in range(rows)]


def test_diag_p_psquared():
    for p in (2, 3, 5):
        cx = IntComplex.make(p, [[p, 0], [0, p * p]])
        prof = tau_sequence(cx)
        assert prof.taus[:3] == [2, 1, 0]
        assert prof.k0 == 2
        assert recover_structure(prof) == (0, {1: 1, 2: 1})
        assert snf_oracle(cx) == (0, {1: 1, 2: 1})


def test_zero_map_is_free():
    cx = IntComplex.make(3, [[0]])
    prof = tau_sequence(cx)
    assert all(t == 1 for t in prof.taus)
    assert prof.k0 == 1
    assert recover_structure(prof) == (1, {})


def test_identity_cokernel_vanishes():
    cx = IntComplex.make(5, [[1, 0], [0, 1]])
    assert recover_structure(tau_sequence(cx)) == (0, {})
    assert snf_oracle(cx) == (0, {})


def test_upper_triangular_hand_case():
    # d = [[p, p], [0, p^2]]: divisors (p, p^2)
    for p in (2, 3):
        cx = IntComplex.make(p, [[p, p], [0, p * p]])
        assert snf_oracle(cx) == (0, {1: 1, 2: 1})
        assert recover_structure(tau_sequence(cx)) == (0, {1: 1, 2: 1})


def test_profile_monotone_and_stable():
    rng = SplitMix64(181)
    for p in (2, 3, 5):
        for _ in range(30):
            cx = IntComplex.make(p, rand_matrix(rng, 3, 3))
            prof = tau_sequence(cx)
            assert all(a >= b for a, b in zip(prof.taus, prof.taus[1:]))
            free, _ = recover_structure(prof)
            assert prof.taus[-1] == free


def test_recovery_matches_oracle_random():
    rng = SplitMix64(191)
    for p in (2, 3, 5):
        for _ in range(40):
            rows = rng.below(4) + 1
            cols = rng.below(4) + 1
            cx = IntComplex.make(p, rand_matrix(rng, rows, cols))
            assert verify_recovery(cx)["pass"]


def test_unimodular_invariance():
    # tau profiles are isomorphism invariants of the cokernel
    rng = SplitMix64(193)
    trials = 0
    for p in (2, 3, 5):
        for _ in range(67):
            a = rand_matrix(rng, 3, 3, 10)
            cx = IntComplex.make(p, a)
            base = tau_sequence(cx).taus
            b = [row[:] for row in a]
            # random elementary row/column operations (unimodular)
            for _ in range(6):
                op = rng.below(4)
                i, j = rng.below(3), rng.below(3)
                if i == j:
                    continue
                c = rng.below(5) - 2
                if op == 0:
                    b[i] = [x + c * y for x, y in zip(b[i], b[j])]
                elif op == 1:
                    b[i], b[j] = b[j], b[i]
                elif op == 2:
                    for row in b:
                        row[i], row[j] = row[j], row[i]
                else:
                    for row in b:
                        row[i] += c * row[j]
            other = tau_sequence(IntComplex.make(p, b)).taus
            kmax = min(len(base), len(other))
            assert base[:kmax] == other[:kmax]
            trials += 1
    assert trials >= 200


def test_profile_rejects_nonsense():
    with pytest.raises(ValueError):
        TauProfile(3, [1, 2])
    with pytest.raises(ValueError):
        IntComplex.make(4, [[1]])
    with pytest.raises(ValueError):
        IntComplex.make(3, [[1, 2], [3]])

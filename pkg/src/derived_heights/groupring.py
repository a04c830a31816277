"""Arithmetic in R = Z/p^n[G] for G cyclic of order p^n.

The coefficient modulus and the group order are the same p^n; that tie
is what makes the augmentation filtration interact with the derivative
operators the way the height pairings need.  p is odd here (the scalar
linear algebra itself also works at p = 2, but the ring context used by
the filtration and pairing layers enforces oddness).

Conventions:

  * gamma is the distinguished generator; elements are coefficient
    vectors of length p^n, index i holding the coefficient of gamma^i
  * regular_rep(x) is multiplication by x on the basis {gamma^i}, acting
    on row vectors from the right
  * on a free module R^g the scalar coordinate g*m + i (m = p^n) is the
    coefficient of gamma^i in slot g
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np

from . import linalg as la


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@lru_cache(maxsize=None)
def _conv_index(m: int) -> np.ndarray:
    """K[i, j] = (i + j) mod m, the cyclic-convolution target indices."""
    idx = (np.arange(m)[:, None] + np.arange(m)[None, :]) % m
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=None)
def _rep_index(m: int) -> np.ndarray:
    """R[i, j] = (j - i) mod m: regular_rep(x) = x.coeffs[R]."""
    idx = (np.arange(m)[None, :] - np.arange(m)[:, None]) % m
    idx.setflags(write=False)
    return idx


def convolve(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Cyclic convolution of coefficient vectors mod m."""
    out = np.zeros(m, dtype=np.int64)
    np.add.at(out, _conv_index(m), np.outer(a, b))
    return out % m


class RingCtx:
    """The pair (p, n) fixing R0 = Z/p^n and R = Z/p^n[G], |G| = p^n."""

    __slots__ = ("p", "n", "m")

    def __init__(self, p: int, n: int):
        if not _is_prime(p) or p == 2:
            raise ValueError("p must be an odd prime")
        if n < 1:
            raise ValueError("n must be positive")
        if p not in (3, 5, 7) or n not in (1, 2):
            raise ValueError(
                "desk scale supports p in {3, 5, 7} and n in {1, 2}"
            )
        self.p = p
        self.n = n
        self.m = p ** n

    def __eq__(self, other):
        return isinstance(other, RingCtx) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self):
        return hash((self.p, self.n))

    def __repr__(self):
        return f"RingCtx(p={self.p}, n={self.n})"

    # -- element constructors -------------------------------------------------

    def elt(self, coeffs) -> "GroupRingElt":
        return GroupRingElt(self, np.asarray(coeffs, dtype=np.int64) % self.m)

    def zero(self) -> "GroupRingElt":
        return self.elt(np.zeros(self.m, dtype=np.int64))

    def one(self) -> "GroupRingElt":
        c = np.zeros(self.m, dtype=np.int64)
        c[0] = 1
        return self.elt(c)

    def gamma(self, power: int = 1) -> "GroupRingElt":
        c = np.zeros(self.m, dtype=np.int64)
        c[power % self.m] = 1
        return self.elt(c)

    def scalar(self, a: int) -> "GroupRingElt":
        c = np.zeros(self.m, dtype=np.int64)
        c[0] = a % self.m
        return self.elt(c)

    def norm(self) -> "GroupRingElt":
        return self.elt(np.ones(self.m, dtype=np.int64))


class GroupRingElt:
    """Element of Z/p^n[G]; immutable coefficient vector of length p^n."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: RingCtx, coeffs: np.ndarray):
        self.ring = ring
        self.coeffs = coeffs % ring.m
        self.coeffs.setflags(write=False)

    def __add__(self, other):
        return GroupRingElt(self.ring, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return GroupRingElt(self.ring, self.coeffs - other.coeffs)

    def __neg__(self):
        return GroupRingElt(self.ring, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElt(self.ring, self.coeffs * other)
        return GroupRingElt(
            self.ring, convolve(self.coeffs, other.coeffs, self.ring.m)
        )

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, GroupRingElt) and bool(
            (self.coeffs == other.coeffs).all()
        )

    def __hash__(self):
        return hash((self.ring.p, self.ring.n, tuple(int(c) for c in self.coeffs)))

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def augmentation(self) -> int:
        return int(self.coeffs.sum()) % self.ring.m

    def is_unit(self) -> bool:
        # R is local with maximal ideal (p, gamma - 1): unit iff the
        # augmentation is a unit of Z/p^n
        return self.augmentation() % self.ring.p != 0

    def substitute_gamma(self, u: int) -> "GroupRingElt":
        """Image under the automorphism gamma -> gamma^u, gcd(u, p) = 1."""
        m = self.ring.m
        if u % self.ring.p == 0:
            raise ValueError("gamma^u generates G only for u coprime to p")
        out = np.zeros(m, dtype=np.int64)
        for i, a in enumerate(self.coeffs):
            out[(i * u) % m] += a
        return GroupRingElt(self.ring, out)

    def __repr__(self):
        terms = [
            (f"{int(a)}" if i == 0 else (f"{int(a)}*g^{i}" if a != 1 else f"g^{i}"))
            for i, a in enumerate(self.coeffs)
            if a
        ]
        return " + ".join(terms) if terms else "0"


def regular_rep(x: GroupRingElt) -> np.ndarray:
    """p^n x p^n matrix of right multiplication by x: row i = gamma^i * x."""
    return x.coeffs[_rep_index(x.ring.m)]


def derivative_op(ring: RingCtx, k: int, gen_exp: int = 1) -> GroupRingElt:
    """Derivative operator of order k for the generator gamma^gen_exp.

    D(k) = (-1)^k * sum_i binom(i, k) * g^(i-k)  with g the generator;
    D(0) is the norm, and (g - 1) D(k) = D(k-1).
    """
    m = ring.m
    if not 0 <= k < m:
        raise ValueError(f"derivative order must be in [0, {m})")
    if gen_exp % ring.p == 0:
        raise ValueError("generator exponent must be coprime to p")
    out = np.zeros(m, dtype=np.int64)
    sign = 1 if k % 2 == 0 else -1
    for i in range(k, m):
        e = (gen_exp * (i - k)) % m
        out[e] = (out[e] + sign * comb(i, k)) % ring.m
    return ring.elt(out)


@lru_cache(maxsize=None)
def _aug_power_cached(p: int, n: int, k: int):
    ring = RingCtx(p, n)
    if k <= 0:
        return la.identity_span(ring.m)
    gm1 = regular_rep(ring.gamma() - ring.one())
    span = la.identity_span(ring.m)
    for _ in range(k):
        span = la.image_span(span, gm1, p, n)
    span.setflags(write=False)
    return span


def aug_ideal_power(ring: RingCtx, k: int) -> np.ndarray:
    """Howell basis of I^k = (gamma - 1)^k R in coefficient coordinates."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _aug_power_cached(ring.p, ring.n, min(k, ring.m * ring.n))


@lru_cache(maxsize=None)
def ideal_reducer(p: int, n: int, k: int) -> la.CosetReducer:
    """Cached canonical reduction modulo I^k."""
    ring = RingCtx(p, n)
    return la.CosetReducer(aug_ideal_power(ring, k), p, n)


@lru_cache(maxsize=None)
def _graded_solver(p: int, n: int, k: int) -> la.Solver:
    ring = RingCtx(p, n)
    gm1k = ((ring.gamma() - ring.one()) ** k).coeffs
    ik1 = aug_ideal_power(ring, k + 1)
    stacked = np.vstack([gm1k.reshape(1, -1), ik1]) if ik1.shape[0] else gm1k.reshape(1, -1)
    return la.Solver(stacked, p, n)


def graded_scalar(ring: RingCtx, k: int, x: GroupRingElt) -> int:
    """Image of the class of x in Q^k = I^k/I^(k+1) under (gamma-1)^k -> 1.

    Only defined for 1 <= k <= p-1 where Q^k is free of rank one over
    Z/p^n; the representative must lie in I^k.
    """
    if not 1 <= k <= ring.p - 1:
        raise ValueError("graded piece is free of rank one only for k <= p-1")
    if not ideal_reducer(ring.p, ring.n, k).contains(x.coeffs):
        raise ValueError("representative does not lie in I^k")
    v = _graded_solver(ring.p, ring.n, k).solve(x.coeffs)
    if v is None:
        raise AssertionError("I^k element not expressible; graded piece broken")
    return int(v[0]) % ring.m


def graded_classes_equal(ring: RingCtx, k: int, x: GroupRingElt, y: GroupRingElt) -> bool:
    """Equality in Q^k, i.e. congruence modulo I^(k+1)."""
    return ideal_reducer(ring.p, ring.n, k + 1).contains((x - y).coeffs)


def derivative_relation_table(ring: RingCtx, kmax: int | None = None) -> dict[int, bool]:
    """Reported, not asserted: does (gamma-1) D(k) = D(k-1) hold at each k?

    The relation is guaranteed (and asserted elsewhere) for k <= p-1;
    beyond that the behaviour is measured and surfaced only.
    """
    if kmax is None:
        kmax = ring.m - 1
    gm1 = ring.gamma() - ring.one()
    out = {}
    for k in range(1, kmax + 1):
        out[k] = gm1 * derivative_op(ring, k) == derivative_op(ring, k - 1)
    return out

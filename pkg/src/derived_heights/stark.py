"""Synthetic Stark-system instances over R = Z/p^n[G].

An instance axiomatizes the algebra a core vertex provides: a free
module X of rank a (the fully relaxed global module), abstract prime
labels 0..r-1 each with a free rank-one local module L_q trivialized by
a declared basis, and localization functionals lambda_q packaged as the
columns of an R-matrix.  For a subset (vertex) m of the primes,

    H(m) = ker(X -> sum of L_q over q not in m),

the dual-module stand-in is W* = coker(ell), and the core rank is
chi = a - r.

A determinant basis z of the rank-one module wedge-bidual^a(X) (tensor
the dual local lines, trivialized) spawns the Stark system by the
transition contractions: eps_m is z contracted by the lambda_q with q
outside m, in ascending label order.  Transition maps between vertices
carry the merge-sign of the removed labels against the remaining
complement, which makes the family strictly compatible and independent
of the route taken through intermediate vertices.

The headline check: the ideal I_i generated by the images of all
weight-i Stark elements equals the i-th Fitting ideal of W*.
"""

from __future__ import annotations

from itertools import combinations
from typing import Optional

import numpy as np

from . import linalg as la
from .groupring import GroupRingElt, RingCtx
from .heights import PairingData, random_ell_matrix, random_unit
from .modules import (
    ExteriorAlgebra,
    Ideal,
    eval_r,
    fitting_from_matrix,
    functional_from_rcoords,
    r_matrix_expand,
)
from .rng import SplitMix64


class StarkError(ValueError):
    pass


def merge_sign(left: tuple[int, ...], right: tuple[int, ...]) -> int:
    """Sign of merging two disjoint ascending label lists into one."""
    inv = sum(1 for a in left for b in right if a > b)
    return -1 if inv % 2 else 1


class StarkInstance:
    """Core-vertex datum: X free of rank a, localization columns ell."""

    def __init__(self, ring: RingCtx, ell_rows: list[list[GroupRingElt]]):
        self.ring = ring
        self.ell = ell_rows
        self.a = len(ell_rows)
        self.r = len(ell_rows[0]) if self.a else 0
        if self.a == 0:
            raise StarkError("not-a-core-vertex: X must have positive rank")
        self.chi = self.a - self.r
        if self.chi < 0:
            raise StarkError(
                "not-a-core-vertex: more local lines than global rank "
                "(Stark systems need nonnegative core rank)"
            )
        self.primes = tuple(range(self.r))
        self.alg = ExteriorAlgebra(ring, self.a, [])
        # lambda_q as an element of X* in dual-basis R-coordinates
        self.fs = [[row[q] for row in ell_rows] for q in range(self.r)]
        self._h: dict[tuple[int, ...], np.ndarray] = {}
        self.scalar_ell = r_matrix_expand(ring, ell_rows) if self.r else None
        self.validate()

    @classmethod
    def build(cls, ring: RingCtx, rank_x: int, primes: int,
              ell_rows: list[list[GroupRingElt]]) -> "StarkInstance":
        if len(ell_rows) != rank_x or any(len(r) != primes for r in ell_rows):
            raise StarkError("not-a-core-vertex: ell shape mismatch")
        return cls(ring, ell_rows)

    def validate(self) -> None:
        """Certify the vertex-lattice and exact-sequence bookkeeping."""
        if self.r == 0:
            return
        # the four-term sequence 0 -> H(empty) -> X -> sum L_q -> W* -> 0
        # is the pairing datum for ell; its dual exactness is the
        # self-injectivity content a core vertex relies on
        PairingData(self.ring, self.ell).validate()
        p, n = self.ring.p, self.ring.n
        for m1 in self.vertices():
            for q in self.primes:
                if q in m1:
                    continue
                m2 = tuple(sorted(m1 + (q,)))
                if not la.span_contains(self.h_span(m2), self.h_span(m1), p, n):
                    raise StarkError("not-a-core-vertex: vertex lattice not monotone")

    def vertices(self, weight: Optional[int] = None):
        if weight is None:
            out = []
            for w in range(self.r + 1):
                out.extend(tuple(c) for c in combinations(self.primes, w))
            return out
        return [tuple(c) for c in combinations(self.primes, weight)]

    def h_span(self, vertex: tuple[int, ...]) -> np.ndarray:
        """Numerator span of H(vertex) = ker(X -> sum of L_q, q outside)."""
        vertex = tuple(sorted(vertex))
        if vertex not in self._h:
            outside = [q for q in self.primes if q not in vertex]
            if not outside:
                self._h[vertex] = la.identity_span(self.a * self.ring.m)
            else:
                cols = r_matrix_expand(
                    self.ring, [[row[q] for q in outside] for row in self.ell]
                )
                self._h[vertex] = la.kernel(cols, self.ring.p, self.ring.n)
        return self._h[vertex]

    def w_star_fitting(self, i: int) -> Ideal:
        """Fitt^i of W* = coker(ell), presented by ell itself."""
        return fitting_from_matrix(self.ring, "R", self.r, self.ell, i)

    # -- Stark elements -----------------------------------------------------------

    def top_functional(self, c: GroupRingElt) -> np.ndarray:
        """c times the canonical generator of the det line over the top vertex."""
        coords = [c if i == 0 else self.ring.zero()
                  for i in range(len(self.alg.subsets(self.a)))]
        return functional_from_rcoords(self.ring, coords)

    def transition(self, src: tuple[int, ...], dst: tuple[int, ...],
                   eps: np.ndarray) -> np.ndarray:
        """v_{src,dst}: contract by the removed labels, with the merge sign."""
        src, dst = tuple(sorted(src)), tuple(sorted(dst))
        if not set(dst) <= set(src):
            raise StarkError("transition requires dst dividing src")
        removed = tuple(q for q in src if q not in dst)
        complement = tuple(q for q in self.primes if q not in src)
        level = self.chi + len(src)
        out = np.asarray(eps, dtype=np.int64)
        for q in removed:
            out = self.alg.contract(level, out, self.fs[q])
            level -= 1
        sign = merge_sign(complement, removed)
        return (sign * out) % self.ring.m

    def stark_system(self, c: GroupRingElt) -> "StarkSystem":
        """The compatible family spawned by c times the det-line basis."""
        if not c.is_unit():
            raise StarkError("z is not a generator of the determinant line")
        return self._family(c)

    def family_from_scalar(self, c: GroupRingElt) -> "StarkSystem":
        """Same construction without the generator requirement (module map)."""
        return self._family(c)

    def _family(self, c: GroupRingElt) -> "StarkSystem":
        top = self.top_functional(c)
        eps = {v: self.transition(self.primes, v, top) for v in self.vertices()}
        return StarkSystem(self, eps, c)

    def minimal_extension(self) -> "StarkInstance":
        """Deterministic fresh prime: zero on old generators, unit basis.

        Leaves W* and hence all Fitting ideals unchanged; used to reach
        vertex weights above the current prime count (the paper's prime
        pool is infinite, the synthetic one grows on demand).
        """
        rows = [list(row) + [self.ring.zero()] for row in self.ell]
        rows.append([self.ring.zero()] * self.r + [self.ring.one()])
        return StarkInstance(self.ring, rows)


class StarkSystem:
    """Family of exterior-bidual functionals indexed by vertices."""

    def __init__(self, inst: StarkInstance, eps: dict[tuple[int, ...], np.ndarray],
                 scalar: GroupRingElt):
        self.inst = inst
        self.eps = eps
        self.scalar = scalar  # coordinate of the spawning det-line element

    def element(self, vertex: tuple[int, ...]) -> np.ndarray:
        return self.eps[tuple(sorted(vertex))]

    def check_compatible(self) -> bool:
        """v_{n,m}(eps_n) == eps_m for every pair m dividing n."""
        inst = self.inst
        for big in inst.vertices():
            for small in inst.vertices():
                if not set(small) <= set(big):
                    continue
                via = inst.transition(big, small, self.eps[big])
                if (via % inst.ring.m != self.eps[small] % inst.ring.m).any():
                    return False
        return True

    def check_kills_wedge_kernel(self) -> bool:
        """Each eps_m descends to the exterior bidual of H(m).

        eps_m is stored as a functional on wedge^(chi+v(m)) X*; it must
        kill ker(X* -> H(m)*) wedge (lower forms), which is exactly what
        makes it an element of the bidual of H(m).
        """
        inst = self.inst
        ring = inst.ring
        p, n = ring.p, ring.n
        from .modules import rcoords_from_functional

        for vertex in inst.vertices():
            deg = inst.chi + len(vertex)
            if deg <= 0:
                continue
            hspan = inst.h_span(vertex)
            ann = (la.kernel(hspan.T, p, n) if hspan.shape[0]
                   else la.identity_span(inst.a * ring.m))
            eps = self.eps[vertex]
            prev = inst.alg.module(deg - 1)
            for phi in ann:
                coords = rcoords_from_functional(ring, phi, inst.a)
                wm = inst.alg.wedge_matrix(deg - 1, coords)
                img = la.image_span(prev.num, wm, p, n)
                for row in img:
                    if int((row * eps).sum()) % ring.m:
                        return False
        return True

    def image_ideal(self, vertex: tuple[int, ...]) -> Ideal:
        """Ideal of values of eps_vertex on the wedge generators."""
        inst = self.inst
        deg = inst.chi + len(vertex)
        if deg < 0:
            return Ideal.zero(inst.ring, "R")
        wedge = inst.alg.module(deg)
        eps = self.eps[tuple(sorted(vertex))]
        values = []
        for sub in inst.alg.subsets(deg):
            values.append(eval_r(wedge, eps, inst.alg.basis_vector(deg, sub)))
        return Ideal.from_elements(inst.ring, "R", values)

    def ideal(self, i: int) -> Ideal:
        """I_i: sum of the image ideals over the weight-i vertices.

        Weights above the instance's prime count are reached by
        adjoining deterministic fresh primes first (the vertex set of a
        synthetic instance is finite, the defining sum is not).
        """
        if i < 0:
            raise ValueError("ideal index must be nonnegative")
        if i > self.inst.r:
            ext = self.inst.minimal_extension()
            return ext.family_from_scalar(self.scalar).ideal(i)
        out = Ideal.zero(self.inst.ring, "R")
        for vertex in self.inst.vertices(weight=i):
            out = out.plus(self.image_ideal(vertex))
        return out


def verify_fitting(inst: StarkInstance, system: StarkSystem, imax: int) -> dict:
    """Fitt^i(W*) versus I_i for 0 <= i <= imax, as a per-index report."""
    records = []
    ok = True
    for i in range(imax + 1):
        fit = inst.w_star_fitting(i)
        stark = system.ideal(i)
        equal = fit == stark
        ok = ok and equal
        records.append({
            "i": i,
            "fitting": _ideal_strings(fit),
            "stark": _ideal_strings(stark),
            "equal": equal,
        })
    return {"pass": ok, "records": records}


def _ideal_strings(ideal: Ideal) -> list[list[int]]:
    return [[int(x) for x in row] for row in ideal.span]


def extend_instance(inst: StarkInstance, rng: SplitMix64) -> StarkInstance:
    """Adjoin a fresh prime with a fresh free generator (still a core vertex).

    The new localization column is arbitrary on the old generators and a
    unit on the new one; the new generator dies at the old primes.
    """
    ring = inst.ring
    rows = []
    for i in range(inst.a):
        extra = ring.elt(np.array([rng.below(ring.m) for _ in range(ring.m)]))
        rows.append(list(inst.ell[i]) + [extra])
    new_row = [ring.zero()] * inst.r + [random_unit(ring, rng)]
    rows.append(new_row)
    return StarkInstance(ring, rows)


def random_instance(ring: RingCtx, rng: SplitMix64, max_rank: int = 3,
                    max_primes: int = 3, chi_choices=(0, 1)) -> StarkInstance:
    """Random core-vertex instance with chi drawn from chi_choices."""
    chi = chi_choices[rng.below(len(chi_choices))]
    r = rng.below(min(max_primes, max_rank - chi)) + 1
    rows = random_ell_matrix(ring, r + chi, r, rng)
    return StarkInstance(ring, rows)
